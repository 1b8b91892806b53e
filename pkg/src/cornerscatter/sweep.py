"""Far-field norm versus wavenumber, with mesh self-convergence per wavenumber."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BesselFailure, SolveFailure
from .nystrom import TransmissionProblem, equispaced_angles, far_field, assemble_and_solve
from .quadrature import build_mesh


@dataclass
class SweepRow:
    k: float
    farfield_l2: float
    nodes: int
    selfconv_err: float
    failed: bool = False
    message: str = ""


@dataclass
class SweepTable:
    rows: list = field(default_factory=list)

    @property
    def ok_rows(self) -> list:
        return [r for r in self.rows if not r.failed]

    @property
    def failed(self) -> bool:
        return any(r.failed for r in self.rows)

    def minimum(self) -> SweepRow | None:
        ok = self.ok_rows
        return min(ok, key=lambda r: r.farfield_l2) if ok else None

    def to_csv(self) -> str:
        lines = ["k,farfield_l2,nodes,selfconv_err"]
        for r in self.rows:
            if r.failed:
                lines.append(f"{r.k:.12g},nan,{r.nodes},nan")
            else:
                lines.append(f"{r.k:.12g},{r.farfield_l2:.12e},{r.nodes},{r.selfconv_err:.6e}")
        return "\n".join(lines) + "\n"


def converged_far_field(problem: TransmissionProblem, nodes: int = 256, tol: float = 1e-4,
                        max_nodes: int = 2048, n_angles: int = 64, p: int = 3):
    """Double the node count until successive far fields differ by less than ``tol``.

    Returns the finest far field, its node count and the last max-abs
    difference between consecutive meshes.
    """
    theta = equispaced_angles(n_angles)

    def solve(n):
        mesh = build_mesh(problem.boundary, n, p)
        return far_field(assemble_and_solve(problem, mesh), problem, theta)

    prev = solve(nodes)
    err = math.inf
    while nodes * 2 <= max_nodes:
        nodes *= 2
        cur = solve(nodes)
        err = float(np.abs(cur.values - prev.values).max())
        prev = cur
        if err < tol:
            break
    return prev, nodes, err


def scattering_sweep(domain, q0: float, incident, k_grid, nodes: int = 256, tol: float = 1e-4,
                     max_nodes: int = 2048, n_angles: int = 64) -> SweepTable:
    """Converged far-field L2 norms over ``k_grid``; failed solves are marked per row."""
    table = SweepTable()
    for k in k_grid:
        k = float(k)
        try:
            problem = TransmissionProblem(k, q0, domain, incident)
            ff, n, err = converged_far_field(problem, nodes, tol, max_nodes, n_angles)
            table.rows.append(SweepRow(k, ff.l2_norm, n, err, failed=not err < tol,
                                       message="" if err < tol else "mesh did not converge"))
        except (SolveFailure, BesselFailure) as exc:
            table.rows.append(SweepRow(k, math.nan, nodes, math.nan, failed=True, message=str(exc)))
    return table
