"""Nystrom solver for the two-dimensional acoustic transmission problem.

The scattered field outside and the total field inside are represented as

    u_sc = S_0 psi + D_0 phi,      u_int = S_1 psi + D_1 phi,

with single/double-layer potentials for the wavenumbers ``k_0 = k`` and
``k_1 = k sqrt(q0)``. The jump relations turn the transmission conditions
into the second-kind system

    phi + (K_0 - K_1) phi + (S_0 - S_1) psi = -u_in
    psi - (K'_0 - K'_1) psi - (T_0 - T_1) phi = d_nu u_in

whose operators are differences of layer operators and only weakly
singular. It is uniquely solvable for every real ``k > 0``, so there are
no spurious resonances. Each kernel is split as ``M1(s, t) log(4 sin^2((s-t)/2)) + M2(s, t)``
and integrated with Kress's product quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special
from scipy.linalg import lu_factor, lu_solve

from .errors import BesselFailure, SolveFailure
from .geometry import BoundaryCurve
from .incident import CircularWave, PlaneWave
from .quadrature import QuadratureMesh, build_mesh, kress_weights

EULER_GAMMA = 0.5772156649015329


@dataclass(frozen=True)
class TransmissionProblem:
    """Wavenumber ``k``, interior index ``q0`` and the scatterer's boundary."""

    k: float
    q0: float
    boundary: BoundaryCurve
    incident: PlaneWave | CircularWave = PlaneWave(0.0)

    def __post_init__(self):
        if not self.k > 0:
            raise ValueError(f"wavenumber must be positive, got {self.k}")
        if not self.q0 > 0:
            raise ValueError(f"interior index must be positive, got {self.q0}")
        if self.q0 == 1:
            raise ValueError("q0 = 1 means no scatterer")

    @property
    def k1(self) -> float:
        return self.k * math.sqrt(self.q0)


@dataclass
class Densities:
    """Solved boundary densities on a mesh."""

    mesh: QuadratureMesh
    phi: np.ndarray
    psi: np.ndarray
    condition: float = float("nan")


@dataclass
class FarField:
    """Samples of the far-field pattern at angles ``theta``."""

    theta: np.ndarray
    values: np.ndarray

    @property
    def directions(self) -> np.ndarray:
        return np.stack([np.cos(self.theta), np.sin(self.theta)], axis=-1)

    @property
    def l2_norm(self) -> float:
        """Trapezoid rule for ``(int |u_inf|^2 dtheta)^(1/2)`` on equispaced angles."""
        if len(self.theta) == 0:
            return 0.0
        return float(np.sqrt(2 * math.pi * np.mean(np.abs(self.values) ** 2)))


def equispaced_angles(count: int) -> np.ndarray:
    return 2 * math.pi * np.arange(count) / count


def _checked(*arrays):
    for a in arrays:
        if not np.all(np.isfinite(a)):
            raise BesselFailure("Bessel/Hankel evaluation returned non-finite values")
    return arrays


def _y1_regular(z):
    """``Y_1(z) + 2 / (pi z)``, accurate also for tiny ``z``."""
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    small = z < 0.5
    zs = z[small]
    # ascending series; the pole term is removed analytically
    j1 = special.j1(zs)
    acc = np.zeros_like(zs)
    term = zs / 2
    psi_sum = 1 - 2 * EULER_GAMMA  # psi(1) + psi(2)
    for kk in range(12):
        acc += psi_sum * term
        term = term * (-(zs**2) / 4) / ((kk + 1) * (kk + 2))
        psi_sum += 1.0 / (kk + 1) + 1.0 / (kk + 2)
    out[small] = (2 / math.pi) * np.log(zs / 2) * j1 - acc / math.pi
    zl = z[~small]
    out[~small] = special.y1(zl) + 2 / (math.pi * zl)
    return out


def _g(kappa, r):
    """``kappa H_1(kappa r) / r`` without its kappa-independent ``-2i/(pi r^2)`` pole."""
    z = kappa * r
    return kappa * (special.j1(z) + 1j * _y1_regular(z)) / r


@dataclass
class _Geometry:
    x: np.ndarray
    speed: np.ndarray
    nu: np.ndarray
    d: np.ndarray  # x_i - x_j
    r: np.ndarray
    log_term: np.ndarray
    diag: np.ndarray


def _pair_geometry(mesh: QuadratureMesh) -> _Geometry:
    x = mesh.x
    d = x[:, None, :] - x[None, :, :]
    r = np.hypot(d[..., 0], d[..., 1])
    diag = np.eye(mesh.size, dtype=bool)
    r = np.where(diag, 1.0, r)
    ds = mesh.s[:, None] - mesh.s[None, :]
    with np.errstate(divide="ignore"):
        log_term = np.where(diag, 0.0, np.log(4 * np.sin(ds / 2) ** 2))
    return _Geometry(x, mesh.speed, mesh.normal, d, r, log_term, diag)


def _operator(m1, m2, mesh, weights):
    """Kress quadrature matrix for kernel ``m1 * L + m2``."""
    idx = np.abs(np.arange(mesh.size)[:, None] - np.arange(mesh.size)[None, :])
    return weights[idx] * m1 + mesh.weight * m2


def difference_operators(mesh: QuadratureMesh, k0: float, k1: float) -> dict:
    """Discretized ``S_0 - S_1``, ``K_0 - K_1``, ``K'_0 - K'_1`` and ``T_0 - T_1``.

    All act on densities sampled at the nodes (per unit arclength).
    """
    g = _pair_geometry(mesh)
    R = kress_weights(mesh.n)
    sp_y = g.speed[None, :]
    r, diag, L = g.r, g.diag, g.log_term
    dn_y = (g.d * g.nu[None, :, :]).sum(-1)  # (x - y) . nu_y
    dn_x = (g.d * g.nu[:, None, :]).sum(-1)  # (x - y) . nu_x
    cos_xy = g.nu @ g.nu.T
    p = dn_x * dn_y / r**2

    def per_kappa(kappa):
        z = kappa * r
        j0, j1 = special.j0(z), special.j1(z)
        h0 = j0 + 1j * special.y0(z)
        gk = _g(kappa, r)
        _checked(j0, j1, h0, gk)
        # diagonal limits of the smooth log coefficients
        j0 = np.where(diag, 1.0, j0)
        j1r = np.where(diag, kappa / 2, j1 / r)
        return j0, j1r, h0, gk

    a0, b0, c0, g0 = per_kappa(k0)
    a1, b1, c1, g1 = per_kappa(k1)
    c = 1 / (4 * math.pi)

    # single layer
    full = 0.25j * (c0 - c1) * sp_y
    m1 = -c * (a0 - a1) * sp_y
    m2 = full - m1 * L
    m2[diag] = (g.speed / (2 * math.pi)) * math.log(k1 / k0)
    S = _operator(m1, m2, mesh, R)

    # double layer (density differentiated along the source normal)
    full = 0.25j * (g0 - g1) * dn_y * sp_y
    m1 = -c * (k0 * b0 - k1 * b1) * dn_y * sp_y
    m2 = full - m1 * L
    m1[diag] = 0.0
    m2[diag] = 0.0
    K = _operator(m1, m2, mesh, R)

    # adjoint double layer (derivative along the target normal)
    full = -0.25j * (g0 - g1) * dn_x * sp_y
    m1 = c * (k0 * b0 - k1 * b1) * dn_x * sp_y
    m2 = full - m1 * L
    m1[diag] = 0.0
    m2[diag] = 0.0
    Kp = _operator(m1, m2, mesh, R)

    # hypersingular difference
    full = 0.25j * ((g0 - g1) * (cos_xy - 2 * p) + (k0**2 * c0 - k1**2 * c1) * p) * sp_y
    m1 = -c * ((k0 * b0 - k1 * b1) * (cos_xy - 2 * p) + (k0**2 * a0 - k1**2 * a1) * p) * sp_y
    m2 = full - m1 * L
    sp = g.speed

    def t_diag(kappa):
        return sp * (1j * kappa**2 / 8 + kappa**2 / (8 * math.pi) * (1 - 2 * EULER_GAMMA)
                     - kappa**2 / (4 * math.pi) * (np.log(sp) + math.log(kappa / 2)))

    m1[diag] = -(k0**2 - k1**2) / (8 * math.pi) * sp
    m2[diag] = t_diag(k0) - t_diag(k1)
    T = _operator(m1, m2, mesh, R)
    return {"S": S, "K": K, "Kp": Kp, "T": T}


def assemble(problem: TransmissionProblem, mesh: QuadratureMesh):
    """System matrix and right-hand side of the boundary integral equations."""
    ops = difference_operators(mesh, problem.k, problem.k1)
    size = mesh.size
    eye = np.eye(size)
    A = np.block([[eye + ops["K"], ops["S"]], [-ops["T"], eye - ops["Kp"]]])
    u, grad = problem.incident.evaluate(mesh.x, problem.k)
    dnu = (grad * mesh.normal).sum(-1)
    rhs = np.concatenate([-u, dnu])
    return A, rhs


def assemble_and_solve(problem: TransmissionProblem, mesh: QuadratureMesh | int, cond_limit: float = 1e12) -> Densities:
    """Solve for the densities; ``mesh`` may be a node count."""
    if isinstance(mesh, (int, np.integer)):
        mesh = build_mesh(problem.boundary, int(mesh))
    A, rhs = assemble(problem, mesh)
    lu = lu_factor(A, check_finite=True)
    rcond_est = np.min(np.abs(np.diag(lu[0]))) / np.max(np.abs(np.diag(lu[0])))
    if not rcond_est > 1.0 / cond_limit:
        cond = float(np.linalg.cond(A))
        if not cond < cond_limit:
            raise SolveFailure(f"Nystrom matrix is numerically singular (condition {cond:.3e})", condition=cond)
    sol = lu_solve(lu, rhs)
    n = mesh.size
    return Densities(mesh, sol[:n], sol[n:], condition=1.0 / rcond_est if rcond_est else float("inf"))


def far_field(densities: Densities, problem: TransmissionProblem, directions) -> FarField:
    """Far-field pattern for ``u_sc ~ exp(i k |x|) / sqrt|x| u_inf``.

    ``directions`` are angles (radians) or unit vectors of shape (m, 2).
    """
    directions = np.asarray(directions, dtype=float)
    theta = directions if directions.ndim == 1 else np.arctan2(directions[:, 1], directions[:, 0])
    k = problem.k
    mesh = densities.mesh
    xhat = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
    gamma = np.exp(0.25j * math.pi) / math.sqrt(8 * math.pi * k)
    phase = np.exp(-1j * k * (xhat @ mesh.x.T))
    dnorm = xhat @ mesh.normal.T
    integrand = (densities.psi[None, :] - 1j * k * dnorm * densities.phi[None, :]) * phase
    values = gamma * (integrand * mesh.weights[None, :]).sum(axis=1)
    return FarField(theta, values)


def solve_far_field(problem: TransmissionProblem, nodes: int, n_angles: int = 64, p: int = 3) -> FarField:
    mesh = build_mesh(problem.boundary, nodes, p)
    return far_field(assemble_and_solve(problem, mesh), problem, equispaced_angles(n_angles))
