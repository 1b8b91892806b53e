"""Periodic parametrization of a boundary curve and Kress log-splitting weights.

The boundary is traversed by one periodic parameter ``s`` in ``[0, 2 pi)``.
Each piece gets a sub-interval proportional to its length. On curves with
more than one piece every junction is graded with Kress's polynomial
substitution of exponent ``p``, so the composite map and its derivatives up
to order ``p - 1`` vanish there; nodes then cluster algebraically at corners.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import BoundaryCurve


def _v(u, p):
    return (1.0 / p - 0.5) * (1 - 2 * u) ** 3 + (1.0 / p) * (2 * u - 1) + 0.5


def _dv(u, p):
    return -6.0 * (1.0 / p - 0.5) * (1 - 2 * u) ** 2 + 2.0 / p


def grading(u, p: int = 3):
    """Kress's substitution on [0, 1] and its derivative."""
    u = np.asarray(u, dtype=float)
    a = _v(u, p) ** p
    b = _v(1 - u, p) ** p
    da = p * _v(u, p) ** (p - 1) * _dv(u, p)
    db = -p * _v(1 - u, p) ** (p - 1) * _dv(1 - u, p)
    w = a / (a + b)
    dw = (da * b - a * db) / (a + b) ** 2
    return w, dw


def kress_weights(n: int) -> np.ndarray:
    """``R_j`` for ``j = 0..2n-1``: ``int L(s - t) f(t) dt ~ sum_j R_{|i-j|} f(t_j)``.

    ``L(s) = log(4 sin(s/2)**2)`` and the ``2n`` nodes are equispaced.
    """
    j = np.arange(2 * n)
    m = np.arange(1, n)
    r = -(2 * math.pi / n) * (np.cos(np.outer(j, m) * math.pi / n) / m).sum(axis=1)
    return r - (math.pi / n**2) * np.cos(j * math.pi)


@dataclass
class QuadratureMesh:
    """Nodes of the periodic parametrization.

    Attributes hold, per node: the parameter ``s``, position ``x``, the
    derivative ``dx`` of the position with respect to ``s``, the owning
    piece and that piece's local parameter. ``weight`` is the trapezoid weight
    ``pi / n`` (identical for every node, hence positive).
    """

    n: int
    p: int
    s: np.ndarray
    x: np.ndarray
    dx: np.ndarray
    piece: np.ndarray
    local: np.ndarray

    @property
    def size(self) -> int:
        return 2 * self.n

    @property
    def weight(self) -> float:
        return math.pi / self.n

    @property
    def speed(self) -> np.ndarray:
        return np.hypot(self.dx[:, 0], self.dx[:, 1])

    @property
    def normal(self) -> np.ndarray:
        """Outward unit normal (the curve is counterclockwise)."""
        sp = self.speed
        return np.stack([self.dx[:, 1] / sp, -self.dx[:, 0] / sp], axis=-1)

    @property
    def weights(self) -> np.ndarray:
        """Arclength weights: integral of f ds is about ``sum(weights * f)``."""
        return self.weight * self.speed


def build_mesh(boundary: BoundaryCurve, nodes: int, p: int = 3) -> QuadratureMesh:
    """Mesh with ``nodes`` (even) collocation points on ``boundary``.

    Nodes sit at ``s_j = (j + 1/2) pi / n`` so no node lands on a junction.
    """
    if nodes < 8 or nodes % 2:
        raise ValueError(f"node count must be an even number >= 8, got {nodes}")
    n = nodes // 2
    s = (np.arange(nodes) + 0.5) * math.pi / n
    pieces = boundary.pieces
    if len(pieces) == 1:
        x, vel, _ = pieces[0].evaluate(s / (2 * math.pi))
        dx = vel / (2 * math.pi)
        return QuadratureMesh(n, 0, s, x, dx, np.zeros(nodes, dtype=int), s / (2 * math.pi))
    lengths = boundary.piece_lengths()
    edges = 2 * math.pi * np.concatenate([[0.0], np.cumsum(lengths)]) / lengths.sum()
    which = np.clip(np.searchsorted(edges, s, side="right") - 1, 0, len(pieces) - 1)
    x = np.empty((nodes, 2))
    dx = np.empty((nodes, 2))
    local = np.empty(nodes)
    for i, piece in enumerate(pieces):
        sel = which == i
        if not np.any(sel):
            continue
        h = edges[i + 1] - edges[i]
        u = (s[sel] - edges[i]) / h
        t, dt = grading(u, p)
        pos, vel, _ = piece.evaluate(t)
        x[sel] = pos
        dx[sel] = vel * (dt / h)[:, None]
        local[sel] = t
    return QuadratureMesh(n, p, s, x, dx, which, local)
