"""Interior transmission eigenvalues of a disk by scan and bisection."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import NoRootInBracket

SCAN_PER_UNIT_K = 2000


@dataclass(frozen=True)
class IteQuery:
    R: float = 1.0
    q0: float = 4.0
    n: int = 0
    k_interval: tuple = (0.5, 10.0)

    def __post_init__(self):
        lo, hi = self.k_interval
        if not self.R > 0:
            raise ValueError("radius must be positive")
        if not self.q0 > 0 or self.q0 == 1:
            raise ValueError("q0 must be positive and different from 1")
        if not 0 < lo < hi:
            raise ValueError(f"bracket must satisfy 0 < kmin < kmax, got {self.k_interval}")


@dataclass(frozen=True)
class IteRoot:
    n: int
    k_star: float
    residual: float
    width: float


def ite_determinant(R: float, q0: float, n: int, k):
    """``k1 J_n(kR) J_n'(k1 R) - k J_n'(kR) J_n(k1 R)`` with ``k1 = k sqrt(q0)``."""
    k = np.asarray(k, dtype=float)
    k1 = k * math.sqrt(q0)
    return k1 * special.jv(n, k * R) * special.jvp(n, k1 * R) - k * special.jvp(n, k * R) * special.jv(n, k1 * R)


def _bisect(f, a, b, fa, rel=1e-12):
    while b - a > rel * b:
        mid = 0.5 * (a + b)
        fm = f(mid)
        if fm == 0:
            return mid, mid, mid
        if (fm > 0) == (fa > 0):
            a, fa = mid, fm
        else:
            b = mid
    return 0.5 * (a + b), a, b


def find_ites(query: IteQuery, tol: float = 1e-10) -> list:
    """All sign changes of ``d_n`` in the bracket, refined to relative width 1e-12.

    Roots of even multiplicity do not change sign and are not detected.
    """
    lo, hi = query.k_interval
    count = max(int(math.ceil((hi - lo) * SCAN_PER_UNIT_K)), 2) + 1
    ks = np.linspace(lo, hi, count)
    f = lambda k: float(ite_determinant(query.R, query.q0, query.n, k))  # noqa: E731
    vals = ite_determinant(query.R, query.q0, query.n, ks)
    roots = []
    for i in np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]:
        k_star, a, b = _bisect(f, ks[i], ks[i + 1], vals[i])
        res = abs(f(k_star))
        if res < tol:
            roots.append(IteRoot(query.n, float(k_star), float(res), float(b - a)))
    for i in np.nonzero(vals == 0)[0]:
        roots.append(IteRoot(query.n, float(ks[i]), 0.0, 0.0))
    if not roots:
        raise NoRootInBracket(f"no sign change of d_{query.n} in ({lo}, {hi})")
    return sorted(roots, key=lambda r: r.k_star)


def roots_to_csv(roots) -> str:
    lines = ["n,k_star,residual"]
    lines += [f"{r.n},{r.k_star:.15g},{r.residual:.3e}" for r in roots]
    return "\n".join(lines) + "\n"
