"""Separation-of-variables solution for a homogeneous disk (independent oracle)."""

from __future__ import annotations

import math

import numpy as np
from scipy import special

from .errors import BesselFailure
from .incident import CircularWave, PlaneWave
from .nystrom import FarField, equispaced_angles


def scattering_coefficients(R: float, q0: float, k: float, orders) -> np.ndarray:
    """``b_n / a_n`` for incident ``a_n J_n(k r) e^{i n theta}``.

    Scattered field ``sum b_n H_n(k r) e^{i n theta}``; the numerator is the
    interior-transmission determinant ``d_n(k)``.
    """
    orders = np.asarray(orders)
    k1 = k * math.sqrt(q0)
    x, x1 = k * R, k1 * R
    jn, jnp_ = special.jv(orders, x), special.jvp(orders, x)
    hn, hnp = special.hankel1(orders, x), special.h1vp(orders, x)
    j1n, j1np = special.jv(orders, x1), special.jvp(orders, x1)
    num = k1 * jn * j1np - k * jnp_ * j1n
    den = k1 * hn * j1np - k * hnp * j1n
    for a in (num, den):
        if not np.all(np.isfinite(a)):
            raise BesselFailure(f"Bessel evaluation failed for kR={x:g}, k1R={x1:g}")
    return -num / den


def auto_terms(R: float, q0: float, k: float, tol: float = 1e-14, cap: int = 400) -> int:
    """Smallest order ``N`` such that ``|b_n| < tol`` for a few orders past ``N``."""
    base = int(k * max(1.0, math.sqrt(q0)) * R) + 8
    n = base
    while n < cap:
        tail = np.abs(scattering_coefficients(R, q0, k, np.arange(n, n + 4)))
        if np.all(tail < tol):
            return n
        n += 4
    raise BesselFailure(f"series did not converge below {tol} within {cap} terms")


def disk_series_farfield(R: float, q0: float, k: float, incident, n_terms: int | None = None,
                         directions=None) -> FarField:
    """Far field of the disk ``|x| < R`` (centered at the origin).

    ``n_terms`` is the largest angular order kept; by default it is chosen so
    the neglected coefficients are below ``1e-14``.
    """
    if R <= 0:
        raise ValueError("radius must be positive")
    theta = equispaced_angles(64) if directions is None else np.asarray(directions, dtype=float)
    if q0 == 1:
        return FarField(theta, np.zeros(len(theta), dtype=complex))
    if isinstance(incident, CircularWave):
        orders = np.array([incident.order])
    elif isinstance(incident, PlaneWave):
        nmax = auto_terms(R, q0, k) if n_terms is None else n_terms
        orders = np.arange(-nmax, nmax + 1)
    else:
        raise TypeError(f"unsupported incident field {incident!r}")
    b = incident.coefficients(orders) * scattering_coefficients(R, q0, k, orders)
    modes = math.sqrt(2 / (math.pi * k)) * np.exp(-0.5j * math.pi * orders - 0.25j * math.pi)
    values = np.exp(1j * np.outer(theta, orders)) @ (b * modes)
    return FarField(theta, values)
