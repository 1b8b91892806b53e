"""Entire incident fields: plane waves and circular (regular cylindrical) waves."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import BesselFailure


def _finite(*arrays):
    for a in arrays:
        if not np.all(np.isfinite(a)):
            raise BesselFailure("special-function evaluation returned non-finite values")


@dataclass(frozen=True)
class PlaneWave:
    """``exp(i k d.x)`` with direction ``d = (cos angle, sin angle)``."""

    angle: float = 0.0

    @property
    def direction(self) -> np.ndarray:
        return np.array([math.cos(self.angle), math.sin(self.angle)])

    def evaluate(self, x, k: float):
        """Field values and gradients at points ``x`` of shape (n, 2)."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        d = self.direction
        u = np.exp(1j * k * (x @ d))
        return u, 1j * k * u[:, None] * d[None, :]

    def coefficients(self, orders) -> np.ndarray:
        """Coefficients of ``J_n(k r) exp(i n theta)`` in the Jacobi-Anger expansion."""
        orders = np.asarray(orders)
        return (1j) ** orders * np.exp(-1j * orders * self.angle)


@dataclass(frozen=True)
class CircularWave:
    """``J_n(k r) exp(i n theta)`` about the origin."""

    order: int = 0

    def evaluate(self, x, k: float):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        r = np.hypot(x[:, 0], x[:, 1])
        th = np.arctan2(x[:, 1], x[:, 0])
        n = self.order
        u = special.jv(n, k * r) * np.exp(1j * n * th)
        jm = special.jv(n - 1, k * r) * np.exp(1j * (n - 1) * th)
        jp = special.jv(n + 1, k * r) * np.exp(1j * (n + 1) * th)
        grad = np.stack([0.5 * k * (jm - jp), 0.5j * k * (jm + jp)], axis=-1)
        _finite(u, grad)
        return u, grad

    def coefficients(self, orders) -> np.ndarray:
        orders = np.asarray(orders)
        return (orders == self.order).astype(complex)


def parse_incident(text: str):
    """Parse ``plane:<angle>`` or ``circular:<order>``."""
    kind, _, value = text.partition(":")
    kind = kind.strip().lower()
    if kind == "plane":
        return PlaneWave(float(value or 0.0))
    if kind == "circular":
        return CircularWave(int(value or 0))
    raise ValueError(f"unknown incident field {text!r}; use plane:<angle> or circular:<order>")
