"""Corner germs and closed boundary curves.

The exact part (``CornerProfile``, ``StrongCorner``, ``AnalyticArc``) feeds
the symbolic certification engine and keeps every coefficient rational. The
numeric part (``BoundaryCurve`` and its pieces) feeds the Nystrom solver.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from gmpy2 import mpq
from shapely.geometry import LinearRing

from .errors import DegenerateTangents, GeometryError, InvalidProfile, SideMismatch
from .exact import parse_rational, rational_str

# ---------------------------------------------------------------------------
# exact germs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CornerProfile:
    """Weakly singular germ ``x2 = c1 x1**alpha1`` (x1 >= 0), ``c2 x1**alpha2`` (x1 <= 0)."""

    c1: mpq
    alpha1: int
    c2: mpq
    alpha2: int
    beta: int

    def side(self, side: int) -> tuple:
        if side == 1:
            return self.c1, self.alpha1
        if side == 2:
            return self.c2, self.alpha2
        raise ValueError(f"side must be 1 or 2, got {side}")

    def arc_coefficients(self, side: int) -> list:
        """Polynomial coefficients ``[g0, g1, ...]`` of the side function."""
        c, alpha = self.side(side)
        coeffs = [mpq(0)] * (alpha + 1)
        coeffs[alpha] = c
        return coeffs

    def arcs(self) -> list:
        return [self.arc_coefficients(1), self.arc_coefficients(2)]

    def swapped(self) -> "CornerProfile":
        """Same germ with the roles of the two sides exchanged."""
        return make_weak_profile(self.c2, self.alpha2, self.c1, self.alpha1)

    def to_json(self) -> dict:
        return {
            "kind": "weak",
            "c1": rational_str(self.c1),
            "alpha1": self.alpha1,
            "c2": rational_str(self.c2),
            "alpha2": self.alpha2,
        }


def _as_order(value, name) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
        raise InvalidProfile(f"{name} must be an integer, got {value!r}")
    return int(value)


def make_weak_profile(c1, alpha1, c2, alpha2) -> CornerProfile:
    """Validate a weakly singular germ and compute its singularity order."""
    alpha1 = _as_order(alpha1, "alpha1")
    alpha2 = _as_order(alpha2, "alpha2")
    try:
        c1 = parse_rational(c1)
        c2 = parse_rational(c2)
    except (TypeError, ValueError) as exc:
        raise InvalidProfile(str(exc)) from exc
    if alpha1 < 2 or alpha2 < 2:
        raise InvalidProfile(f"exponents must be >= 2, got ({alpha1}, {alpha2})")
    if (c1, alpha1) == (c2, alpha2):
        raise InvalidProfile("both sides coincide: the boundary is analytic at O")
    if c1 == 0 and c2 == 0:
        raise InvalidProfile("c1 and c2 both vanish: the boundary is flat at O")
    if c1 != 0 and c2 != 0:
        beta = min(alpha1, alpha2)
    elif c2 == 0:
        beta = alpha1
    else:
        beta = alpha2
    return CornerProfile(c1, alpha1, c2, alpha2, beta)


def profile_normal(profile: CornerProfile, side: int, x1) -> tuple:
    """Unnormalized normal ``(alpha_j c_j x1**(alpha_j-1), -1)`` on side ``side``."""
    x1 = parse_rational(x1)
    if side == 1 and x1 < 0:
        raise SideMismatch(f"side 1 lives on x1 >= 0, got x1={rational_str(x1)}")
    if side == 2 and x1 > 0:
        raise SideMismatch(f"side 2 lives on x1 <= 0, got x1={rational_str(x1)}")
    c, alpha = profile.side(side)
    return (alpha * c * x1 ** (alpha - 1), mpq(-1))


def _poly_coeffs(coeffs) -> tuple:
    out = tuple(parse_rational(c) for c in coeffs)
    if not out:
        raise InvalidProfile("empty polynomial")
    return out


@dataclass(frozen=True)
class StrongCorner:
    """Strongly singular germ: arcs ``x2 = g_right(x1)`` (x1 >= 0), ``g_left(x1)`` (x1 <= 0).

    Coefficients are stored as exact rationals ``[g0, g1, g2, ...]`` with
    ``g0 = 0``; the slopes are ``g1``.
    """

    right: tuple
    left: tuple

    def __post_init__(self):
        for name, g in (("right", self.right), ("left", self.left)):
            if g[0] != 0:
                raise InvalidProfile(f"{name} arc does not pass through O (g(0) = {rational_str(g[0])})")
        if self.slope_right == self.slope_left:
            raise InvalidProfile("equal one-sided slopes: not a strongly singular corner")

    @property
    def slope_right(self) -> mpq:
        return self.right[1] if len(self.right) > 1 else mpq(0)

    @property
    def slope_left(self) -> mpq:
        return self.left[1] if len(self.left) > 1 else mpq(0)

    def tangents(self) -> tuple:
        """Direction vectors ``(1, s+)`` and ``(1, s-)`` (not normalized)."""
        return (mpq(1), self.slope_right), (mpq(1), self.slope_left)

    def arcs(self) -> list:
        return [list(self.right), list(self.left)]

    def to_json(self) -> dict:
        return {
            "kind": "strong",
            "right": [rational_str(c) for c in self.right],
            "left": [rational_str(c) for c in self.left],
        }


def make_strong_corner(right, left) -> StrongCorner:
    """Build a strong corner from coefficient lists or bare slopes."""
    def coeffs(g):
        if isinstance(g, (list, tuple)):
            return _poly_coeffs(g)
        return (mpq(0), parse_rational(g))
    return StrongCorner(coeffs(right), coeffs(left))


@dataclass(frozen=True)
class AnalyticArc:
    """A single analytic arc ``x2 = g(x1)`` through O (no corner)."""

    coeffs: tuple

    def __post_init__(self):
        if self.coeffs[0] != 0:
            raise InvalidProfile("arc does not pass through O")

    def arcs(self) -> list:
        return [list(self.coeffs)]

    def to_json(self) -> dict:
        return {"kind": "arc", "poly": [rational_str(c) for c in self.coeffs]}


def make_analytic_arc(coeffs) -> AnalyticArc:
    return AnalyticArc(_poly_coeffs(coeffs))


@dataclass(frozen=True)
class PotentialPair:
    """Constant potentials on the two sides of the interface (``q1 != q2``)."""

    q1: object
    q2: object

    def __post_init__(self):
        if self.q1 == self.q2:
            raise ValueError("potentials must differ")
        exact = all(isinstance(q, type(mpq(0))) for q in (self.q1, self.q2))
        if not exact and (float(self.q1) <= 0 or float(self.q2) <= 0):
            raise ValueError("numeric potentials must be positive")


def check_independent(tau1, tau2) -> None:
    if tau1[0] * tau2[1] - tau1[1] * tau2[0] == 0:
        raise DegenerateTangents(f"tangents {tau1} and {tau2} are parallel")


# ---------------------------------------------------------------------------
# numeric boundary pieces
# ---------------------------------------------------------------------------


class Piece:
    """Analytic map [0, 1] -> R^2 with first and second derivatives."""

    def evaluate(self, t):
        raise NotImplementedError

    def point(self, t: float) -> np.ndarray:
        return self.evaluate(np.array([t]))[0][0]


@dataclass(frozen=True)
class GraphPiece(Piece):
    """Graph ``x2 = sum coeffs[k] x1**k`` for x1 running from ``x_start`` to ``x_end``."""

    coeffs: tuple
    x_start: float
    x_end: float

    def evaluate(self, t):
        t = np.asarray(t, dtype=float)
        span = self.x_end - self.x_start
        x = self.x_start + span * t
        poly = np.polynomial.Polynomial(self.coeffs)
        d1 = poly.deriv(1)
        d2 = poly.deriv(2)
        pos = np.stack([x, poly(x)], axis=-1)
        vel = np.stack([np.full_like(x, span), span * d1(x)], axis=-1)
        acc = np.stack([np.zeros_like(x), span**2 * d2(x)], axis=-1)
        return pos, vel, acc


@dataclass(frozen=True)
class ArcPiece(Piece):
    """Circular arc ``center + radius*(cos, sin)(theta0 + t*dtheta)``."""

    center: tuple
    radius: float
    theta0: float
    dtheta: float

    def evaluate(self, t):
        t = np.asarray(t, dtype=float)
        th = self.theta0 + self.dtheta * t
        c, s = np.cos(th), np.sin(th)
        cx, cy = self.center
        r, w = self.radius, self.dtheta
        pos = np.stack([cx + r * c, cy + r * s], axis=-1)
        vel = np.stack([-r * w * s, r * w * c], axis=-1)
        acc = np.stack([-r * w * w * c, -r * w * w * s], axis=-1)
        return pos, vel, acc


def _bump(u, power, width, order):
    """Derivative ``order`` of ``u**power / power! * exp(-(u/width)**2)``."""
    g = np.exp(-((u / width) ** 2))
    g1 = -2.0 * u / width**2 * g
    g2 = (4.0 * u**2 / width**4 - 2.0 / width**2) * g
    p = [u**power / math.factorial(power)]
    p.append(u ** (power - 1) / math.factorial(power - 1) if power >= 1 else 0.0 * u)
    p.append(u ** (power - 2) / math.factorial(power - 2) if power >= 2 else 0.0 * u)
    if order == 0:
        return p[0] * g
    if order == 1:
        return p[1] * g + p[0] * g1
    return p[2] * g + 2 * p[1] * g1 + p[0] * g2


@dataclass(frozen=True)
class PolarPiece(Piece):
    """Star-shaped arc ``center + r(t) (cos theta, sin theta)``, ``theta = theta0 + t*dtheta``.

    ``r`` is affine in ``t`` plus Gaussian-windowed Taylor terms at each end,
    with coefficients solved so that ``(r, r_t, r_tt)`` equal ``jet_start`` at
    t=0 and ``jet_end`` at t=1 exactly.
    """

    center: tuple
    theta0: float
    dtheta: float
    jet_start: tuple
    jet_end: tuple
    width: float = 0.2

    def _basis(self, t, order):
        t = np.asarray(t, dtype=float)
        s = 1.0 - t
        sign = -1.0 if order == 1 else 1.0
        cols = [
            np.ones_like(t) if order == 0 else np.zeros_like(t),
            t if order == 0 else (np.ones_like(t) if order == 1 else np.zeros_like(t)),
            _bump(t, 1, self.width, order),
            _bump(t, 2, self.width, order),
            sign * _bump(s, 1, self.width, order),
            sign * _bump(s, 2, self.width, order),
        ]
        return np.stack(cols, axis=-1)

    @property
    def _coeffs(self):
        ends = np.array([0.0, 1.0])
        rows = np.concatenate([self._basis(ends, k) for k in range(3)])
        rhs = np.array([self.jet_start[0], self.jet_end[0], self.jet_start[1],
                        self.jet_end[1], self.jet_start[2], self.jet_end[2]])
        return np.linalg.solve(rows, rhs)

    def radius(self, t, order=0):
        return self._basis(t, order) @ self._coeffs

    def evaluate(self, t):
        t = np.asarray(t, dtype=float)
        c = self._coeffs
        r, r1, r2 = (self._basis(t, k) @ c for k in range(3))
        th = self.theta0 + self.dtheta * t
        w = self.dtheta
        er = np.stack([np.cos(th), np.sin(th)], axis=-1)
        et = np.stack([-np.sin(th), np.cos(th)], axis=-1)
        pos = np.asarray(self.center, float) + r[:, None] * er
        vel = r1[:, None] * er + (r * w)[:, None] * et
        acc = (r2 - r * w * w)[:, None] * er + (2 * r1 * w)[:, None] * et
        return pos, vel, acc


_GL_X, _GL_W = np.polynomial.legendre.leggauss(48)


@dataclass(frozen=True)
class TurningPiece(Piece):
    """Curve of length ``length`` given by its tangent angle.

    ``theta(t) = theta0 + turn*t + cp*t(1-t)**2 + cq*t**2(t-1)
    + sin(pi t)**2 * sum_j shape[j] cos(j pi t)`` and
    ``pos(t) = start + length * int_0^t exp(i theta)``. The cubic terms set the
    end curvatures; the ``shape`` modes leave the end jets untouched.
    """

    start: tuple
    length: float
    theta0: float
    turn: float
    cp: float
    cq: float
    shape: tuple = ()

    def angle(self, t, order=0):
        t = np.asarray(t, dtype=float)
        s2 = np.sin(np.pi * t) ** 2
        if order == 0:
            out = self.theta0 + self.turn * t + self.cp * t * (1 - t) ** 2 + self.cq * t**2 * (t - 1)
            for j, b in enumerate(self.shape):
                out = out + b * s2 * np.cos(j * np.pi * t)
            return out
        out = self.turn + self.cp * (1 - t) * (1 - 3 * t) + self.cq * t * (3 * t - 2)
        ds2 = np.pi * np.sin(2 * np.pi * t)
        for j, b in enumerate(self.shape):
            out = out + b * (ds2 * np.cos(j * np.pi * t) - s2 * j * np.pi * np.sin(j * np.pi * t))
        return out

    def evaluate(self, t):
        t = np.asarray(t, dtype=float)
        u = 0.5 * t[:, None] * (_GL_X[None, :] + 1.0)
        z = 0.5 * t * (np.exp(1j * self.angle(u)) @ _GL_W)
        pos = np.asarray(self.start, float) + self.length * np.stack([z.real, z.imag], axis=-1)
        e = np.exp(1j * self.angle(t))
        vel = self.length * np.stack([e.real, e.imag], axis=-1)
        w = self.angle(t, 1)
        acc = np.stack([-vel[:, 1] * w, vel[:, 0] * w], axis=-1)
        return pos, vel, acc


@dataclass(frozen=True)
class BoundaryCurve:
    """Closed, counterclockwise, piecewise analytic curve.

    ``corner_points`` lists indices ``i`` such that the junction at the start
    of piece ``i`` (end of piece ``i-1``) is non-smooth.
    """

    pieces: tuple
    corner_points: tuple = ()
    samples_per_piece: int = 1024
    closure_tol: float = 1e-10
    _area: float = field(default=0.0, compare=False, repr=False)

    def __post_init__(self):
        if not self.pieces:
            raise GeometryError("boundary needs at least one piece")
        for i, piece in enumerate(self.pieces):
            nxt = self.pieces[(i + 1) % len(self.pieces)]
            gap = np.linalg.norm(piece.point(1.0) - nxt.point(0.0))
            if gap > self.closure_tol:
                raise GeometryError(f"piece {i} does not meet piece {(i + 1) % len(self.pieces)} (gap {gap:.3e})")
        for c in self.corner_points:
            if not 0 <= c < len(self.pieces):
                raise GeometryError(f"corner index {c} out of range")
        pts = self.sample()
        ring = LinearRing(pts)
        if not ring.is_simple:
            raise GeometryError("boundary curve intersects itself")
        x, y = pts[:, 0], pts[:, 1]
        area = 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))
        if area <= 0:
            raise GeometryError("boundary curve must be counterclockwise (positive signed area)")
        object.__setattr__(self, "_area", area)

    @property
    def signed_area(self) -> float:
        return self._area

    @property
    def orientation(self) -> str:
        return "ccw"

    def sample(self, per_piece: int | None = None) -> np.ndarray:
        n = per_piece or self.samples_per_piece
        t = np.linspace(0.0, 1.0, n, endpoint=False)
        return np.concatenate([p.evaluate(t)[0] for p in self.pieces])

    def piece_lengths(self, n: int = 512) -> np.ndarray:
        # Gauss-Legendre is plenty for lengths of analytic pieces
        x, w = np.polynomial.legendre.leggauss(n)
        t = 0.5 * (x + 1.0)
        return np.array([0.5 * np.sum(w * np.linalg.norm(p.evaluate(t)[1], axis=1)) for p in self.pieces])

    def corner_locations(self) -> np.ndarray:
        return np.array([self.pieces[i].point(0.0) for i in self.corner_points]).reshape(-1, 2)

    def diameter(self) -> float:
        pts = self.sample(128)
        d = pts[:, None, :] - pts[None, :, :]
        return float(np.sqrt((d**2).sum(-1)).max())


def disk(radius: float = 1.0, center=(0.0, 0.0)) -> BoundaryCurve:
    """Circle as a single periodic piece (no corners)."""
    if radius <= 0:
        raise GeometryError("radius must be positive")
    return BoundaryCurve((ArcPiece(tuple(map(float, center)), float(radius), 0.0, 2 * math.pi),))


@dataclass(frozen=True)
class CircularCap:
    """Smooth closing cap from (1, f(1)) counterclockwise to (-1, f(-1)).

    By default the cap is a near-circular curve described by its tangent
    angle, solved so that it closes and meets the germ's graph with matching
    tangent and curvature; a circular arc is the special case of equal end
    curvatures and zero bulge. Giving ``center`` instead selects a
    star-shaped cap ``center + r(theta) (cos theta, sin theta)`` about that
    point, with the same second-order contact.
    """

    center: tuple | None = None


def _turning_cap(p, vp, ap, q, vq, aq, n_shape=3, size_weight=1.0):
    """Closing caps of least bending ``int theta'(t)**2 dt``, one per turn count.

    ``size_weight`` trades bending against ``(length / chord)**2``.
    """
    from scipy.optimize import minimize

    tp = math.atan2(vp[1], vp[0])
    tq = math.atan2(vq[1], vq[0])
    kp = (vp[0] * ap[1] - vp[1] * ap[0]) / np.linalg.norm(vp) ** 3
    kq = (vq[0] * aq[1] - vq[1] * aq[0]) / np.linalg.norm(vq) ** 3
    chord = float(np.linalg.norm(q - p))
    tgrid = np.linspace(0.0, 1.0, 129)
    caps = []
    for extra in (0.0, 2 * math.pi):
        turn = (tq - tp) % (2 * math.pi) + extra
        if turn <= 1e-9:
            continue

        def make(x, turn=turn):
            length = float(np.exp(x[0]))
            return TurningPiece(tuple(map(float, p)), length, tp, turn, length * kp - turn,
                                length * kq - turn, tuple(map(float, x[1:])))

        def bending(x):
            # scale-free bending plus a size penalty that keeps the cap compact
            return float(np.mean(make(x).angle(tgrid, 1) ** 2)) + size_weight * math.exp(2 * x[0]) / chord**2

        def gap(x):
            return (make(x).point(1.0) - q) / chord

        best = None
        for scale in (1.0, 2.0, 4.0):
            x0 = np.zeros(n_shape + 1)
            x0[0] = math.log(scale * chord * max(turn, 1.0))
            bounds = [(math.log(chord), math.log(50 * chord * max(turn, 1.0)))] + [(-20.0, 20.0)] * n_shape
            res = minimize(bending, x0, method="SLSQP", bounds=bounds, constraints={"type": "eq", "fun": gap},
                           options={"ftol": 1e-14, "maxiter": 500})
            if np.linalg.norm(gap(res.x)) < 1e-13 and (best is None or res.fun < best.fun):
                best = res
        if best is not None:
            caps.append((best.fun, make(best.x)))
    return [c for _, c in sorted(caps, key=lambda pair: pair[0])]


def _polar_jet(center, pos, vel, acc):
    """Polar angle, and radius with its first two derivatives in that angle."""
    d = pos - center
    rho = float(np.hypot(*d))
    if rho < 1e-12:
        raise GeometryError("cap center lies on the boundary")
    cross = lambda a, b: a[0] * b[1] - a[1] * b[0]  # noqa: E731
    rho1 = float(d @ vel) / rho
    rho2 = float(vel @ vel + d @ acc) / rho - float(d @ vel) ** 2 / rho**3
    phi1 = cross(d, vel) / rho**2
    phi2 = cross(d, acc) / rho**2 - 2 * cross(d, vel) * float(d @ vel) / rho**4
    if phi1 <= 0:
        raise GeometryError("boundary is not star-shaped about the cap center")
    theta = math.atan2(d[1], d[0])
    return theta, rho, rho1 / phi1, (rho2 * phi1 - rho1 * phi2) / phi1**3


def _germ_graph_pieces(germ) -> tuple:
    if isinstance(germ, CornerProfile):
        right = [float(c) for c in germ.arc_coefficients(1)]
        left = [float(c) for c in germ.arc_coefficients(2)]
    elif isinstance(germ, StrongCorner):
        right = [float(c) for c in germ.right]
        left = [float(c) for c in germ.left]
    else:
        raise GeometryError(f"cannot build a corner domain from {type(germ).__name__}")
    return GraphPiece(tuple(left), -1.0, 0.0), GraphPiece(tuple(right), 0.0, 1.0)


def _cap_for_center(left, right, center):
    """Polar cap closing the germ about ``center``, or ``GeometryError``."""
    t = np.linspace(0.0, 1.0, 257)
    for piece in (left, right):
        pos, vel, _ = piece.evaluate(t)
        d = pos - center
        if np.min(np.hypot(d[:, 0], d[:, 1])) < 1e-12:
            raise GeometryError("cap center lies on the germ")
        if np.any(d[:, 0] * vel[:, 1] - d[:, 1] * vel[:, 0] <= 0):
            raise GeometryError("germ graph is not star-shaped about the cap center")

    jp = _polar_jet(center, *(a[0] for a in right.evaluate(np.array([1.0]))))
    jq = _polar_jet(center, *(a[0] for a in left.evaluate(np.array([0.0]))))
    dtheta = (jq[0] - jp[0]) % (2 * math.pi)
    if dtheta < 1e-9:
        raise GeometryError("cap endpoints coincide in angle")
    piece = PolarPiece(
        tuple(float(x) for x in center),
        jp[0],
        dtheta,
        (jp[1], jp[2] * dtheta, jp[3] * dtheta**2),
        (jq[1], jq[2] * dtheta, jq[3] * dtheta**2),
    )
    if np.min(piece.radius(np.linspace(0, 1, 1025))) <= 0:
        raise GeometryError("cap radius function changes sign")
    return piece


def build_corner_domain(germ, cap: CircularCap | None = None) -> BoundaryCurve:
    """Close the germ's graph over x1 in [-1, 1] with a smooth cap.

    The enclosed region lies to the left of the graph traversed from
    x1 = -1 to x1 = 1. Pieces are (left graph, right graph, cap) and the only
    marked corner is O, at the start of piece 1. Without an explicit center
    the least-bent closing cap that keeps the curve simple is used.
    """
    cap = cap or CircularCap()
    left, right = _germ_graph_pieces(germ)
    if cap.center is not None:
        piece = _cap_for_center(left, right, np.asarray(cap.center, float))
        return BoundaryCurve((left, right, piece), corner_points=(1,))
    p, vp, ap = (a[0] for a in right.evaluate(np.array([1.0])))
    q, vq, aq = (a[0] for a in left.evaluate(np.array([0.0])))
    # a weaker size penalty gives rounder caps when the compact one self-intersects
    for size_weight in (1.0, 0.1, 0.01):
        for piece in _turning_cap(p, vp, ap, q, vq, aq, size_weight=size_weight):
            try:
                return BoundaryCurve((left, right, piece), corner_points=(1,))
            except GeometryError:
                continue
    raise GeometryError("no smooth closing cap meets the germ without self-intersection")


def germ_from_json(data):
    """Inverse of the ``to_json`` methods of the exact germ types."""
    kind = data.get("kind")
    if kind == "weak":
        return make_weak_profile(data["c1"], int(data["alpha1"]), data["c2"], int(data["alpha2"]))
    if kind == "strong":
        return make_strong_corner(list(data["right"]), list(data["left"]))
    if kind == "arc":
        return make_analytic_arc(list(data["poly"]))
    raise InvalidProfile(f"unknown germ kind {kind!r}")
