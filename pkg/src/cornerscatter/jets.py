"""Exact truncated Taylor jets and the linear constraints they satisfy.

A jet of ``u`` at the corner O is the coefficient array ``a[n, m]`` of
``u = sum a[n, m] x1**n x2**m``. Unknowns are keyed ``(grid, n, m)`` where
``grid`` is ``"a"`` for the difference ``u = u1 - u2`` and ``"a2"`` for
``u2``. Every constraint is a homogeneous linear relation between such keys
with Gaussian-rational coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

from gmpy2 import mpq

from .exact import ZERO, GaussianRational, gq, parse_rational
from .geometry import CornerProfile

A = "a"
A2 = "a2"


def _key_to_json(key):
    return [key[0], key[1], key[2]]


def _tag_to_json(tag):
    return [t if not isinstance(t, tuple) else list(t) for t in tag]


def _tag_from_json(data):
    return tuple(tuple(t) if isinstance(t, list) else t for t in data)


@dataclass
class LinearConstraint:
    """``sum coef * unknown = rhs`` with distinct unknown keys.

    ``tag`` records which relation generated the row, e.g.
    ``("dirichlet", 1, 4)`` for the Dirichlet matching on side 1 at ``x1**4``.
    """

    terms: list
    rhs: GaussianRational = ZERO
    tag: tuple = ()

    @classmethod
    def build(cls, pairs, tag, rhs=ZERO) -> "LinearConstraint":
        """Merge repeated keys and drop zero coefficients, keeping first-seen order."""
        merged: dict = {}
        for key, coef in pairs:
            merged[key] = merged.get(key, ZERO) + gq(coef)
        terms = [(k, v) for k, v in merged.items() if v]
        return cls(terms, gq(rhs), tuple(tag))

    def keys(self) -> list:
        return [k for k, _ in self.terms]

    def coefficient(self, key) -> GaussianRational:
        for k, v in self.terms:
            if k == key:
                return v
        return ZERO

    def is_trivial(self) -> bool:
        return not self.terms and not self.rhs

    def evaluate(self, values) -> GaussianRational:
        """Residual ``sum coef * values[key] - rhs``; missing keys raise ``KeyError``."""
        acc = ZERO
        for k, v in self.terms:
            acc = acc + v * values[k]
        return acc - self.rhs

    def substitute_zero(self, zero_keys) -> "LinearConstraint":
        """Drop every term whose unknown is known to vanish."""
        return LinearConstraint([(k, v) for k, v in self.terms if k not in zero_keys], self.rhs, self.tag)

    def to_json(self) -> dict:
        return {
            "tag": _tag_to_json(self.tag),
            "terms": [[_key_to_json(k), v.to_json()] for k, v in self.terms],
            "rhs": self.rhs.to_json(),
        }

    @classmethod
    def from_json(cls, data) -> "LinearConstraint":
        terms = [((k[0], int(k[1]), int(k[2])), GaussianRational.from_json(v)) for k, v in data["terms"]]
        return cls(terms, GaussianRational.from_json(data["rhs"]), _tag_from_json(data["tag"]))


@dataclass
class CoeffGrid:
    """Truncated Taylor coefficients ``a[n, m]`` with ``n + m <= order``.

    Absent entries are *unassigned*, which is different from an assigned
    zero; :meth:`residual` refuses to evaluate constraints that touch
    unassigned entries.
    """

    order: int
    entries: dict = field(default_factory=dict)
    name: str = A

    def _check(self, n, m):
        if n < 0 or m < 0 or n + m > self.order:
            raise IndexError(f"({n}, {m}) lies outside the triangle n + m <= {self.order}")

    def __setitem__(self, index, value):
        n, m = index
        self._check(n, m)
        self.entries[(n, m)] = gq(value)

    def __getitem__(self, index) -> GaussianRational:
        n, m = index
        self._check(n, m)
        if (n, m) not in self.entries:
            raise KeyError(f"{self.name}[{n}, {m}] is unassigned")
        return self.entries[(n, m)]

    def is_assigned(self, n, m) -> bool:
        return (n, m) in self.entries

    def indices(self):
        return [(n, j - n) for j in range(self.order + 1) for n in range(j, -1, -1)]

    def fill(self, value=ZERO) -> "CoeffGrid":
        for n, m in self.indices():
            self.entries.setdefault((n, m), gq(value))
        return self

    def as_values(self) -> dict:
        return {(self.name, n, m): v for (n, m), v in self.entries.items()}

    def residual(self, constraint: LinearConstraint, *others: "CoeffGrid") -> GaussianRational:
        values = self.as_values()
        for g in others:
            values.update(g.as_values())
        return constraint.evaluate(values)

    def is_zero(self) -> bool:
        return all(not v for v in self.entries.values())

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "order": self.order,
            "entries": [[n, m, self.entries[(n, m)].to_json()] for n, m in self.indices() if (n, m) in self.entries],
        }

    @classmethod
    def from_json(cls, data) -> "CoeffGrid":
        grid = cls(int(data["order"]), name=data.get("name", A))
        for n, m, v in data["entries"]:
            grid[int(n), int(m)] = GaussianRational.from_json(v)
        return grid


def triangle(order: int, grid: str = A) -> list:
    """Unknown keys of a grid up to total order ``order``, graded by total order."""
    return [(grid, n, j - n) for j in range(order + 1) for n in range(j, -1, -1)]


# ---------------------------------------------------------------------------
# interior relations
# ---------------------------------------------------------------------------


def _laplacian_terms(n, m, grid):
    return [
        ((grid, n + 2, m), (n + 1) * (n + 2)),
        ((grid, n, m + 2), (m + 1) * (m + 2)),
    ]


def helmholtz_constraint(q, n: int, m: int, grid: str = A) -> LinearConstraint:
    """Coefficient of ``x1**n x2**m`` in ``Delta u + q u = 0``."""
    if n < 0 or m < 0:
        raise ValueError("indices must be non-negative")
    q = gq(q)
    return LinearConstraint.build(_laplacian_terms(n, m, grid) + [((grid, n, m), q)], ("helmholtz", grid, n, m))


def difference_source_constraint(q1, q2, n: int, m: int) -> LinearConstraint:
    """Coefficient of ``x1**n x2**m`` in ``Delta u + q1 u = (q2 - q1) u2``.

    ``u = u1 - u2`` where ``Delta u_j + q_j u_j = 0``. The ``u2`` term moves to
    the left so the row is homogeneous in the joint unknowns.
    """
    if n < 0 or m < 0:
        raise ValueError("indices must be non-negative")
    q1, q2 = gq(q1), gq(q2)
    pairs = _laplacian_terms(n, m, A) + [((A, n, m), q1), ((A2, n, m), -(q2 - q1))]
    return LinearConstraint.build(pairs, ("difference", n, m))


def fourth_order_constraint(q1, q2, n: int, m: int) -> LinearConstraint:
    """Coefficient of ``x1**n x2**m`` in ``(Delta + q2)(Delta + q1) u = 0``."""
    if n < 0 or m < 0:
        raise ValueError("indices must be non-negative")
    q1, q2 = gq(q1), gq(q2)
    s = q1 + q2
    pairs = [
        ((A, n, m + 4), (m + 4) * (m + 3) * (m + 2) * (m + 1)),
        ((A, n + 4, m), (n + 4) * (n + 3) * (n + 2) * (n + 1)),
        ((A, n + 2, m + 2), 2 * (n + 2) * (n + 1) * (m + 2) * (m + 1)),
        ((A, n + 2, m), s * ((n + 2) * (n + 1))),
        ((A, n, m + 2), s * ((m + 2) * (m + 1))),
        ((A, n, m), q1 * q2),
    ]
    return LinearConstraint.build(pairs, ("fourth", n, m))


# ---------------------------------------------------------------------------
# boundary matching on a weakly singular germ
# ---------------------------------------------------------------------------


def dirichlet_constraint(profile: CornerProfile, side: int, l: int) -> LinearConstraint:
    """Coefficient of ``x1**l`` in ``u(x1, c x1**alpha) = 0`` on ``side``."""
    if l < 0:
        raise ValueError("power must be non-negative")
    c, alpha = profile.side(side)
    pairs = [((A, l - alpha * m, m), c**m) for m in range(l // alpha + 1)]
    return LinearConstraint.build(pairs, ("dirichlet", side, l))


def neumann_constraint(profile: CornerProfile, side: int, l: int) -> LinearConstraint:
    """Coefficient of ``x1**l`` in ``alpha c x1**(alpha-1) u_x1 - u_x2 = 0`` on ``side``.

    The first sum (from ``u_x1``) only reaches powers ``l >= alpha - 1``.
    """
    if l < 0:
        raise ValueError("power must be non-negative")
    c, alpha = profile.side(side)
    pairs = []
    if l >= alpha - 1:
        total = l - alpha + 2
        for m in range(total // alpha + 1):
            n = total - alpha * m
            if n >= 1:
                pairs.append(((A, n, m), alpha * n * c ** (m + 1)))
    total = l + alpha
    for m in range(1, total // alpha + 1):
        n = total - alpha * m
        pairs.append(((A, n, m), -m * c ** (m - 1)))
    return LinearConstraint.build(pairs, ("neumann", side, l))


# ---------------------------------------------------------------------------
# boundary matching on a general polynomial arc x2 = g(x1)
# ---------------------------------------------------------------------------


def _series_mul(p, q, order):
    out = [mpq(0)] * (order + 1)
    for i, a in enumerate(p[: order + 1]):
        if a:
            for j, b in enumerate(q[: order + 1 - i]):
                if b:
                    out[i + j] += a * b
    return out


def _powers(g, count, order):
    """``[g**0, ..., g**count]`` as power series truncated after ``x**order``."""
    g = [parse_rational(c) for c in g][: order + 1]
    g = g + [mpq(0)] * (order + 1 - len(g))
    out = [[mpq(1)] + [mpq(0)] * order]
    for _ in range(count):
        out.append(_series_mul(out[-1], g, order))
    return out


def arc_dirichlet_rows(g, order: int, arc: int = 1, grid: str = A) -> list:
    """Rows ``[x1**l] u(x1, g(x1)) = 0`` for ``l = 0..order``.

    Only unknowns with ``n + m <= order`` reach these powers when ``g(0) = 0``,
    so the rows are exact for a jet truncated at total order ``order``.
    """
    pw = _powers(g, order, order)
    rows = []
    for l in range(order + 1):
        pairs = []
        for j in range(l + 1):
            for n in range(j, -1, -1):
                m = j - n
                coef = pw[m][l - n]
                if coef:
                    pairs.append(((grid, n, m), coef))
        rows.append(LinearConstraint.build(pairs, ("arc_dirichlet", arc, l)))
    return rows


def arc_neumann_rows(g, order: int, arc: int = 1, grid: str = A) -> list:
    """Rows ``[x1**l] (g' u_x1 - u_x2)(x1, g(x1)) = 0`` for ``l = 0..order-1``."""
    pw = _powers(g, order + 1, order)
    # (g**(m+1))' / (m+1) = g' g**m
    dgm = [[(i + 1) * pw[m + 1][i + 1] / (m + 1) for i in range(order)] + [mpq(0)] for m in range(order + 1)]
    rows = []
    for l in range(order):
        pairs = []
        for j in range(l + 2):
            for n in range(j, -1, -1):
                m = j - n
                if n >= 1 and l - n + 1 >= 0:
                    coef = n * dgm[m][l - n + 1]
                    if coef:
                        pairs.append(((grid, n, m), coef))
                if m >= 1 and l - n >= 0:
                    coef = m * pw[m - 1][l - n]
                    if coef:
                        pairs.append(((grid, n, m), -coef))
        rows.append(LinearConstraint.build(pairs, ("arc_neumann", arc, l)))
    return rows


def plane_wave_grid(mu, order: int) -> CoeffGrid:
    """Jet of ``exp(mu x1)``: ``a[n, 0] = mu**n / n!``, zero elsewhere."""
    mu = gq(mu)
    grid = CoeffGrid(order)
    fact = 1
    for n in range(order + 1):
        if n:
            fact *= n
        grid[n, 0] = mu**n / fact
    return grid.fill()


def binomial_grid(a, b, power: int, order: int) -> CoeffGrid:
    """Jet of the polynomial ``(a x1 + b x2)**power``."""
    grid = CoeffGrid(order)
    a, b = gq(a), gq(b)
    if power <= order:
        for m in range(power + 1):
            grid[power - m, m] = comb(power, m) * a ** (power - m) * b**m
    return grid.fill()


__all__ = [
    "A",
    "A2",
    "CoeffGrid",
    "LinearConstraint",
    "arc_dirichlet_rows",
    "arc_neumann_rows",
    "binomial_grid",
    "difference_source_constraint",
    "dirichlet_constraint",
    "fourth_order_constraint",
    "helmholtz_constraint",
    "neumann_constraint",
    "plane_wave_grid",
    "triangle",
]
