"""Finite-order certification that Cauchy data vanishing near a corner forces
the whole jet of the difference ``u = u1 - u2`` (and of ``u2``) to vanish.

Two independent routes are provided:

* the explicit induction schedules (:func:`weak_corner_induction`,
  :func:`strong_corner_induction`), which force coefficients level by level
  through small exact systems, each recorded as a :class:`Step`;
* the brute-force oracle :func:`jet_nullspace`, which assembles every
  available relation at once and reads off the forced coefficients from an
  exact reduced row echelon form.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum

from .errors import DegenerateTangents, PreconditionViolated
from .exact import ZERO, GaussianRational, gq, parse_rational
from .geometry import AnalyticArc, CornerProfile, StrongCorner, germ_from_json
from .jets import (
    A,
    A2,
    CoeffGrid,
    LinearConstraint,
    arc_dirichlet_rows,
    arc_neumann_rows,
    difference_source_constraint,
    dirichlet_constraint,
    fourth_order_constraint,
    helmholtz_constraint,
    neumann_constraint,
    triangle,
)
from .linalg import apply_constraints, determinant, rref

# ---------------------------------------------------------------------------
# symbols of constant-coefficient operators
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OperatorSymbol:
    """Homogeneous polynomial ``sum coeffs[i] xi1**(d-i) xi2**i`` of degree ``d``."""

    coeffs: tuple

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def linear(cls, direction) -> "OperatorSymbol":
        """Symbol of the directional derivative along ``direction``."""
        return cls((gq(direction[0]), gq(direction[1])))

    @classmethod
    def one(cls) -> "OperatorSymbol":
        return cls((gq(1),))

    @classmethod
    def laplacian(cls) -> "OperatorSymbol":
        return cls((gq(1), gq(0), gq(1)))

    def __mul__(self, other: "OperatorSymbol") -> "OperatorSymbol":
        out = [ZERO] * (self.degree + other.degree + 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] = out[i + j] + a * b
        return OperatorSymbol(tuple(out))

    def __pow__(self, k: int) -> "OperatorSymbol":
        out = OperatorSymbol.one()
        for _ in range(k):
            out = out * self
        return out


def operator_span_check(m: int, tau1, tau2) -> bool:
    """Whether the order-(m+1) operators available at the corner span all of them.

    The candidates are ``d1**(m+1)``, ``d1**m d2``, ``d1 d2**m``, ``d2**(m+1)``
    and ``d1**i d2**(m-3-i) Delta**2`` for ``i = 0..m-3``, where ``dj`` is the
    derivative along ``tau_j``. They span the ``m + 2``-dimensional space of
    order-(m+1) homogeneous operators iff their symbol matrix has full rank.
    Tangents need not be normalized: scaling leaves the span unchanged.
    """
    if m < 4:
        raise ValueError(f"span check needs m >= 4, got {m}")
    t1 = tuple(parse_rational(x) for x in tau1)
    t2 = tuple(parse_rational(x) for x in tau2)
    if t1[0] * t2[1] - t1[1] * t2[0] == 0:
        raise DegenerateTangents(f"tangents {tau1} and {tau2} are parallel")
    rows = [{c: v for c, v in enumerate(s) if v} for s in span_symbols(m, t1, t2)]
    return rref(rows, m + 2).rank == m + 2


def span_symbols(m: int, tau1, tau2) -> list:
    """Coefficient rows of the candidate symbols used by :func:`operator_span_check`."""
    d1, d2 = OperatorSymbol.linear(tau1), OperatorSymbol.linear(tau2)
    bilap = OperatorSymbol.laplacian() ** 2
    symbols = [d1 ** (m + 1), d1**m * d2, d1 * d2**m, d2 ** (m + 1)]
    symbols += [d1**i * d2 ** (m - 3 - i) * bilap for i in range(m - 2)]
    return [list(s.coeffs) for s in symbols]


def vandermonde4(c1, c2) -> GaussianRational:
    """Determinant of the confluent Vandermonde system of the fourth step."""
    c1, c2 = gq(c1), gq(c2)
    return determinant(
        [
            [1, c1, c1**2, c1**3],
            [1, c2, c2**2, c2**3],
            [0, 1, 2 * c1, 3 * c1**2],
            [0, 1, 2 * c2, 3 * c2**2],
        ]
    )


# ---------------------------------------------------------------------------
# certificates
# ---------------------------------------------------------------------------


class Conclusion(str, Enum):
    ALL_VANISH = "AllVanish"
    INCONCLUSIVE = "Inconclusive"
    COUNTEREXAMPLE = "Counterexample"


FORCED = "forced"
SINGULAR = "singular"
EXTRANEOUS = "extraneous"
SPAN_OK = "span"
SPAN_FAILED = "span-failed"


def _key_json(k):
    return [k[0], k[1], k[2]]


def _key_from(k):
    return (k[0], int(k[1]), int(k[2]))


def _tag_json(tag):
    return list(tag)


@dataclass
class Step:
    """One exact system solved by a schedule.

    ``matrix`` holds the rows after substituting previously forced zeros,
    with one column per target. Span steps store the candidate symbols
    instead, and the oracle step stores its full system over every unknown
    of the joint jet. Matrices are only serialized in audit mode.
    """

    label: str
    level: int
    tags: list
    targets: list
    rank: int
    verdict: str
    forced: list
    matrix: list | None = None

    def to_json(self, audit: bool) -> dict:
        out = {
            "label": self.label,
            "level": self.level,
            "tags": [_tag_json(t) for t in self.tags],
            "targets": [_key_json(k) for k in self.targets],
            "rank": self.rank,
            "verdict": self.verdict,
            "forced": [_key_json(k) for k in self.forced],
        }
        if audit and self.matrix is not None:
            out["matrix"] = [[v.to_json() for v in row] for row in self.matrix]
        return out

    @classmethod
    def from_json(cls, data) -> "Step":
        matrix = None
        if "matrix" in data:
            matrix = [[GaussianRational.from_json(v) for v in row] for row in data["matrix"]]
        return cls(
            label=data["label"],
            level=int(data["level"]),
            tags=[tuple(t) for t in data["tags"]],
            targets=[_key_from(k) for k in data["targets"]],
            rank=int(data["rank"]),
            verdict=data["verdict"],
            forced=[_key_from(k) for k in data["forced"]],
            matrix=matrix,
        )


@dataclass
class VanishingCertificate:
    """Ordered record of the exact systems behind a vanishing verdict.

    ``claim`` lists every coefficient the certificate asserts to vanish;
    ``AllVanish`` is only concluded when each of them is forced by a step.
    """

    kind: str
    germ: object
    q1: GaussianRational
    q2: GaussianRational
    order: int
    weight: int
    claim: list
    steps: list
    conclusion: Conclusion
    notes: list = field(default_factory=list)
    counterexample: dict | None = None
    audit: bool = False

    @property
    def forced(self) -> set:
        return {k for s in self.steps for k in s.forced}

    def restrict(self, order: int) -> "VanishingCertificate":
        """The certificate for a smaller order, obtained by dropping later steps."""
        if order > self.order:
            raise ValueError("can only restrict to a smaller order")
        steps = [s for s in self.steps if s.level <= order]
        claim = [k for k in self.claim if _claim_level(self.kind, k, self.weight) <= order]
        return _finish(self.kind, self.germ, self.q1, self.q2, order, self.weight, claim, steps, list(self.notes), self.audit)

    def to_json(self, audit: bool | None = None) -> dict:
        audit = self.audit if audit is None else audit
        out = {
            "kind": self.kind,
            "germ": self.germ.to_json(),
            "q1": self.q1.to_json(),
            "q2": self.q2.to_json(),
            "order": self.order,
            "weight": self.weight,
            "claim": [_key_json(k) for k in self.claim],
            "steps": [s.to_json(audit) for s in self.steps],
            "conclusion": self.conclusion.value,
            "notes": list(self.notes),
            "audit": audit,
        }
        if self.counterexample is not None:
            out["counterexample"] = {name: grid.to_json() for name, grid in sorted(self.counterexample.items())}
        return out

    def dumps(self, audit: bool | None = None) -> str:
        return json.dumps(self.to_json(audit), indent=1, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, data) -> "VanishingCertificate":
        cex = data.get("counterexample")
        return cls(
            kind=data["kind"],
            germ=germ_from_json(data["germ"]),
            q1=GaussianRational.from_json(data["q1"]),
            q2=GaussianRational.from_json(data["q2"]),
            order=int(data["order"]),
            weight=int(data["weight"]),
            claim=[_key_from(k) for k in data["claim"]],
            steps=[Step.from_json(s) for s in data["steps"]],
            conclusion=Conclusion(data["conclusion"]),
            notes=list(data.get("notes", [])),
            counterexample=None if cex is None else {k: CoeffGrid.from_json(v) for k, v in cex.items()},
            audit=bool(data.get("audit", False)),
        )

    @classmethod
    def loads(cls, text: str) -> "VanishingCertificate":
        return cls.from_json(json.loads(text))


def _claim_level(kind, key, weight):
    grid, n, m = key
    if kind == "weak":
        return n + weight * (m + 2) if grid == A2 else n + weight * m
    return n + m + 2 if grid == A2 else n + m


def _finish(kind, germ, q1, q2, order, weight, claim, steps, notes, audit):
    forced = {k for s in steps for k in s.forced}
    ok = all(s.verdict in (FORCED, SPAN_OK) for s in steps) and set(claim) <= forced
    return VanishingCertificate(
        kind=kind,
        germ=germ,
        q1=q1,
        q2=q2,
        order=order,
        weight=weight,
        claim=claim,
        steps=steps,
        conclusion=Conclusion.ALL_VANISH if ok else Conclusion.INCONCLUSIVE,
        notes=notes,
        audit=audit,
    )


class _Schedule:
    """Runs steps, keeping track of coefficients already forced to vanish."""

    def __init__(self):
        self.forced: set = set()
        self.steps: list = []

    def step(self, label, level, constraints, targets) -> bool:
        targets = list(targets)
        rows = [c.substitute_zero(self.forced) for c in constraints]
        tags = [c.tag for c in constraints]
        target_set = set(targets)
        stray = {k for r in rows for k in r.keys()} - target_set
        if stray:
            self.steps.append(Step(label, level, tags, targets, 0, EXTRANEOUS, []))
            return False
        system = apply_constraints(targets, rows)
        matrix = [[r.coefficient(k) for k in targets] for r in rows]
        if system.rank == len(targets):
            self.forced |= target_set
            self.steps.append(Step(label, level, tags, targets, system.rank, FORCED, targets, matrix))
            return True
        self.steps.append(Step(label, level, tags, targets, system.rank, SINGULAR, [], matrix))
        return False

    def span(self, label, level, m, tau1, tau2) -> bool:
        ok = operator_span_check(m, tau1, tau2)
        matrix = span_symbols(m, tuple(map(parse_rational, tau1)), tuple(map(parse_rational, tau2)))
        self.steps.append(Step(label, level, [("span", m)], [], m + 2 if ok else 0,
                               SPAN_OK if ok else SPAN_FAILED, [], matrix))
        return ok


def _check_potentials(q1, q2):
    q1, q2 = gq(q1), gq(q2)
    if q1 == q2:
        raise PreconditionViolated("the potentials must differ (q1 != q2)")
    return q1, q2


# ---------------------------------------------------------------------------
# weakly singular corners
# ---------------------------------------------------------------------------


def weak_corner_induction(profile: CornerProfile, q1, q2, N: int = 24) -> VanishingCertificate:
    """Force every ``a[n, m]`` with ``n + beta m <= N`` level by level.

    Coefficients are graded by the weighted level ``n + w m`` with ``w`` the
    smaller exponent among the sides with nonzero curvature coefficient. When
    both exponents agree (or one side is flat) each level is settled by the
    Dirichlet and Neumann matchings on both sides, a confluent Vandermonde
    system handling the four lowest powers of ``x2``; otherwise the flatter
    side only contributes its lowest-order coefficients and the sharper side
    does the rest. From level ``4 w`` on, the fourth-order relation first
    removes every coefficient with ``m >= 4``. After each level the
    difference relation forces the matching ``u2`` coefficients.
    """
    q1, q2 = _check_potentials(q1, q2)
    if not isinstance(profile, CornerProfile):
        raise TypeError("weak_corner_induction needs a CornerProfile")
    w = profile.beta
    if N < 4 * w:
        raise ValueError(f"order N={N} must be at least 4*beta={4 * w}")

    c1, a1 = profile.side(1)
    c2, a2 = profile.side(2)
    # lo: the side that fixes the weight; hi: the other one
    if c1 != 0 and c2 != 0:
        lo, hi = (1, 2) if a1 <= a2 else (2, 1)
        equal = a1 == a2
    else:
        lo, hi = (1, 2) if c1 != 0 else (2, 1)
        equal = True
    notes = [f"weight {w}; {'equal-exponent' if equal else 'unequal-exponent'} route; primary side {lo}"]

    run = _Schedule()
    D = lambda side, l: dirichlet_constraint(profile, side, l)  # noqa: E731
    Nm = lambda side, l: neumann_constraint(profile, side, l)  # noqa: E731

    def level_keys(L, m_range):
        return [(A, L - w * m, m) for m in m_range if L - w * m >= 0]

    def fourth_step(L):
        ms = range(4, L // w + 1)
        rows = [fourth_order_constraint(q1, q2, L - w * m, m - 4) for m in ms]
        return run.step(f"level {L}: fourth-order relation, m >= 4", L, rows, level_keys(L, ms))

    for L in range(N + 1):
        top = L // w
        if equal:
            if L < w:
                run.step(f"level {L}: Dirichlet", L, [D(lo, L)], level_keys(L, [0]))
            elif L < 2 * w:
                run.step(f"level {L}: Dirichlet on both sides", L, [D(lo, L), D(hi, L)], level_keys(L, range(2)))
            else:
                if L >= 4 * w:
                    fourth_step(L)
                rows = [D(lo, L), D(hi, L), Nm(lo, L - w), Nm(hi, L - w)]
                label = "confluent Vandermonde system" if L >= 3 * w else "Dirichlet and Neumann on both sides"
                run.step(f"level {L}: {label}", L, rows, level_keys(L, range(min(top, 3) + 1)))
        else:
            run.step(f"level {L}: Dirichlet on side {hi}", L, [D(hi, L)], level_keys(L, [0]))
            if w <= L < 2 * w:
                run.step(f"level {L}: Dirichlet on side {lo}", L, [D(lo, L)], level_keys(L, [1]))
            elif 2 * w <= L < 3 * w:
                run.step(f"level {L}: Dirichlet and Neumann on side {lo}", L, [D(lo, L), Nm(lo, L - w)], level_keys(L, [1, 2]))
            elif L >= 3 * w:
                if L >= 4 * w:
                    fourth_step(L)
                run.step(f"level {L}: Neumann on side {hi}", L, [Nm(hi, L - w)], level_keys(L, [1]))
                run.step(f"level {L}: Dirichlet and Neumann on side {lo}", L, [D(lo, L), Nm(lo, L - w)], level_keys(L, [2, 3]))
        # u2 coefficients whose difference relation only involves settled levels
        u2 = [(A2, L - w * (m + 2), m) for m in range(L // w - 1) if L - w * (m + 2) >= 0]
        if u2:
            rows = [difference_source_constraint(q1, q2, n, m) for _, n, m in u2]
            run.step(f"level {L}: u2 from the difference relation", L, rows, u2)

    claim = [(A, n, m) for _, n, m in triangle(N) if n + w * m <= N]
    claim += [(A2, n, m) for _, n, m in triangle(N) if n + w * (m + 2) <= N]
    return _finish("weak", profile, q1, q2, N, w, claim, run.steps, notes, False)


# ---------------------------------------------------------------------------
# strongly singular corners
# ---------------------------------------------------------------------------


def strong_corner_induction(corner: StrongCorner, q1, q2, M: int = 12) -> VanishingCertificate:
    """Force every ``a[n, m]`` with ``n + m <= M`` one total order at a time.

    Order ``j`` uses the order-``j`` Dirichlet matching and the order-``j-1``
    Neumann matching along both arcs together with the fourth-order relation
    at every ``(n, m)`` with ``n + m = j - 4``. For ``j >= 5`` the step is
    accompanied by the span check for those operators.
    """
    q1, q2 = _check_potentials(q1, q2)
    if not isinstance(corner, StrongCorner):
        raise TypeError("strong_corner_induction needs a StrongCorner")
    if M < 4:
        raise ValueError(f"order M={M} must be at least 4")
    arcs = corner.arcs()
    dir_rows = [arc_dirichlet_rows(g, M, arc=i + 1) for i, g in enumerate(arcs)]
    neu_rows = [arc_neumann_rows(g, M, arc=i + 1) for i, g in enumerate(arcs)]
    tau1, tau2 = corner.tangents()

    run = _Schedule()
    for j in range(M + 1):
        rows = [d[j] for d in dir_rows]
        if j >= 1:
            rows += [nr[j - 1] for nr in neu_rows]
        rows += [fourth_order_constraint(q1, q2, n, j - 4 - n) for n in range(j - 3)]
        if j >= 5:
            run.span(f"order {j}: operator span", j, j - 1, tau1, tau2)
        run.step(f"order {j}: Cauchy data and fourth-order relation", j, rows, [(A, n, j - n) for n in range(j, -1, -1)])
        if j >= 2:
            u2 = [(A2, n, j - 2 - n) for n in range(j - 2, -1, -1)]
            diffs = [difference_source_constraint(q1, q2, n, m) for _, n, m in u2]
            run.step(f"order {j}: u2 from the difference relation", j, diffs, u2)

    claim = triangle(M) + triangle(M - 2, A2)
    return _finish("strong", corner, q1, q2, M, 1, claim, run.steps, [], False)


# ---------------------------------------------------------------------------
# brute-force oracle
# ---------------------------------------------------------------------------


@dataclass
class NullspaceReport:
    """Exact solution space of every truncated relation at total order ``order``."""

    order: int
    unknowns: list
    dimension: int
    forced: set
    basis: list
    matrix: list = field(default_factory=list, repr=False)  # sparse rows {column: value}

    def free(self) -> list:
        """Unknowns not forced to vanish, in grading order (typically near the truncation edge)."""
        return [k for k in self.unknowns if k not in self.forced]

    def forces(self, keys) -> bool:
        return set(keys) <= self.forced

    def interior_forced(self, depth: int = 2) -> bool:
        """Whether every coefficient at least ``depth`` below the truncation is forced."""
        return all(k in self.forced for k in self.unknowns if k[1] + k[2] <= self.order - depth)

    def counterexample(self, keys=None) -> dict | None:
        """A nonzero solution, as coefficient grids, or ``None`` if only zero remains.

        With ``keys`` the solution is chosen to be nonzero on one of them.
        """
        wanted = None if keys is None else set(keys)
        vec = next((v for v in self.basis if wanted is None or wanted & set(v)), None)
        if vec is None:
            return None
        grids = {A: CoeffGrid(self.order, name=A), A2: CoeffGrid(self.order, name=A2)}
        for grid, n, m in self.unknowns:
            grids[grid][n, m] = vec.get((grid, n, m), ZERO)
        return grids


def oracle_constraints(germ, q1, q2, M: int) -> list:
    q1, q2 = gq(q1), gq(q2)
    rows = []
    for _, n, m in triangle(M - 2):
        rows.append(helmholtz_constraint(q2, n, m, grid=A2))
        rows.append(difference_source_constraint(q1, q2, n, m))
    for i, g in enumerate(germ.arcs()):
        rows += arc_dirichlet_rows(g, M, arc=i + 1)
        rows += arc_neumann_rows(g, M, arc=i + 1)
    return rows


def jet_nullspace(germ, q1, q2, M: int, basis: bool = False) -> NullspaceReport:
    """Exact nullspace of all relations on the joint jets of ``u`` and ``u2``.

    ``germ`` is a :class:`CornerProfile`, :class:`StrongCorner` or
    :class:`AnalyticArc`. Cauchy data vanish along each of its arcs. The
    basis is only assembled on request since it can be large.
    """
    if M < 4:
        raise ValueError("oracle order must be at least 4")
    if not isinstance(germ, (CornerProfile, StrongCorner, AnalyticArc)):
        raise TypeError(f"unsupported germ {type(germ).__name__}")
    unknowns = triangle(M) + triangle(M, A2)
    system = apply_constraints(unknowns, oracle_constraints(germ, q1, q2, M))
    return NullspaceReport(
        order=M,
        unknowns=unknowns,
        dimension=system.nullity,
        forced=system.forced_zero(),
        basis=system.nullspace() if basis else [],
        matrix=system.matrix,
    )


def oracle_order(cert: VanishingCertificate) -> int:
    # every relation a schedule uses lives among the oracle rows at this order
    return cert.order


def agrees_with_oracle(cert: VanishingCertificate, report: NullspaceReport) -> bool:
    """Whether schedule and oracle force exactly the same coefficients of the claim."""
    claim = set(cert.claim)
    return (report.forced & claim) == (cert.forced & claim)


def oracle_certificate(germ, q1, q2, M: int) -> VanishingCertificate:
    """Certificate made of the single oracle system.

    The claim is the one the matching schedule makes: weighted levels up to
    ``M`` for a weak corner, the full jet of ``u`` for a strong corner and
    everything at least two orders below the truncation otherwise.
    Concludes ``AllVanish`` when the claim is forced and ``Counterexample``
    otherwise, attaching a solution that is nonzero on an unforced claim.
    """
    q1, q2 = gq(q1), gq(q2)
    report = jet_nullspace(germ, q1, q2, M, basis=True)
    weight = 1
    if isinstance(germ, CornerProfile):
        weight = germ.beta
        claim = [k for k in report.unknowns if _claim_level("weak", k, weight) <= M]
    elif isinstance(germ, StrongCorner):
        claim = triangle(M) + triangle(M - 2, A2)
    else:
        claim = triangle(M - 2) + triangle(M - 2, A2)
    forced = sorted(report.forced & set(claim), key=claim.index)
    ok = set(claim) <= report.forced
    step = Step("oracle: all relations at once", M, [("oracle", M)], claim,
                len(report.unknowns) - report.dimension, FORCED if ok else SINGULAR, forced,
                [[row.get(c, ZERO) for c in range(len(report.unknowns))] for row in report.matrix])
    cert = VanishingCertificate(
        kind="oracle", germ=germ, q1=q1, q2=q2, order=M, weight=weight, claim=claim, steps=[step],
        conclusion=Conclusion.ALL_VANISH if ok else Conclusion.COUNTEREXAMPLE,
        notes=[f"nullspace dimension {report.dimension}"],
    )
    if not ok:
        cert.counterexample = report.counterexample(set(claim) - report.forced)
    return cert


def replay(cert: VanishingCertificate) -> VanishingCertificate:
    """Re-run the schedule that produced ``cert`` from its stated inputs."""
    if cert.kind == "weak":
        fresh = weak_corner_induction(cert.germ, cert.q1, cert.q2, cert.order)
    elif cert.kind == "strong":
        fresh = strong_corner_induction(cert.germ, cert.q1, cert.q2, cert.order)
    elif cert.kind == "oracle":
        fresh = oracle_certificate(cert.germ, cert.q1, cert.q2, cert.order)
    else:
        raise ValueError(f"unknown certificate kind {cert.kind!r}")
    fresh.audit = cert.audit
    return fresh


def check_certificate(cert: VanishingCertificate) -> list:
    """Problems found by replaying ``cert``; an empty list means it is genuine."""
    fresh = replay(cert)
    problems = []
    mine, theirs = cert.to_json(), fresh.to_json(cert.audit)
    for key in sorted(set(mine) | set(theirs)):
        if key == "steps":
            continue
        if mine.get(key) != theirs.get(key):
            problems.append(f"field {key!r} differs from a fresh run")
    if len(cert.steps) != len(fresh.steps):
        problems.append(f"{len(cert.steps)} steps recorded, a fresh run has {len(fresh.steps)}")
    for i, (a, b) in enumerate(zip(mine["steps"], theirs["steps"])):
        if a != b:
            problems.append(f"step {i} ({b['label']}) differs from a fresh run")
    return problems


__all__ = [
    "Conclusion",
    "NullspaceReport",
    "OperatorSymbol",
    "Step",
    "VanishingCertificate",
    "agrees_with_oracle",
    "check_certificate",
    "jet_nullspace",
    "operator_span_check",
    "oracle_certificate",
    "oracle_constraints",
    "replay",
    "strong_corner_induction",
    "vandermonde4",
    "weak_corner_induction",
]
