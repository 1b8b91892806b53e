"""Sparse exact Gauss-Jordan elimination over Q(i).

Rows are dictionaries ``{column: GaussianRational}``. Elimination follows a
caller-supplied column order and picks, within each column, the sparsest
available pivot row; the result is the unique reduced row echelon form for
that column order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Sequence

from .exact import ONE, ZERO, GaussianRational, gq

SparseRow = dict  # column index -> GaussianRational


@dataclass
class RrefResult:
    """Reduced row echelon form of a sparse exact matrix.

    ``rows[i]`` is the RREF row whose leading (unit) entry sits in column
    ``pivots[i]``. Pivot rows contain no other pivot column.
    """

    n_rows: int
    n_cols: int
    rows: list
    pivots: list
    labels: list = field(default_factory=list)

    @property
    def rank(self) -> int:
        return len(self.pivots)

    @property
    def nullity(self) -> int:
        return self.n_cols - self.rank

    @property
    def free_columns(self) -> list:
        pivot_set = set(self.pivots)
        return [c for c in range(self.n_cols) if c not in pivot_set]

    def nullspace(self) -> list:
        """Basis of the right nullspace, one sparse vector per free column."""
        basis = []
        for f in self.free_columns:
            vec = {f: ONE}
            for p, row in zip(self.pivots, self.rows):
                v = row.get(f)
                if v:
                    vec[p] = -v
            basis.append(vec)
        return basis

    def forced_zero_columns(self) -> set:
        """Columns that vanish in every solution of the homogeneous system.

        A column is forced exactly when it is a pivot whose RREF row has no
        free-column entries, i.e. the unit vector lies in the row space.
        """
        return {p for p, row in zip(self.pivots, self.rows) if len(row) == 1}

    def to_dense(self) -> list:
        out = []
        for row in self.rows:
            dense = [ZERO] * self.n_cols
            for c, v in row.items():
                dense[c] = v
            out.append(dense)
        return out


def rref(rows: Sequence[SparseRow], n_cols: int, column_order: Sequence[int] | None = None) -> RrefResult:
    """Exact reduced row echelon form of a sparse matrix.

    Parameters
    ----------
    rows : sequence of dict
        Sparse rows ``{col: value}``; zero entries may be omitted.
    n_cols : int
        Number of columns.
    column_order : sequence of int, optional
        Order in which columns are considered for pivoting. Defaults to
        ``range(n_cols)``.
    """
    work = []
    for row in rows:
        clean = {c: gq(v) for c, v in row.items() if v}
        for c in clean:
            if not 0 <= c < n_cols:
                raise IndexError(f"column {c} out of range for {n_cols} columns")
        work.append(clean)

    col_rows: dict = {}
    for i, row in enumerate(work):
        for c in row:
            col_rows.setdefault(c, set()).add(i)

    order = range(n_cols) if column_order is None else column_order
    used = set()
    pivots = []
    pivot_rows = []
    for col in order:
        candidates = [i for i in col_rows.get(col, ()) if i not in used]
        if not candidates:
            continue
        p = min(candidates, key=lambda i: (len(work[i]), i))
        prow = work[p]
        inv = prow[col].inverse()
        if inv != ONE:
            for c in prow:
                prow[c] = prow[c] * inv
        for i in list(col_rows[col]):
            if i == p:
                continue
            row = work[i]
            factor = row[col]
            for c, v in prow.items():
                new = row.get(c, ZERO) - factor * v
                if new:
                    if c not in row:
                        col_rows.setdefault(c, set()).add(i)
                    row[c] = new
                elif c in row:
                    del row[c]
                    col_rows[c].discard(i)
        used.add(p)
        pivots.append(col)
        pivot_rows.append(p)

    return RrefResult(
        n_rows=len(rows),
        n_cols=n_cols,
        rows=[work[p] for p in pivot_rows],
        pivots=pivots,
    )


def sparse_matvec(rows: Sequence[SparseRow], vec: SparseRow) -> list:
    """Product of a sparse matrix with a sparse vector (list of entries)."""
    out = []
    for row in rows:
        acc = ZERO
        for c, v in row.items():
            x = vec.get(c)
            if x:
                acc = acc + v * x
        out.append(acc)
    return out


def rank_factor_product(rows: Sequence[SparseRow], result: RrefResult) -> list:
    """Recombine ``A[:, pivots] @ R`` as sparse rows.

    For an exact RREF ``R`` of ``A`` this reproduces ``A`` identically; the
    check is the standard certificate that no rounding occurred.
    """
    out = []
    for row in rows:
        acc: dict = {}
        for k, p in enumerate(result.pivots):
            a = row.get(p)
            if not a:
                continue
            for c, v in result.rows[k].items():
                new = acc.get(c, ZERO) + gq(a) * v
                if new:
                    acc[c] = new
                else:
                    acc.pop(c, None)
        out.append(acc)
    return out


def determinant(matrix: Sequence[Sequence]) -> GaussianRational:
    """Exact determinant by Gaussian elimination with row exchanges."""
    n = len(matrix)
    a = [[gq(v) for v in row] for row in matrix]
    if any(len(row) != n for row in a):
        raise ValueError("determinant needs a square matrix")
    det = ONE
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col]), None)
        if piv is None:
            return ZERO
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        det = det * a[col][col]
        inv = a[col][col].inverse()
        for r in range(col + 1, n):
            f = a[r][col] * inv
            if f:
                for c in range(col, n):
                    a[r][c] = a[r][c] - f * a[col][c]
    return det


@dataclass
class ExactSystem:
    """Result of :func:`apply_constraints`: an RREF keyed by unknown labels."""

    unknowns: list
    matrix: list
    result: RrefResult
    tags: list

    @property
    def rank(self) -> int:
        return self.result.rank

    @property
    def nullity(self) -> int:
        return self.result.nullity

    @property
    def pivot_unknowns(self) -> list:
        return [self.unknowns[p] for p in self.result.pivots]

    def forced_zero(self) -> set:
        return {self.unknowns[c] for c in self.result.forced_zero_columns()}

    def nullspace(self) -> list:
        """Nullspace basis as ``{unknown: value}`` dictionaries."""
        return [{self.unknowns[c]: v for c, v in vec.items()} for vec in self.result.nullspace()]


def apply_constraints(unknowns: Sequence[Hashable], constraints, column_order: Sequence[Hashable] | None = None) -> ExactSystem:
    """Assemble homogeneous constraints over ``unknowns`` and reduce exactly.

    Every term of every constraint must reference a listed unknown. Rows keep
    the order of ``constraints`` (the caller fixes it by tag ordering).
    """
    unknowns = list(unknowns)
    index = {u: i for i, u in enumerate(unknowns)}
    if len(index) != len(unknowns):
        raise ValueError("duplicate unknown labels")
    rows = []
    tags = []
    for con in constraints:
        if con.rhs:
            raise ValueError(f"constraint {con.tag} is inhomogeneous; only homogeneous systems are supported")
        row = {}
        for key, coef in con.terms:
            if key not in index:
                raise KeyError(f"constraint {con.tag} references unknown {key!r} outside the system")
            if coef:
                row[index[key]] = coef
        rows.append(row)
        tags.append(con.tag)
    order = None if column_order is None else [index[u] for u in column_order]
    result = rref(rows, len(unknowns), order)
    result.labels = unknowns
    return ExactSystem(unknowns=unknowns, matrix=rows, result=result, tags=tags)
