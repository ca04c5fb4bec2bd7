"""Associated graded algebra of the power filtration and the natural-grading test."""
from __future__ import annotations

from dataclasses import dataclass

from .algebra import AlgebraTable, Subspace, power_series
from .errors import NotNilpotentInput
from .field import Matrix, invert
from .iso import iso_search, invariants, verify_witness


@dataclass(frozen=True)
class GradedAlgebra:
    component_dims: tuple[int, ...]
    adapted_basis: Matrix        # rows are basis vectors, component 1 first
    induced_table: AlgebraTable  # gr A in the adapted basis
    placement: tuple[int, ...]   # component of each adapted basis vector
    filtration: tuple            # the power series A^1, A^2, ...

    @property
    def change(self) -> Matrix:
        """Columns are the adapted basis vectors (the transport convention)."""
        return self.adapted_basis.transpose()

    def degree(self, v) -> int:
        """Largest ``i`` with ``v`` in ``A^i`` (0 for the zero vector)."""
        if not any(v):
            return 0
        deg = 0
        for i, term in enumerate(self.filtration, start=1):
            if term.contains(v):
                deg = i
        return deg


def _adapted_rows(a: AlgebraTable, terms) -> tuple[list[list], list[int]]:
    F, n = a.field, a.n
    k = len(terms)
    chosen: dict[int, list] = {}
    span = []
    # deepest nonzero power first; each step adds vectors independent modulo the next power
    for i in range(k - 1, 0, -1):
        term = terms[i - 1]
        if i == 1:
            pool = [a.basis_vector(c) for c in range(1, n + 1)]
        else:
            pool = [list(r) for r in term.rows]
        picks = []
        for v in pool:
            if not Subspace(F, n, span + [v]).dim > len(span):
                continue
            span.append(v)
            picks.append(v)
        chosen[i] = picks
    rows, placement = [], []
    for i in range(1, k):
        rows.extend(chosen[i])
        placement.extend([i] * len(chosen[i]))
    return rows, placement


def associated_graded(a: AlgebraTable) -> GradedAlgebra:
    ps = power_series(a)
    if not ps.nilpotent:
        raise NotNilpotentInput("associated graded algebra needs a nilpotent table")
    F, n = a.field, a.n
    rows, placement = _adapted_rows(a, ps.terms)
    dims = tuple(placement.count(i) for i in range(1, len(ps.terms)))
    if n == 0:
        return GradedAlgebra((), Matrix(F, [], cols=0), a, (), tuple(ps.terms))
    basis = Matrix(F, rows)
    inv = invert(basis.transpose())
    prods = {}
    for u in range(n):
        for v in range(n):
            w = a.mul(rows[u], rows[v])
            if not any(w):
                continue
            coords = inv @ w
            target = placement[u] + placement[v]
            kept = [c if placement[r] == target else F.zero for r, c in enumerate(coords)]
            if any(kept):
                prods[(u + 1, v + 1)] = kept
    table = AlgebraTable(n, F, prods)
    return GradedAlgebra(dims, basis, table, tuple(placement), tuple(ps.terms))


@dataclass(frozen=True)
class GradingVerdict:
    answer: str                  # Yes | No | Unknown
    witness: Matrix | None = None
    coordinate: str | None = None


def is_naturally_graded(a: AlgebraTable, method: str = "invariants", witness: Matrix | None = None,
                        max_nodes: int | None = None) -> GradingVerdict:
    """Compare ``a`` with its associated graded algebra.

    ``method`` is ``"invariants"``, ``"search"`` (complete over GF(p)) or
    ``"witness"`` together with a candidate matrix.
    """
    gr = associated_graded(a)
    target = gr.induced_table
    if method == "witness":
        if witness is None:
            raise ValueError("method 'witness' needs a matrix")
        if verify_witness(a, target, witness):
            return GradingVerdict("Yes", witness)
        return GradingVerdict("Unknown")
    diff = invariants(a).difference(invariants(target))
    if diff is not None:
        return GradingVerdict("No", coordinate=diff)
    if a.n == 0 or verify_witness(a, target, gr.change):
        return GradingVerdict("Yes", gr.change)
    if method == "search":
        res = iso_search(a, target, max_nodes=max_nodes)
        if res.outcome == "Witness":
            return GradingVerdict("Yes", res.witness)
        if res.outcome == "ProvedDistinct":
            return GradingVerdict("No", coordinate=res.coordinate)
        if res.outcome == "ExhaustedNo":
            return GradingVerdict("No", coordinate=f"exhaustive search over {a.field.name}")
        return GradingVerdict("Unknown")
    if method != "invariants":
        raise ValueError(f"unknown method {method!r}")
    return GradingVerdict("Unknown")
