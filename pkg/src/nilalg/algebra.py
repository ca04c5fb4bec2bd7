"""Structure-constant tables and their basic invariants.

A table stores ``e_i e_j = sum_k c_ij^k e_k`` sparsely with 1-based keys.
The invariants here are the power series ``A^1 ⊇ A^2 ⊇ ...`` (computed with
the full convolution ``A^{i+1} = sum_{k=1}^{i} A^k A^{i+1-k}``), the
nilindex, the dimension-profile label and the left/right/two-sided centers.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import DimensionMismatch, NotNilpotentInput
from .field import QQ, FieldSpec, Matrix, nullspace_rows, rref_rows


class AlgebraTable:
    """Finite-dimensional algebra given by structure constants.

    ``products`` maps ``(i, j)`` (1-based) to the coordinate vector of
    ``e_i e_j``. Zero products may be omitted; they are dropped on
    construction so that equal tables compare equal.
    """

    __slots__ = ("n", "field", "_products", "labels", "_rows", "_key")

    def __init__(self, n: int, field: FieldSpec = QQ,
                 products: Mapping[tuple[int, int], Sequence] | None = None,
                 labels: Sequence[str] | None = None):
        if n < 0:
            raise ValueError("dimension must be non-negative")
        prods = {}
        for (i, j), vec in (products or {}).items():
            if not (1 <= i <= n and 1 <= j <= n):
                raise ValueError(f"product key {(i, j)} outside 1..{n}")
            if len(vec) != n:
                raise DimensionMismatch(f"product e{i}e{j} has length {len(vec)}, expected {n}")
            v = tuple(field(x) for x in vec)
            if any(v):
                prods[(i, j)] = v
        self.n = n
        self.field = field
        self._products = dict(sorted(prods.items()))
        if labels is not None and len(labels) != n:
            raise ValueError("labels must have one entry per basis vector")
        self.labels = tuple(labels) if labels is not None else None
        rows: list[list] = [[] for _ in range(n)]
        for (i, j), v in self._products.items():
            rows[i - 1].append((j - 1, v))
        self._rows = rows
        self._key = None

    @classmethod
    def from_sparse(cls, n: int, field: FieldSpec,
                    entries: Iterable[tuple[int, int, int, object]],
                    labels: Sequence[str] | None = None) -> "AlgebraTable":
        """Build from ``(i, j, k, c)`` meaning ``c`` times ``e_k`` in ``e_i e_j``."""
        acc: dict[tuple[int, int], list] = {}
        for i, j, k, c in entries:
            vec = acc.setdefault((i, j), [field.zero] * n)
            vec[k - 1] = field.reduce(vec[k - 1] + field(c))
        return cls(n, field, acc, labels)

    @classmethod
    def zero(cls, n: int, field: FieldSpec = QQ) -> "AlgebraTable":
        return cls(n, field, {})

    @property
    def products(self) -> dict[tuple[int, int], tuple]:
        return dict(self._products)

    def product(self, i: int, j: int) -> tuple:
        v = self._products.get((i, j))
        return v if v is not None else (self.field.zero,) * self.n

    def basis_vector(self, i: int) -> list:
        """Coordinates of ``e_i`` (1-based)."""
        F = self.field
        return [F.one if k == i - 1 else F.zero for k in range(self.n)]

    def mul(self, x: Sequence, y: Sequence) -> list:
        F, n = self.field, self.n
        out = [0] * n
        for i, xi in enumerate(x):
            if not xi:
                continue
            for j, vec in self._rows[i]:
                yj = y[j]
                if not yj:
                    continue
                c = xi * yj
                for k, v in enumerate(vec):
                    if v:
                        out[k] += c * v
        if F.p:
            return [v % F.p for v in out]
        return [F.zero + v for v in out]

    def is_zero(self) -> bool:
        return not self._products

    def key(self) -> tuple:
        """Canonical sort key; lexicographic order on the dense tensor."""
        if self._key is None:
            F = self.field
            dense = []
            for i in range(1, self.n + 1):
                for j in range(1, self.n + 1):
                    dense.extend(self.product(i, j))
            if F.p:
                self._key = tuple(int(x) for x in dense)
            else:
                self._key = tuple(dense)
        return self._key

    def with_labels(self, labels: Sequence[str] | None) -> "AlgebraTable":
        return AlgebraTable(self.n, self.field, self._products, labels)

    def __eq__(self, other):
        return (isinstance(other, AlgebraTable) and self.n == other.n
                and self.field == other.field and self._products == other._products)

    def __hash__(self):
        return hash((self.n, self.field, tuple(self._products.items())))

    def __repr__(self):
        F = self.field
        names = self.labels or tuple(f"e{i}" for i in range(1, self.n + 1))
        parts = []
        for (i, j), v in self._products.items():
            terms = []
            for k, c in enumerate(v):
                if c:
                    s = F.format_scalar(c)
                    terms.append(names[k] if s == "1" else f"{s}*{names[k]}")
            parts.append(f"{names[i - 1]}{names[j - 1]}={'+'.join(terms)}")
        return f"AlgebraTable(n={self.n}, {F.name}: {', '.join(parts) or 'zero'})"


def multiply(a: AlgebraTable, x: Sequence, y: Sequence) -> list:
    """Bilinear extension of the table: ``sum_ij x_i y_j e_i e_j``."""
    if len(x) != a.n or len(y) != a.n:
        raise DimensionMismatch(f"vectors must have length {a.n}")
    return a.mul([a.field(v) for v in x], [a.field(v) for v in y])


def associativity_defect(a: AlgebraTable, first_only: bool = False) -> list[tuple[int, int, int]]:
    """Triples ``(i, j, k)`` (1-based, lexicographic) where ``(e_i e_j) e_k != e_i (e_j e_k)``."""
    F, n = a.field, a.n
    sparse = {ij: {k: c for k, c in enumerate(v, start=1) if c} for ij, v in a._products.items()}
    sparse = {ij: v for ij, v in sparse.items() if v}

    def combine(pairs):
        acc: dict[int, object] = {}
        for c, vec in pairs:
            for m, d in vec.items():
                acc[m] = acc.get(m, 0) + c * d
        return {m: v for m, v in ((m, F.reduce(v)) for m, v in acc.items()) if v}

    bad = []
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            ij = sparse.get((i, j), {})
            for k in range(1, n + 1):
                jk = sparse.get((j, k), {})
                if not ij and not jk:
                    continue
                left = combine((c, sparse.get((l, k), {})) for l, c in ij.items())
                right = combine((c, sparse.get((i, l), {})) for l, c in jk.items())
                if left != right:
                    bad.append((i, j, k))
                    if first_only:
                        return bad
    return bad


def is_associative(a: AlgebraTable) -> bool:
    return not associativity_defect(a, first_only=True)


def is_commutative(a: AlgebraTable) -> bool:
    return all(a.product(i, j) == a.product(j, i)
               for i in range(1, a.n + 1) for j in range(i + 1, a.n + 1))


# ---------------------------------------------------------------------------
# subspaces
# ---------------------------------------------------------------------------

class Subspace:
    """Subspace of ``F^n`` held by its canonical RREF basis."""

    __slots__ = ("ambient_dim", "field", "rows", "pivots")

    def __init__(self, field: FieldSpec, ambient_dim: int, vectors: Iterable[Sequence] = ()):
        rows = [list(v) for v in vectors]
        red, piv = rref_rows(field, rows) if rows else ([], [])
        self.field = field
        self.ambient_dim = ambient_dim
        self.rows = tuple(tuple(r) for r in red)
        self.pivots = tuple(piv)

    @classmethod
    def full(cls, field: FieldSpec, n: int) -> "Subspace":
        return cls(field, n, [[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @property
    def dim(self) -> int:
        return len(self.rows)

    @property
    def basis(self) -> Matrix:
        return Matrix(self.field, self.rows, cols=self.ambient_dim)

    def complement_coordinates(self) -> list[int]:
        """Non-pivot coordinates (0-based); their unit vectors span a complement."""
        piv = set(self.pivots)
        return [c for c in range(self.ambient_dim) if c not in piv]

    def contains(self, v: Sequence) -> bool:
        F = self.field
        v = list(v)
        for row, pc in zip(self.rows, self.pivots):
            f = v[pc]
            if f:
                v = [F.reduce(a - f * b) for a, b in zip(v, row)]
        return not any(v)

    def __contains__(self, v) -> bool:
        return self.contains(v)

    def annihilator_rows(self) -> list[list]:
        return nullspace_rows(self.field, self.rows, self.ambient_dim)

    def intersect(self, other: "Subspace") -> "Subspace":
        cons = self.annihilator_rows() + other.annihilator_rows()
        if not cons:
            return Subspace.full(self.field, self.ambient_dim)
        return Subspace(self.field, self.ambient_dim, nullspace_rows(self.field, cons, self.ambient_dim))

    def __add__(self, other: "Subspace") -> "Subspace":
        return Subspace(self.field, self.ambient_dim, list(self.rows) + list(other.rows))

    def issubset(self, other: "Subspace") -> bool:
        return all(other.contains(r) for r in self.rows)

    def __eq__(self, other):
        return (isinstance(other, Subspace) and self.ambient_dim == other.ambient_dim
                and self.rows == other.rows)

    def __hash__(self):
        return hash((self.ambient_dim, self.rows))

    def __repr__(self):
        return f"Subspace(dim={self.dim} in {self.ambient_dim})"


def product_space(a: AlgebraTable, u: Subspace, v: Subspace) -> Subspace:
    """Span of all products ``x y`` with ``x`` in ``u`` and ``y`` in ``v``."""
    vecs = [a.mul(list(x), list(y)) for x in u.rows for y in v.rows]
    return Subspace(a.field, a.n, [w for w in vecs if any(w)])


# ---------------------------------------------------------------------------
# power series, nilindex, profile
# ---------------------------------------------------------------------------

@dataclass
class PowerSeries:
    terms: list[Subspace]
    nilpotent: bool

    def __iter__(self):
        return iter(self.terms)

    def __len__(self):
        return len(self.terms)

    def __getitem__(self, i):
        return self.terms[i]

    @property
    def dims(self) -> list[int]:
        return [t.dim for t in self.terms]


def power_series(a: AlgebraTable) -> PowerSeries:
    """``A^1, A^2, ...`` up to the first zero term (or index ``2n+1``)."""
    F, n = a.field, a.n
    terms = [Subspace.full(F, n)]
    if n == 0:
        return PowerSeries(terms, True)
    cap = 2 * n + 1
    while terms[-1].dim > 0 and len(terms) < cap:
        i = len(terms)
        vecs = []
        for k in range(1, i + 1):
            left, right = terms[k - 1], terms[i - k]
            for x in left.rows:
                for y in right.rows:
                    w = a.mul(list(x), list(y))
                    if any(w):
                        vecs.append(w)
        terms.append(Subspace(F, n, vecs))
    return PowerSeries(terms, terms[-1].dim == 0)


def nilindex(a: AlgebraTable) -> int | None:
    """Smallest ``i`` with ``A^i = 0``; ``None`` when the table is not nilpotent."""
    ps = power_series(a)
    return len(ps.terms) if ps.nilpotent else None


def is_nilpotent(a: AlgebraTable) -> bool:
    return power_series(a).nilpotent


@dataclass(frozen=True)
class DimProfile:
    dims: tuple[int, ...]
    nilindex: int | None
    classification: str
    degree: int | None = None

    @property
    def label(self) -> str:
        if self.classification == "FiliformOfDegree":
            return f"FiliformOfDegree({self.degree})"
        return self.classification


def _profile_label(n: int, dims: Sequence[int]) -> tuple[str, int | None]:
    def d(i):
        return dims[i - 1] if i <= len(dims) else 0

    if all(d(i) == n + 1 - i for i in range(1, n + 2)):
        return "NullFiliform", None
    if n >= 2 and all(d(i) == n - i for i in range(2, n + 1)):
        return "Filiform", None
    if n >= 2:
        p = n - 1 - d(2)
        if p >= 2 and all(d(i) == n - p + 1 - i for i in range(2, n - p + 2)):
            return "FiliformOfDegree", p
    if n >= 3 and d(n - 2) > 0 and d(n - 1) == 0:
        return "QuasiFiliform", None
    return "Other", None


def classify_profile(a: AlgebraTable) -> DimProfile:
    ps = power_series(a)
    if not ps.nilpotent:
        raise NotNilpotentInput("dimension profile requested for a non-nilpotent table")
    dims = tuple(ps.dims)
    label, deg = _profile_label(a.n, dims)
    return DimProfile(dims, len(dims), label, deg)


# ---------------------------------------------------------------------------
# centers
# ---------------------------------------------------------------------------

def _annihilator_constraints(a: AlgebraTable, left: bool) -> list[list]:
    # x in Z^l  <=>  sum_i x_i c_ij^k = 0 for all j, k
    n, F = a.n, a.field
    rows = []
    for j in range(1, n + 1):
        for k in range(n):
            if left:
                row = [a.product(i, j)[k] for i in range(1, n + 1)]
            else:
                row = [a.product(j, i)[k] for i in range(1, n + 1)]
            if any(row):
                rows.append(row)
    return rows


@dataclass(frozen=True)
class Centers:
    left: Subspace
    right: Subspace
    center: Subspace

    def __iter__(self):
        return iter((self.left, self.right, self.center))

    @property
    def dims(self) -> tuple[int, int, int]:
        return (self.left.dim, self.right.dim, self.center.dim)


def centers(a: AlgebraTable) -> Centers:
    """Left center ``{x : x A = 0}``, right center ``{x : A x = 0}`` and their intersection."""
    F, n = a.field, a.n
    lc = _annihilator_constraints(a, left=True)
    rc = _annihilator_constraints(a, left=False)
    zl = Subspace(F, n, nullspace_rows(F, lc, n) if lc else Subspace.full(F, n).rows)
    zr = Subspace(F, n, nullspace_rows(F, rc, n) if rc else Subspace.full(F, n).rows)
    both = lc + rc
    z = Subspace(F, n, nullspace_rows(F, both, n) if both else Subspace.full(F, n).rows)
    return Centers(zl, zr, z)
