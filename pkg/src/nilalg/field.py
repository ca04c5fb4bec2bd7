"""Exact scalars over Q and GF(p), and the exact linear algebra built on them.

Rationals are ``fractions.Fraction`` values (always reduced, positive
denominator); residues of GF(p) are plain ``int`` values in ``[0, p)``.
Every routine here works on both through a :class:`FieldSpec`, which knows
how to bring a raw Python number back into canonical form.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import DimensionTooLarge, SingularMatrix

MAX_DIM = 64


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


class FieldSpec:
    """Either the rationals (``p == 0``) or the prime field GF(p)."""

    __slots__ = ("p",)

    def __init__(self, p: int = 0):
        if p != 0 and not _is_prime(p):
            raise ValueError(f"GF({p}) requested but {p} is not prime")
        object.__setattr__(self, "p", int(p))

    def __setattr__(self, key, value):
        raise AttributeError("FieldSpec is immutable")

    def __reduce__(self):
        return (FieldSpec, (self.p,))

    @property
    def is_finite(self) -> bool:
        return self.p != 0

    @property
    def name(self) -> str:
        return f"GF({self.p})" if self.p else "Q"

    @property
    def zero(self):
        return 0 if self.p else Fraction(0)

    @property
    def one(self):
        return 1 if self.p else Fraction(1)

    def __eq__(self, other):
        return isinstance(other, FieldSpec) and other.p == self.p

    def __hash__(self):
        return hash(("FieldSpec", self.p))

    def __repr__(self):
        return f"FieldSpec({self.name})"

    @classmethod
    def parse(cls, text: str) -> "FieldSpec":
        t = text.strip().upper().replace(" ", "")
        if t in ("Q", "QQ", "RATIONALS"):
            return QQ
        if t.startswith("GF(") and t.endswith(")"):
            return cls(int(t[3:-1]))
        if t.startswith("GF") and t[2:].isdigit():
            return cls(int(t[2:]))
        raise ValueError(f"unknown field {text!r}")

    # scalar handling -----------------------------------------------------

    def __call__(self, x):
        """Coerce an int, Fraction or literal string into this field."""
        if isinstance(x, str):
            return self.parse_scalar(x)
        if self.p:
            if isinstance(x, Fraction):
                return (x.numerator * pow(x.denominator, -1, self.p)) % self.p
            return int(x) % self.p
        return Fraction(x)

    def reduce(self, x):
        return x % self.p if self.p else x

    def inv(self, x):
        if self.p:
            if x % self.p == 0:
                raise ZeroDivisionError("inverse of zero in GF(%d)" % self.p)
            return pow(x, self.p - 2, self.p)
        return 1 / x

    def div(self, x, y):
        return self.reduce(x * self.inv(y))

    def neg(self, x):
        return (-x) % self.p if self.p else -x

    def parse_scalar(self, text: str):
        t = text.strip()
        if self.p:
            if "/" in t:
                return self(Fraction(t))
            return int(t) % self.p
        return Fraction(t)

    def format_scalar(self, x) -> str:
        if self.p:
            return str(int(x) % self.p)
        x = Fraction(x)
        if x.denominator == 1:
            return str(x.numerator)
        return f"{x.numerator}/{x.denominator}"

    def elements(self) -> range:
        if not self.p:
            raise ValueError("Q has no finite element list")
        return range(self.p)


QQ = FieldSpec(0)


def GF(p: int) -> FieldSpec:
    return FieldSpec(p)


# ---------------------------------------------------------------------------
# list-level kernels; rows are mutable lists of canonical scalars
# ---------------------------------------------------------------------------

def _check_dims(r: int, c: int) -> None:
    if r > MAX_DIM or c > MAX_DIM:
        raise DimensionTooLarge(f"{r}x{c} exceeds the {MAX_DIM}x{MAX_DIM} cap")


def rref_rows(F: FieldSpec, rows: list[list]) -> tuple[list[list], list[int]]:
    """Reduce ``rows`` in place to RREF; return (nonzero rows, pivot columns)."""
    if not rows:
        return [], []
    ncols = len(rows[0])
    p = F.p
    pivots = []
    r = 0
    nrows = len(rows)
    for c in range(ncols):
        piv = None
        for i in range(r, nrows):
            if rows[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        prow = rows[r]
        if prow[c] != 1:
            f = F.inv(prow[c])
            if p:
                prow[:] = [(v * f) % p for v in prow]
            else:
                prow[:] = [v * f for v in prow]
        for i in range(nrows):
            if i == r:
                continue
            row = rows[i]
            f = row[c]
            if f == 0:
                continue
            if p:
                row[:] = [(v - f * w) % p for v, w in zip(row, prow)]
            else:
                row[:] = [v - f * w for v, w in zip(row, prow)]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return rows[:r], pivots


def rank_rows(F: FieldSpec, rows: Sequence[Sequence]) -> int:
    return len(rref_rows(F, [list(r) for r in rows])[1])


def nullspace_rows(F: FieldSpec, rows: Sequence[Sequence], ncols: int) -> list[list]:
    """Canonical basis (in RREF) of the right kernel of the matrix ``rows``."""
    red, pivots = rref_rows(F, [list(r) for r in rows]) if rows else ([], [])
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for fc in free:
        v = [F.zero] * ncols
        v[fc] = F.one
        for row, pc in zip(red, pivots):
            v[pc] = F.neg(row[fc])
        basis.append(v)
    if not basis:
        return []
    return rref_rows(F, basis)[0]


def solve_affine(F: FieldSpec, rows: Sequence[Sequence], rhs: Sequence):
    """Solve ``rows @ x = rhs``.

    Returns ``(particular, kernel_basis)`` or ``None`` when inconsistent.
    """
    ncols = len(rows[0]) if rows else 0
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    red, pivots = rref_rows(F, aug)
    if pivots and pivots[-1] == ncols:
        return None
    x = [F.zero] * ncols
    for row, pc in zip(red, pivots):
        x[pc] = row[ncols]
    free = [c for c in range(ncols) if c not in set(pivots)]
    kernel = []
    for fc in free:
        v = [F.zero] * ncols
        v[fc] = F.one
        for row, pc in zip(red, pivots):
            v[pc] = F.neg(row[fc])
        kernel.append(v)
    return x, kernel


class Echelon:
    """Incrementally built echelon basis that remembers how each row was made.

    ``add`` inserts a vector and reports whether it was independent;
    ``express`` writes a vector in terms of the inserted vectors.
    """

    def __init__(self, F: FieldSpec, dim: int):
        self.F = F
        self.dim = dim
        self.rows: list[list] = []      # echelon rows, pivot entry 1
        self.combos: list[list] = []    # coefficients over inserted vectors
        self.pivots: list[int] = []
        self.count = 0

    def _reduce(self, v):
        F, p = self.F, self.F.p
        v = list(v)
        combo = [F.zero] * self.count
        for row, cmb, pc in zip(self.rows, self.combos, self.pivots):
            f = v[pc]
            if f == 0:
                continue
            if p:
                v = [(a - f * b) % p for a, b in zip(v, row)]
                for k, c in enumerate(cmb):
                    if c:
                        combo[k] = (combo[k] + f * c) % p
            else:
                v = [a - f * b for a, b in zip(v, row)]
                for k, c in enumerate(cmb):
                    if c:
                        combo[k] = combo[k] + f * c
        return v, combo

    def contains(self, v) -> bool:
        r, _ = self._reduce(v)
        return not any(r)

    def express(self, v):
        """Coefficients ``c`` with ``v == sum c[k] * inserted[k]``, or None."""
        r, combo = self._reduce(v)
        if any(r):
            return None
        return combo

    def add(self, v) -> bool:
        F = self.F
        r, combo = self._reduce(v)
        pc = next((i for i, x in enumerate(r) if x != 0), None)
        if pc is None:
            return False
        # r = v - sum combo_k inserted_k; new inserted vector index = count
        cmb = [F.neg(c) for c in combo] + [F.one]
        f = F.inv(r[pc])
        r = [F.reduce(x * f) for x in r]
        cmb = [F.reduce(x * f) for x in cmb]
        for row in self.combos:
            row.append(F.zero)
        self.rows.append(r)
        self.combos.append(cmb)
        self.pivots.append(pc)
        self.count += 1
        return True

    @property
    def rank(self) -> int:
        return len(self.rows)


# ---------------------------------------------------------------------------
# Matrix value type
# ---------------------------------------------------------------------------

class Matrix:
    """Immutable dense matrix over a :class:`FieldSpec`."""

    __slots__ = ("field", "rows", "cols", "entries")

    def __init__(self, field: FieldSpec, entries: Iterable[Iterable], cols: int | None = None):
        ent = tuple(tuple(field(x) for x in row) for row in entries)
        r = len(ent)
        c = len(ent[0]) if r else (cols or 0)
        if any(len(row) != c for row in ent):
            raise ValueError("ragged matrix rows")
        _check_dims(r, c)
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "rows", r)
        object.__setattr__(self, "cols", c)
        object.__setattr__(self, "entries", ent)

    def __setattr__(self, key, value):
        raise AttributeError("Matrix is immutable")

    def __reduce__(self):
        return (Matrix, (self.field, self.entries, self.cols))

    @classmethod
    def identity(cls, field: FieldSpec, n: int) -> "Matrix":
        return cls(field, [[1 if i == j else 0 for j in range(n)] for i in range(n)], cols=n)

    @classmethod
    def zeros(cls, field: FieldSpec, r: int, c: int) -> "Matrix":
        return cls(field, [[0] * c for _ in range(r)], cols=c)

    @classmethod
    def from_columns(cls, field: FieldSpec, columns: Sequence[Sequence]) -> "Matrix":
        if not columns:
            return cls(field, [], cols=0)
        n = len(columns[0])
        return cls(field, [[col[i] for col in columns] for i in range(n)], cols=len(columns))

    @classmethod
    def diag(cls, field: FieldSpec, values: Sequence) -> "Matrix":
        n = len(values)
        return cls(field, [[values[i] if i == j else 0 for j in range(n)] for i in range(n)], cols=n)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def row(self, i: int) -> tuple:
        return self.entries[i]

    def column(self, j: int) -> tuple:
        return tuple(row[j] for row in self.entries)

    def tolist(self) -> list[list]:
        return [list(r) for r in self.entries]

    def transpose(self) -> "Matrix":
        return Matrix(self.field, [self.column(j) for j in range(self.cols)], cols=self.rows)

    def __eq__(self, other):
        return (isinstance(other, Matrix) and self.field == other.field
                and self.rows == other.rows and self.cols == other.cols
                and self.entries == other.entries)

    def __hash__(self):
        return hash((self.field, self.rows, self.cols, self.entries))

    def __repr__(self):
        body = "; ".join(" ".join(self.field.format_scalar(x) for x in r) for r in self.entries)
        return f"Matrix[{self.field.name}]({self.rows}x{self.cols}: {body})"

    def __matmul__(self, other):
        F = self.field
        if isinstance(other, Matrix):
            if other.field != F or self.cols != other.rows:
                raise ValueError("incompatible matrix product")
            cols = [other.column(j) for j in range(other.cols)]
            return Matrix(F, [[F.reduce(sum(a * b for a, b in zip(r, c))) for c in cols]
                              for r in self.entries], cols=other.cols)
        v = list(other)
        if len(v) != self.cols:
            raise ValueError("vector length does not match matrix")
        return [F.reduce(sum(a * b for a, b in zip(r, v))) for r in self.entries]

    def __pow__(self, k: int) -> "Matrix":
        if self.rows != self.cols:
            raise ValueError("power of a non-square matrix")
        out = Matrix.identity(self.field, self.rows)
        for _ in range(k):
            out = out @ self
        return out

    @property
    def rank(self) -> int:
        return rank_rows(self.field, self.entries)

    def is_zero(self) -> bool:
        return not any(any(r) for r in self.entries)


def rref(m: Matrix) -> tuple[Matrix, int, list[int]]:
    """Unique reduced row echelon form, rank and pivot columns (leftmost first)."""
    red, pivots = rref_rows(m.field, m.tolist())
    full = red + [[m.field.zero] * m.cols for _ in range(m.rows - len(red))]
    return Matrix(m.field, full, cols=m.cols), len(pivots), pivots


def rank(m: Matrix) -> int:
    return m.rank


def invert(m: Matrix) -> Matrix:
    if m.rows != m.cols:
        raise ValueError("only square matrices can be inverted")
    F, n = m.field, m.rows
    aug = [list(r) + [F.one if i == j else F.zero for j in range(n)]
           for i, r in enumerate(m.entries)]
    red, pivots = rref_rows(F, aug)
    if len(pivots) < n or pivots[n - 1] != n - 1:
        raise SingularMatrix(f"matrix has rank < {n}")
    return Matrix(F, [row[n:] for row in red], cols=n)


def nullspace(m: Matrix) -> Matrix:
    """Rows of the result form the canonical basis of ``{v : m v = 0}``."""
    basis = nullspace_rows(m.field, m.entries, m.cols)
    return Matrix(m.field, basis, cols=m.cols)


# ---------------------------------------------------------------------------
# batched kernels over GF(p) (numpy, int64)
# ---------------------------------------------------------------------------

def _inverse_table(p: int) -> np.ndarray:
    inv = np.zeros(p, dtype=np.int64)
    for a in range(1, p):
        inv[a] = pow(a, p - 2, p)
    return inv


def _batch_dtype(p: int):
    # products of two residues must fit; int16 halves memory traffic for small p
    return np.int16 if p <= 181 else np.int64


def batch_rank_mod_p(mats: np.ndarray, p: int) -> np.ndarray:
    """Ranks of a stack of matrices (shape ``(N, r, c)``) over GF(p)."""
    dt = _batch_dtype(p)
    a = (np.asarray(mats) % p).astype(dt)
    N, r, c = a.shape
    ranks = np.zeros(N, dtype=np.int64)
    if N == 0 or r == 0:
        return ranks
    inv = _inverse_table(p).astype(dt)
    row_ids = np.arange(r)
    idx = np.arange(N)
    for col in range(c):
        # every matrix runs the same elimination step; those without a pivot are masked out
        tr = np.minimum(ranks, r - 1)
        eligible = (a[:, :, col] != 0) & (row_ids[None, :] >= ranks[:, None])
        has = eligible.any(axis=1)
        if not has.any():
            continue
        pr = np.argmax(eligible, axis=1)
        rowp = a[idx, pr]
        rowt = a[idx, tr]
        a[idx, pr] = np.where(has[:, None], rowt, rowp)
        pivot = (rowp * inv[rowp[:, col]][:, None]) % p
        a[idx, tr] = np.where(has[:, None], pivot, rowt)
        factors = a[:, :, col] * ((row_ids[None, :] > tr[:, None]) & has[:, None])
        a = (a - factors[:, :, None] * pivot[:, None, :]) % p
        ranks += has
        if (ranks == r).all():
            break
    return ranks


def batch_matmul_mod_p(x: np.ndarray, y: np.ndarray, p: int) -> np.ndarray:
    return np.matmul(x, y) % p


def iter_vectors(p: int, n: int) -> Iterator[tuple]:
    """All vectors of GF(p)^n in lexicographic coordinate order."""
    from itertools import product
    return product(range(p), repeat=n)


def all_vectors_array(p: int, n: int) -> np.ndarray:
    """GF(p)^n as an ``(p**n, n)`` int64 array, lexicographic order."""
    idx = np.arange(p ** n, dtype=np.int64)
    out = np.empty((idx.size, n), dtype=np.int64)
    for k in range(n):
        out[:, n - 1 - k] = idx % p
        idx //= p
    return out
