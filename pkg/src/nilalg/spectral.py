"""Left multiplication operators, Jordan types and characteristic sequences."""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from .algebra import AlgebraTable, centers, power_series
from .errors import BudgetExceeded, NotNilpotentInput, NotNilpotentOperator
from .field import FieldSpec, Matrix, batch_rank_mod_p, rank_rows

EXHAUSTIVE_LIMIT = 10 ** 7
_CHUNK = 1 << 15


class CharSequence(tuple):
    """Non-increasing tuple of Jordan block sizes; compares lexicographically."""

    def __new__(cls, parts: Iterable[int]):
        parts = tuple(int(p) for p in parts)
        if any(p <= 0 for p in parts):
            raise ValueError("parts must be positive")
        if any(parts[i] < parts[i + 1] for i in range(len(parts) - 1)):
            raise ValueError("parts must be non-increasing")
        return super().__new__(cls, parts)

    @property
    def parts(self) -> tuple[int, ...]:
        return tuple(self)

    def __repr__(self):
        return f"CharSequence{tuple(self)}"


def left_mult_matrix(a: AlgebraTable, x: Sequence) -> Matrix:
    """Matrix of ``L_x : z -> x z``; column ``j`` is ``x e_j``."""
    n, F = a.n, a.field
    x = [F(v) for v in x]
    cols = [a.mul(x, a.basis_vector(j)) for j in range(1, n + 1)]
    return Matrix.from_columns(F, cols) if n else Matrix(F, [], cols=0)


def right_mult_matrix(a: AlgebraTable, x: Sequence) -> Matrix:
    """Matrix of ``R_x : z -> z x``."""
    n, F = a.n, a.field
    x = [F(v) for v in x]
    cols = [a.mul(a.basis_vector(j), x) for j in range(1, n + 1)]
    return Matrix.from_columns(F, cols) if n else Matrix(F, [], cols=0)


def _partition_from_ranks(n: int, ranks: Sequence[int]) -> CharSequence:
    # ranks[k] = rank(M^k), ranks[0] = n; blocks of size >= k: ranks[k-1] - ranks[k]
    ge = [ranks[k - 1] - ranks[k] for k in range(1, len(ranks))] + [0]
    parts = []
    for k in range(len(ge) - 1, 0, -1):
        parts.extend([k] * (ge[k - 1] - ge[k]))
    return CharSequence(parts)


def jordan_type(m: Matrix) -> CharSequence:
    """Jordan block sizes of a nilpotent square matrix, largest first."""
    if m.rows != m.cols:
        raise ValueError("jordan_type needs a square matrix")
    n = m.rows
    ranks = [n]
    power = m
    for _ in range(n):
        r = power.rank
        ranks.append(r)
        if r == 0:
            break
        power = power @ m
    if ranks[-1] != 0:
        raise NotNilpotentOperator("matrix is not nilpotent")
    while len(ranks) < n + 1:
        ranks.append(0)
    return _partition_from_ranks(n, ranks)


@dataclass(frozen=True)
class CharSeqResult:
    sequence: CharSequence
    witness: tuple
    strategy: str              # "exhaustive" or "sampled"
    certified_max: bool        # False for sampled: certified lower bound only
    candidates: int = 0


def _mult_tensor(a: AlgebraTable, left: bool = True) -> np.ndarray:
    # T[i, k, j] = coefficient of e_k in (e_i e_j) for left, (e_j e_i) for right
    n = a.n
    t = np.zeros((n, n, n), dtype=np.int64)
    for (i, j), v in a.products.items():
        for k, c in enumerate(v):
            if c:
                if left:
                    t[i - 1, k, j - 1] = int(c)
                else:
                    t[j - 1, k, i - 1] = int(c)
    return t


def batch_operator_ranks(tensor: np.ndarray, xs: np.ndarray, p: int) -> np.ndarray:
    """``ranks[b, k] = rank(L_{x_b}^k)`` for k = 0..n over GF(p)."""
    n = tensor.shape[0]
    N = xs.shape[0]
    L = np.einsum("bi,ikj->bkj", xs, tensor) % p
    ranks = np.zeros((N, n + 1), dtype=np.int64)
    ranks[:, 0] = n
    P = L
    for k in range(1, n + 1):
        ranks[:, k] = batch_rank_mod_p(P, p)
        if not ranks[:, k].any():
            break
        if k < n:
            P = np.matmul(P, L) % p
    return ranks


def batch_profile_match(tensor: np.ndarray, xs: np.ndarray, p: int, targets: np.ndarray) -> np.ndarray:
    """``match[g, b]``: the rank profile of ``L_{x_b}`` equals ``targets[g]``.

    Same answer as comparing :func:`batch_operator_ranks` rows, but each power
    is only ranked for vectors still matching some target.
    """
    n = tensor.shape[0]
    targets = np.asarray(targets, dtype=np.int64).reshape(-1, n + 1)
    N = xs.shape[0]
    match = np.ones((targets.shape[0], N), dtype=bool)
    match &= (targets[:, 0] == n)[:, None]
    alive = np.nonzero(match.any(axis=0))[0]
    P = np.einsum("bi,ikj->bkj", xs[alive], tensor) % p
    L = P
    for k in range(1, n + 1):
        if not alive.size:
            break
        rk = batch_rank_mod_p(P, p)
        match[:, alive] &= rk[None, :] == targets[:, k][:, None]
        if not rk.any():
            # every higher power vanishes too
            match[:, alive] &= (targets[:, k + 1:] == 0).all(axis=1)[:, None]
            break
        keep = match[:, alive].any(axis=0)
        alive, P, L = alive[keep], P[keep], L[keep]
        if k < n:
            P = np.matmul(P, L) % p
    return match


def batch_partitions(ranks: np.ndarray) -> np.ndarray:
    """Padded non-increasing block sizes from rank profiles, shape ``(N, n)``."""
    n = ranks.shape[1] - 1
    ge = ranks[:, :-1] - ranks[:, 1:]          # blocks of size >= k, k = 1..n
    # the j-th largest block is the number of k with more than j blocks of size >= k
    return np.stack([(ge > j).sum(axis=1) for j in range(n)], axis=1)


def _lex_argmax(parts: np.ndarray) -> int:
    cand = np.arange(parts.shape[0])
    for col in range(parts.shape[1]):
        vals = parts[cand, col]
        cand = cand[vals == vals.max()]
        if cand.size == 1:
            break
    return int(cand[0])


def _projective_vectors(p: int, d: int):
    """Yield chunks of nonzero vectors of GF(p)^d with leading entry 1."""
    for lead in range(d):
        rest = d - lead - 1
        total = p ** rest
        for start in range(0, total, _CHUNK):
            idx = np.arange(start, min(total, start + _CHUNK), dtype=np.int64)
            block = np.zeros((idx.size, d), dtype=np.int64)
            block[:, lead] = 1
            for k in range(rest):
                block[:, d - 1 - k] = idx % p
                idx = idx // p
            yield block


def _check_nilpotent(a: AlgebraTable):
    ps = power_series(a)
    if not ps.nilpotent:
        raise NotNilpotentInput("characteristic sequence needs a nilpotent algebra")
    return ps


def _exhaustive(a: AlgebraTable) -> CharSeqResult:
    F, n = a.field, a.n
    p = F.p
    if not p:
        raise ValueError("exhaustive characteristic sequence needs a finite field")
    if p ** n > EXHAUSTIVE_LIMIT:
        raise BudgetExceeded(f"{p}^{n} elements exceed the exhaustive limit {EXHAUSTIVE_LIMIT}")
    ps = _check_nilpotent(a)
    a2 = ps[1] if len(ps) > 1 else ps[0]
    zl = centers(a).left
    # L_x only depends on x modulo the left center
    outside = [r for r in zl.rows if not a2.contains(r)]
    z_out = list(outside[0]) if outside else None
    coords = zl.complement_coordinates()
    d = len(coords)
    tensor = _mult_tensor(a)
    ann = np.array(a2.annihilator_rows() or [[0] * n], dtype=np.int64)

    best_parts, best_x, count = None, None, 0

    def consider(parts_row, x):
        nonlocal best_parts, best_x
        t = tuple(int(v) for v in parts_row)
        if best_parts is None or t > best_parts:
            best_parts, best_x = t, x

    if z_out is not None:
        # the zero class contains z_out, and L_{z_out} = 0
        count += 1
        consider([1] * n, tuple(z_out))
    for block in _projective_vectors(p, d):
        xs = np.zeros((block.shape[0], n), dtype=np.int64)
        xs[:, coords] = block
        if z_out is None:
            xs = xs[((xs @ ann.T) % p).any(axis=1)]
            if xs.shape[0] == 0:
                continue
        count += xs.shape[0]
        ranks = batch_operator_ranks(tensor, xs, p)
        parts = batch_partitions(ranks)
        b = _lex_argmax(parts)
        x = [int(v) for v in xs[b]]
        if a2.contains(x):
            x = [(u + v) % p for u, v in zip(x, z_out)]
        consider(parts[b], tuple(x))
    if best_parts is None:
        # n == 0 or A == A^2 (impossible for nilpotent n > 0)
        return CharSeqResult(CharSequence(()), (), "exhaustive", True, 0)
    seq = CharSequence(v for v in best_parts if v)
    return CharSeqResult(seq, best_x, "exhaustive", True, count)


def _random_scalar(F: FieldSpec, rng: random.Random):
    if F.p:
        return rng.randrange(F.p)
    return Fraction(rng.randint(-3, 3), rng.choice((1, 2, 3)))


def _sampled(a: AlgebraTable, count: int, seed: int) -> CharSeqResult:
    F, n = a.field, a.n
    ps = _check_nilpotent(a)
    a2 = ps[1] if len(ps) > 1 else ps[0]
    rng = random.Random(seed)
    cands = [a.basis_vector(c + 1) for c in a2.complement_coordinates()]
    for _ in range(count):
        x = [_random_scalar(F, rng) for _ in range(n)]
        if not a2.contains(x):
            cands.append(x)
    best, best_x = None, ()
    for x in cands:
        seq = jordan_type(left_mult_matrix(a, x))
        if best is None or seq > best:
            best, best_x = seq, tuple(x)
    if best is None:
        best = CharSequence(())
    return CharSeqResult(best, best_x, "sampled", False, len(cands))


def char_sequence(a: AlgebraTable, strategy: str = "auto", count: int = 64,
                  seed: int = 0) -> CharSeqResult:
    """Maximum Jordan type of ``L_x`` over ``x`` outside ``A^2``.

    ``strategy`` is ``"exhaustive"`` (finite fields, true maximum),
    ``"sampled"`` (a certified lower bound) or ``"auto"``.
    """
    if strategy == "auto":
        F = a.field
        strategy = "exhaustive" if F.p and F.p ** a.n <= EXHAUSTIVE_LIMIT else "sampled"
    if strategy == "exhaustive":
        return _exhaustive(a)
    if strategy == "sampled":
        return _sampled(a, count, seed)
    raise ValueError(f"unknown strategy {strategy!r}")


def rank_bound_check(a: AlgebraTable, x_of: Callable[[object], Sequence], bound: int,
                     params: Iterable | None = None, samples: int = 50, seed: int = 0) -> bool:
    """True iff ``rank L_{x(t)} <= bound`` for every parameter ``t != 0``.

    Without ``params`` all nonzero elements of a finite field are used, or
    ``samples`` seeded random nonzero rationals over Q.
    """
    F = a.field
    if params is None:
        if F.p:
            params = range(1, F.p)
        else:
            rng = random.Random(seed)
            params = []
            while len(params) < samples:
                t = Fraction(rng.randint(-50, 50), rng.randint(1, 20))
                if t:
                    params.append(t)
    for t in params:
        t = F(t)
        if not t:
            continue
        x = [F(v) for v in x_of(t)]
        if rank_rows(F, left_mult_matrix(a, x).entries) > bound:
            return False
    return True
