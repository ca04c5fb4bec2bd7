"""Transport of tables along basis changes, isomorphism invariants and search.

The search assigns images to a generating set of ``b`` (unit vectors on the
non-pivot coordinates of ``b^2``) inside ``a`` one generator at a time.  A
word basis of ``b`` is grown by right-multiplying basis words by
generators; every product that falls back into the span of earlier words is
a relation the images have to satisfy.  Those relations are exactly the
conditions for the induced map to be multiplicative, so a complete
assignment whose word images are independent is an isomorphism.
"""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, asdict
from fractions import Fraction
from itertools import product
from typing import Sequence

import numpy as np

from .algebra import AlgebraTable, Subspace, centers, is_commutative, power_series
from .errors import BudgetExceeded, DimensionMismatch, NotNilpotentInput
from .families import BasisChange
from .field import (Echelon, Matrix, all_vectors_array, batch_rank_mod_p, invert, rank_rows,
                    solve_affine)
from .spectral import CharSequence, _mult_tensor, batch_operator_ranks, batch_profile_match, char_sequence

DEFAULT_MAX_NODES = 50_000_000
RATIONAL_PROBE_NODES = 20_000
PROFILE_TABLE_LIMIT = 200_000
PROFILE_CHUNK = 4096
# small-height scalars tried when probing over Q
_PROBE_SCALARS = (0, 1, -1, 2, -2, Fraction(1, 2), Fraction(-1, 2))


def max_nodes_default() -> int:
    env = os.environ.get("NILALG_MAX_NODES")
    return int(env) if env else DEFAULT_MAX_NODES


def _as_matrix(m, F) -> Matrix:
    """Accept a Matrix, a BasisChange or nested rows of scalars."""
    if isinstance(m, BasisChange):
        return m.matrix
    if isinstance(m, Matrix):
        return m
    return Matrix(F, [[F(x) for x in row] for row in m])


def transport(a: AlgebraTable, m) -> AlgebraTable:
    """Rewrite ``a`` in the basis given by the columns of ``m``.

    The product of new coordinate vectors ``u, v`` is ``m^-1 (m u)(m v)``.
    """
    m = _as_matrix(m, a.field)
    F, n = a.field, a.n
    if m.field != F:
        raise DimensionMismatch("basis change is over a different field")
    if m.rows != n or m.cols != n:
        raise DimensionMismatch(f"basis change is {m.rows}x{m.cols}, table has dim {n}")
    minv = invert(m)
    cols = [list(m.column(j)) for j in range(n)]
    prods = {}
    for u in range(n):
        for v in range(n):
            w = a.mul(cols[u], cols[v])
            if any(w):
                prods[(u + 1, v + 1)] = minv @ w
    return AlgebraTable(n, F, prods, a.labels)


def verify_witness(a: AlgebraTable, b: AlgebraTable, m) -> bool:
    if a.n != b.n or a.field != b.field:
        raise DimensionMismatch("tables differ in dimension or field")
    return transport(a, m) == b


# ---------------------------------------------------------------------------
# invariants
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class InvariantVector:
    dim_profile: tuple
    center_dims: tuple
    commutative: bool
    char_seq: CharSequence
    char_seq_strategy: str
    gen_count: int
    product_symmetry_rank: tuple   # (rank of symmetrized, rank of antisymmetrized products)

    _ORDER = ("dim_profile", "center_dims", "commutative", "gen_count",
              "product_symmetry_rank", "char_seq")

    def difference(self, other: "InvariantVector") -> str | None:
        """Name of the first coordinate that separates the two vectors.

        Characteristic sequences are compared only when both are exact maxima.
        """
        for name in self._ORDER:
            if name == "char_seq" and not (self.char_seq_strategy == other.char_seq_strategy == "exhaustive"):
                continue
            if getattr(self, name) != getattr(other, name):
                return name
        return None

    def key(self) -> tuple:
        cs = tuple(self.char_seq) if self.char_seq_strategy == "exhaustive" else None
        return (self.dim_profile, self.center_dims, self.commutative, self.gen_count,
                self.product_symmetry_rank, cs)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["char_seq"] = list(self.char_seq)
        d["dim_profile"] = list(self.dim_profile)
        d["center_dims"] = list(self.center_dims)
        d["product_symmetry_rank"] = list(self.product_symmetry_rank)
        return d


def _symmetry_ranks(a: AlgebraTable) -> tuple[int, int]:
    F, n = a.field, a.n
    sym, anti = [], []
    for i in range(1, n + 1):
        for j in range(i, n + 1):
            u, v = a.product(i, j), a.product(j, i)
            sym.append([F.reduce(x + y) for x, y in zip(u, v)])
            anti.append([F.reduce(x - y) for x, y in zip(u, v)])
    return rank_rows(F, sym), rank_rows(F, anti)


def invariants(a: AlgebraTable, seed: int = 0) -> InvariantVector:
    ps = power_series(a)
    if not ps.nilpotent:
        raise NotNilpotentInput("invariants need a nilpotent table")
    cs = char_sequence(a, "auto", seed=seed)
    a2 = ps[1].dim if len(ps) > 1 else 0
    return InvariantVector(
        dim_profile=tuple(ps.dims),
        center_dims=centers(a).dims,
        commutative=is_commutative(a),
        char_seq=cs.sequence,
        char_seq_strategy=cs.strategy,
        gen_count=a.n - a2,
        product_symmetry_rank=_symmetry_ranks(a),
    )


# ---------------------------------------------------------------------------
# search
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IsoResult:
    outcome: str                  # Witness | ProvedDistinct | ExhaustedNo | Inconclusive
    witness: Matrix | None = None
    coordinate: str | None = None
    field: str = "Q"
    nodes: int = 0

    @property
    def isomorphic(self) -> bool | None:
        if self.outcome == "Witness":
            return True
        if self.outcome in ("ProvedDistinct", "ExhaustedNo"):
            return False
        return None


class _Plan:
    """Word basis of ``b`` grown generator by generator, with its relations."""

    def __init__(self, b: AlgebraTable):
        F, n = b.field, b.n
        ps = power_series(b)
        if not ps.nilpotent:
            raise NotNilpotentInput("isomorphism search needs nilpotent tables")
        b2 = ps[1] if len(ps) > 1 else ps[0]
        coords = b2.complement_coordinates()
        # generators with long power chains first: they constrain the rest most
        coords.sort(key=lambda c: -_power_length(b, b.basis_vector(c + 1)))
        self.gens = [b.basis_vector(c + 1) for c in coords]
        self.words: list[tuple] = []
        self.parent: list[int] = []
        self.last: list[int] = []
        self.vals: list[list] = []
        self.gen_word: list[int] = []
        self.level_words: list[list[int]] = []
        self.relations: list[list[tuple]] = []
        ech = Echelon(F, n)

        def add_word(word, parent, last, val):
            ech.add(val)
            self.words.append(word)
            self.parent.append(parent)
            self.last.append(last)
            self.vals.append(val)
            return len(self.words) - 1

        for k, g in enumerate(self.gens):
            new_words, rels = [], []
            w0 = add_word((k,), -1, k, list(g))
            self.gen_word.append(w0)
            new_words.append(w0)
            pending = [(w, k) for w in range(w0)] + [(w0, j) for j in range(k + 1)]
            pos = 0
            while pos < len(pending):
                w, j = pending[pos]
                pos += 1
                v = b.mul(self.vals[w], self.gens[j])
                combo = ech.express(v)
                if combo is None:
                    nw = add_word(self.words[w] + (j,), w, j, v)
                    new_words.append(nw)
                    pending.extend((nw, i) for i in range(k + 1))
                else:
                    rels.append((w, j, {u: c for u, c in enumerate(combo) if c}))
            self.level_words.append(new_words)
            self.relations.append(rels)
        if len(self.words) != n:
            raise AssertionError("word basis does not span the algebra")


def _power_length(b: AlgebraTable, g) -> int:
    m, x = 1, list(g)
    while any(x) and m <= b.n:
        x = b.mul(x, g)
        m += 1
    return m


class _Search:
    def __init__(self, a: AlgebraTable, b: AlgebraTable, plan: _Plan, max_nodes: int):
        self.a, self.b, self.plan = a, b, plan
        self.F = a.field
        self.max_nodes = max_nodes
        self.nodes = 0
        ps = power_series(a)
        self.a2 = ps[1] if len(ps) > 1 else ps[0]
        p = self.F.p
        if p:
            self.tl_a, self.tr_a = _mult_tensor(a, True), _mult_tensor(a, False)
            tl_b, tr_b = _mult_tensor(b, True), _mult_tensor(b, False)
            g = np.array(plan.gens, dtype=np.int64).reshape(len(plan.gens), b.n)
            self.target_l = batch_operator_ranks(tl_b, g, p) if len(g) else None
            self.target_r = batch_operator_ranks(tr_b, g, p) if len(g) else None
            self.profile_ok = None
            self.tensor = np.zeros((a.n, a.n, a.n), dtype=np.int64)
            for (i, j), v in a.products.items():
                self.tensor[i - 1, j - 1] = v
            # once more vectors have been profiled than the space holds, a full table is cheaper
            self.profiled = 0
            self.table_size = p ** a.n if len(g) and p ** a.n <= PROFILE_TABLE_LIMIT else None

    def _build_profile_table(self):
        """Profile matches of every vector of ``a``, looked up by base-p code."""
        p, n = self.F.p, self.a.n
        allv = all_vectors_array(p, n)
        ok = batch_profile_match(self.tl_a, allv, p, self.target_l)
        for k in range(len(ok)):
            sel = np.nonzero(ok[k])[0]
            ok[k, sel] = batch_profile_match(self.tr_a, allv[sel], p, self.target_r[k])[0]
        self.profile_ok = list(ok)
        self.code_weights = p ** np.arange(n - 1, -1, -1, dtype=np.int64)

    # -- images ----------------------------------------------------------
    def _word_image(self, gimg: list, word: tuple):
        out = None
        for s in word:
            out = list(gimg[s]) if out is None else self.a.mul(out, gimg[s])
        return out

    def _linear_system(self, k: int, img: list, gimg: list):
        """Rows and right-hand side of the level-k relations that are affine in the new image."""
        F, n, plan = self.F, self.a.n, self.plan
        rows: list[list] = []
        rhs: list = []
        for w, j, combo in plan.relations[k]:
            terms = [(F.one, plan.words[w] + (j,))] + [(F.neg(c), plan.words[u]) for u, c in combo.items()]
            if any(word.count(k) > 1 for _, word in terms):
                continue
            mat = [[F.zero] * n for _ in range(n)]
            const = [F.zero] * n
            for coef, word in terms:
                if k not in word:
                    val = self._word_image(gimg, word)
                    const = [F.reduce(x + coef * y) for x, y in zip(const, val)]
                    continue
                t = word.index(k)
                pre = self._word_image(gimg, word[:t]) if t else None
                suf = self._word_image(gimg, word[t + 1:]) if t + 1 < len(word) else None
                for c in range(n):
                    v = [F.one if r == c else F.zero for r in range(n)]
                    if pre is not None:
                        v = self.a.mul(pre, v)
                    if suf is not None:
                        v = self.a.mul(v, suf)
                    for r in range(n):
                        if v[r]:
                            mat[r][c] = F.reduce(mat[r][c] + coef * v[r])
            for r in range(n):
                rows.append(mat[r])
                rhs.append(F.neg(const[r]))
        return rows, rhs

    def _affine_solutions(self, k: int, img: list, gimg: list):
        F, n = self.F, self.a.n
        rows, rhs = self._linear_system(k, img, gimg)
        if rows:
            return solve_affine(F, rows, rhs)
        return [F.zero] * n, [[F.one if r == c else F.zero for r in range(n)] for c in range(n)]

    def _rational_candidates(self, k: int, img: list, gimg: list):
        F, n = self.F, self.a.n
        sol = self._affine_solutions(k, img, gimg)
        if sol is None:
            return
        x0, kernel = sol
        avoid = self.a2 + Subspace(F, n, gimg[:k])
        for t in product(_PROBE_SCALARS, repeat=len(kernel)):
            y = list(x0)
            for c, kv in zip(t, kernel):
                if c:
                    y = [F.reduce(u + c * v) for u, v in zip(y, kv)]
            if not avoid.contains(y):
                yield y

    def _finite_candidates(self, k: int, img: list, gimg: list) -> np.ndarray:
        """Candidate images of generator k, filtered and in lexicographic order."""
        F, n = self.F, self.a.n
        p = F.p
        sol = self._affine_solutions(k, img, gimg)
        if sol is None:
            return np.zeros((0, n), dtype=np.int64)
        x0, kernel = sol
        d = len(kernel)
        if p ** d > self.max_nodes - self.nodes:
            raise BudgetExceeded(f"{p}^{d} candidate images exceed the search budget")
        coeffs = all_vectors_array(p, d)
        ys = (coeffs @ np.array(kernel, dtype=np.int64).reshape(d, n) + np.array(x0, dtype=np.int64)) % p
        ann = (self.a2 + Subspace(F, n, gimg[:k])).annihilator_rows()
        if not ann:
            return ys[:0]
        ys = ys[((ys @ np.array(ann, dtype=np.int64).T) % p).any(axis=1)]
        # relations are cheap and prune hardest, so they run before the rank profiles
        if ys.shape[0]:
            ys = ys[self._batch_accept(k, img, gimg, ys)]
        if ys.shape[0] > 1:
            ys = ys[np.lexsort(ys.T[::-1])]
        return ys

    def _profile_filter(self, k: int, ys: np.ndarray) -> np.ndarray:
        """Keep candidates whose left and right rank profiles match generator k's."""
        p = self.F.p
        if not ys.shape[0]:
            return ys
        self.profiled += ys.shape[0]
        if self.profile_ok is None and self.table_size is not None and self.profiled > self.table_size:
            self._build_profile_table()
        if self.profile_ok is not None:
            return ys[self.profile_ok[k][ys @ self.code_weights]]
        keep = batch_profile_match(self.tl_a, ys, p, self.target_l[k])[0]
        sel = np.nonzero(keep)[0]
        keep[sel] = batch_profile_match(self.tr_a, ys[sel], p, self.target_r[k])[0]
        return ys[keep]

    def _batch_mul(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        n = self.a.n
        xt = (x @ self.tensor.reshape(n, n * n)).reshape(-1, n, n)
        return np.einsum("bj,bjk->bk", y, xt) % self.F.p

    def _batch_accept(self, k: int, img: list, gimg: list, ys: np.ndarray) -> np.ndarray:
        """Mask of candidates satisfying every level-k relation with independent word images."""
        plan, p = self.plan, self.F.p
        N, n = ys.shape
        imgs = [np.broadcast_to(np.array(v, dtype=np.int64), (N, n)) for v in img]
        imgs += [None] * len(plan.level_words[k])
        gens = [np.broadcast_to(np.array(v, dtype=np.int64), (N, n)) for v in gimg] + [ys]
        for w in plan.level_words[k]:
            imgs[w] = ys if plan.parent[w] < 0 else self._batch_mul(imgs[plan.parent[w]], gens[plan.last[w]])
        mask = np.ones(N, dtype=bool)
        for w, j, combo in plan.relations[k]:
            diff = self._batch_mul(imgs[w], gens[j])
            for u, c in combo.items():
                diff = diff - c * imgs[u]
            mask &= ~((diff % p).any(axis=1))
        if mask.any():
            idx = np.nonzero(mask)[0]
            stack = np.stack([m[idx] for m in imgs], axis=1)
            mask[idx] = batch_rank_mod_p(stack, p) == len(imgs)
        return mask

    # -- backtracking ----------------------------------------------------
    def _accept(self, k: int, img: list, gimg: list, y: list):
        """Images of the level-k words if ``y`` satisfies every level-k relation."""
        F, a, plan = self.F, self.a, self.plan
        img = img + [None] * len(plan.level_words[k])
        gimg = gimg + [y]
        for w in plan.level_words[k]:
            if plan.parent[w] < 0:
                img[w] = y
            else:
                img[w] = a.mul(img[plan.parent[w]], gimg[plan.last[w]])
        for w, j, combo in plan.relations[k]:
            lhs = a.mul(img[w], gimg[j])
            rhs = [F.zero] * a.n
            for u, c in combo.items():
                rhs = [F.reduce(x + c * v) for x, v in zip(rhs, img[u])]
            if lhs != rhs:
                return None
        if rank_rows(F, img) != len(img):
            return None
        return img, gimg

    def run(self, first=None):
        """Witness matrix, or None when the candidate space is exhausted."""
        plan = self.plan
        if not plan.gens:
            return Matrix.identity(self.F, self.a.n)
        return self._level(0, [], [], first)

    def _count(self, k: int):
        self.nodes += k
        if self.nodes > self.max_nodes:
            raise BudgetExceeded(f"isomorphism search exceeded {self.max_nodes} nodes")

    def _level(self, k, img, gimg, first=None):
        if self.F.p:
            survivors = self._finite_survivors(k, img, gimg, first)
        else:
            survivors = self._rational_candidates(k, img, gimg)
        for y in survivors:
            if not self.F.p:
                self._count(1)
            nxt = self._accept(k, img, gimg, y)
            if nxt is None:
                continue
            if k + 1 == len(self.plan.gens):
                m = self._matrix(nxt[0])
                if verify_witness(self.a, self.b, m):
                    return m
                continue
            found = self._level(k + 1, *nxt)
            if found is not None:
                return found
        return None

    def _finite_survivors(self, k, img, gimg, first=None):
        """Candidates in lexicographic order; rank profiles are checked a chunk at a time
        so a search that succeeds early never profiles the whole candidate space."""
        if first is not None:
            self._count(len(first))
            yield from ([int(v) for v in row] for row in first)
            return
        ys = self._finite_candidates(k, img, gimg)
        for start in range(0, len(ys), PROFILE_CHUNK):
            chunk = self._profile_filter(k, ys[start:start + PROFILE_CHUNK])
            self._count(len(chunk))
            yield from ([int(v) for v in row] for row in chunk)

    def _matrix(self, img):
        F = self.F
        basis = Matrix.from_columns(F, self.plan.vals)
        images = Matrix.from_columns(F, img)
        return images @ invert(basis)

    def first_level(self) -> np.ndarray:
        return self._profile_filter(0, self._finite_candidates(0, [], []))


def _search_partition(a, b, first, max_nodes):
    s = _Search(a, b, _Plan(b), max_nodes)
    try:
        m = s.run(first)
    except BudgetExceeded as exc:
        return ("budget", str(exc), s.nodes)
    return ("witness" if m is not None else "none", m, s.nodes)


def generator_search(a: AlgebraTable, b: AlgebraTable, max_nodes: int | None = None,
                     workers: int = 1) -> IsoResult:
    """Backtracking over generator images, without the invariant pre-check."""
    if a.n != b.n or a.field != b.field:
        raise DimensionMismatch("tables differ in dimension or field")
    F = a.field
    limit = max_nodes if max_nodes is not None else max_nodes_default()
    if not F.p:
        limit = min(limit, RATIONAL_PROBE_NODES)
    plan = _Plan(b)
    search = _Search(a, b, plan, limit)
    if not F.p:
        try:
            m = search.run()
        except BudgetExceeded:
            m = None
        if m is not None:
            return IsoResult("Witness", m, field=F.name, nodes=search.nodes)
        return IsoResult("Inconclusive", field=F.name, nodes=search.nodes)
    if workers > 1 and plan.gens:
        first = search.first_level()
        size = -(-len(first) // workers) or 1
        parts = [first[i:i + size] for i in range(0, len(first), size)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outs = list(pool.map(_search_partition, [a] * len(parts), [b] * len(parts),
                                 parts, [limit] * len(parts)))
        nodes = sum(o[2] for o in outs)
        for kind, payload, _ in outs:
            if kind == "witness":
                return IsoResult("Witness", payload, field=F.name, nodes=nodes)
        for kind, payload, _ in outs:
            if kind == "budget":
                raise BudgetExceeded(payload)
        return IsoResult("ExhaustedNo", field=F.name, nodes=nodes)
    m = search.run()
    if m is not None:
        return IsoResult("Witness", m, field=F.name, nodes=search.nodes)
    return IsoResult("ExhaustedNo", field=F.name, nodes=search.nodes)


def iso_search(a: AlgebraTable, b: AlgebraTable, max_nodes: int | None = None,
               workers: int = 1, seed: int = 0) -> IsoResult:
    """Decide ``a ≅ b`` over a prime field; probe for a witness over Q.

    Invariants are compared first.  A negative answer over GF(p) holds for
    that field only.
    """
    if a.n != b.n or a.field != b.field:
        raise DimensionMismatch("tables differ in dimension or field")
    diff = invariants(a, seed).difference(invariants(b, seed))
    if diff is not None:
        return IsoResult("ProvedDistinct", coordinate=diff, field=a.field.name)
    return generator_search(a, b, max_nodes, workers)
