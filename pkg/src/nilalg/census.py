"""Exhaustive census of nilpotent associative tables over tiny prime fields.

A table of dimension n over GF(p) is an integer code in ``[0, p^(n^3))``
whose base-p digit ``(i*n + j)*n + k`` (0-based) is the coefficient of
``e_k`` in ``e_i e_j``.  Codes are scanned in numpy chunks: associativity is
tested one identity at a time, dropping failures as soon as they appear, and
nilpotency is tested on the survivors by checking that every product of
``n + 1`` basis vectors vanishes.
"""
from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field as dc_field
from itertools import product
from typing import Iterable, Iterator

import numpy as np

from .algebra import AlgebraTable, classify_profile, is_associative, power_series
from .errors import BudgetExceeded, InvalidDimension
from .families import mu0
from .field import FieldSpec
from .iso import generator_search, invariants, verify_witness

SCAN_CAP = 2 ** 27
CHUNK = 1 << 18


def gl_order(n: int, p: int) -> int:
    out = 1
    for i in range(n):
        out *= p ** n - p ** i
    return out


def _check_scope(n: int, p: int):
    if n < 1:
        raise InvalidDimension("census needs dim >= 1")
    if not p:
        raise ValueError("census runs over GF(p) only")
    if p ** (n ** 3) > SCAN_CAP:
        raise BudgetExceeded(f"{p}^{n ** 3} tables exceed the scan cap 2^27")


def _decode(codes: np.ndarray, n: int, p: int) -> np.ndarray:
    """Digit columns: row ``(i*n + j)*n + k`` holds the coefficients of ``e_k`` in ``e_i e_j``."""
    m = n ** 3
    if p == 2:
        return ((codes[None, :] >> np.arange(m, dtype=np.int64)[:, None]) & 1).astype(np.int16)
    weights = p ** np.arange(m, dtype=np.int64)
    return ((codes[None, :] // weights[:, None]) % p).astype(np.int16)


def _scan_range(n: int, p: int, start: int, stop: int):
    """(associative count, codes of nilpotent associative tables) in ``[start, stop)``."""
    codes = np.arange(start, stop, dtype=np.int64)
    cols = _decode(codes, n, p)

    def at(i, j, k):
        return cols[(i * n + j) * n + k]

    alive = codes.size
    keep = None
    for i, j, k, m in product(range(n), repeat=4):
        lhs = sum(at(i, j, l) * at(l, k, m) for l in range(n))
        rhs = sum(at(j, k, l) * at(i, l, m) for l in range(n))
        ok = (lhs - rhs) % p == 0
        keep = ok if keep is None else keep & ok
        # compress only once enough rows have died
        left = int(keep.sum())
        if left < 0.6 * alive or left == 0:
            cols, codes = cols[:, keep], codes[keep]
            alive, keep = left, None
        if not alive:
            break
    if keep is not None:
        cols, codes = cols[:, keep], codes[keep]
    assoc = int(codes.size)
    if not assoc:
        return 0, codes
    c = cols.T.reshape(-1, n, n, n).astype(np.int64)
    # words of length L as coefficient rows: w[b, word, k]
    w = c.reshape(-1, n * n, n)
    for _ in range(n - 1):
        w = np.einsum("bwl,bljk->bwjk", w, c).reshape(w.shape[0], -1, n) % p
    nil = ~w.reshape(w.shape[0], -1).any(axis=1)
    return assoc, codes[nil]


def table_from_code(code: int, n: int, F: FieldSpec) -> AlgebraTable:
    p = F.p
    prods: dict = {}
    x = int(code)
    for d in range(n ** 3):
        x, r = divmod(x, p)
        if r:
            i, rest = divmod(d, n * n)
            j, k = divmod(rest, n)
            prods.setdefault((i + 1, j + 1), [0] * n)[k] = r
    return AlgebraTable(n, F, prods)


@dataclass
class ScanResult:
    dim: int
    field: FieldSpec
    total: int
    associative_count: int
    nilpotent_codes: np.ndarray

    @property
    def nilpotent_count(self) -> int:
        return int(self.nilpotent_codes.size)

    def tables(self) -> Iterator[AlgebraTable]:
        for code in self.nilpotent_codes:
            yield table_from_code(int(code), self.dim, self.field)


def _scan_job(args):
    return _scan_range(*args)


def scan(dim: int, field: FieldSpec, workers: int = 1, chunk: int = CHUNK) -> ScanResult:
    p = field.p
    _check_scope(dim, p)
    total = p ** (dim ** 3)
    jobs = [(dim, p, s, min(total, s + chunk)) for s in range(0, total, chunk)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outs = list(pool.map(_scan_job, jobs))
    else:
        outs = [_scan_range(*j) for j in jobs]
    assoc = sum(o[0] for o in outs)
    codes = np.concatenate([o[1] for o in outs]) if outs else np.zeros(0, dtype=np.int64)
    return ScanResult(dim, field, total, assoc, codes)


def enumerate_tables(dim: int, field: FieldSpec, workers: int = 1) -> Iterator[AlgebraTable]:
    """Every nilpotent associative table of the given dimension, in code order."""
    return scan(dim, field, workers).tables()


# ---------------------------------------------------------------------------
# orbits
# ---------------------------------------------------------------------------

@dataclass
class IsoClass:
    representative: AlgebraTable
    members: list = dc_field(default_factory=list)
    invariants: object = None

    @property
    def orbit_size(self) -> int:
        return len(self.members)


def orbit_classify(tables: Iterable[AlgebraTable], max_nodes: int | None = None) -> list[IsoClass]:
    """Group tables into isomorphism classes; representatives are lexicographically least."""
    ordered = sorted(tables, key=lambda t: t.key())
    buckets: dict[tuple, list[IsoClass]] = {}
    classes: list[IsoClass] = []
    for t in ordered:
        inv = invariants(t)
        bucket = buckets.setdefault(inv.key(), [])
        for cls in bucket:
            res = generator_search(cls.representative, t, max_nodes)
            if res.outcome == "Witness":
                cls.members.append(t)
                break
        else:
            cls = IsoClass(t, [t], inv)
            bucket.append(cls)
            classes.append(cls)
    return classes


# ---------------------------------------------------------------------------
# theorem checks
# ---------------------------------------------------------------------------

@dataclass
class Verdict:
    name: str
    passed: bool
    checked: int
    counterexample: AlgebraTable | None = None


def verify_theorems(tables: Iterable[AlgebraTable]) -> list[Verdict]:
    """Check the three dimension-profile statements on nilpotent associative tables.

    Tables failing the associativity or nilpotency precondition are skipped.
    """
    one_gen = Verdict("null-filiform tables are isomorphic to the chain algebra", True, 0)
    fil = Verdict("filiform iff nilindex equals the dimension", True, 0)
    sq = Verdict("dim A^2 = n-1 implies null-filiform", True, 0)
    chains: dict = {}
    for t in tables:
        if not is_associative(t):
            continue
        ps = power_series(t)
        if not ps.nilpotent:
            continue
        n = t.n
        prof = classify_profile(t)
        if prof.classification == "NullFiliform":
            one_gen.checked += 1
            target = chains.setdefault((n, t.field), mu0(n, t.field))
            res = generator_search(t, target)
            ok = res.outcome == "Witness" and verify_witness(t, target, res.witness)
            if not ok and one_gen.passed:
                one_gen.passed, one_gen.counterexample = False, t
        fil.checked += 1
        if (prof.classification == "Filiform") != (prof.nilindex == n) and fil.passed:
            fil.passed, fil.counterexample = False, t
        a2 = ps.dims[1] if len(ps.dims) > 1 else 0
        if a2 == n - 1:
            sq.checked += 1
            if prof.classification != "NullFiliform" and sq.passed:
                sq.passed, sq.counterexample = False, t
    return [one_gen, fil, sq]


# ---------------------------------------------------------------------------
# report
# ---------------------------------------------------------------------------

@dataclass
class CensusReport:
    field: FieldSpec
    dim: int
    total_tables_scanned: int
    associative_count: int
    nilpotent_count: int
    classes: list[IsoClass] | None
    verdicts: list[Verdict]

    @property
    def iso_class_count(self) -> int | None:
        return None if self.classes is None else len(self.classes)

    def to_dict(self) -> dict:
        from .documents import table_to_document
        order = gl_order(self.dim, self.field.p)
        d = {
            "field": self.field.name,
            "dim": self.dim,
            "total_tables_scanned": self.total_tables_scanned,
            "associative_count": self.associative_count,
            "nilpotent_count": self.nilpotent_count,
            "iso_class_count": self.iso_class_count,
            "gl_order": order,
            "classes": None,
            "verdicts": [
                {"claim": v.name, "passed": v.passed, "checked": v.checked,
                 "counterexample": table_to_document(v.counterexample) if v.counterexample else None}
                for v in self.verdicts
            ],
        }
        if self.classes is not None:
            d["classes"] = [
                {"representative": table_to_document(c.representative),
                 "orbit_size": c.orbit_size,
                 "orbit_divides_gl": order % c.orbit_size == 0,
                 "profile": classify_profile(c.representative).label,
                 "invariants": c.invariants.to_dict()}
                for c in self.classes
            ]
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["class", "orbit_size", "profile", "products"])
        for idx, c in enumerate(self.classes or [], start=1):
            w.writerow([idx, c.orbit_size, classify_profile(c.representative).label,
                        _products_text(c.representative)])
        return buf.getvalue()


def _products_text(t: AlgebraTable) -> str:
    F = t.field
    parts = []
    for (i, j), v in t.products.items():
        terms = [(F.format_scalar(c) + "*" if c != 1 else "") + f"e{k + 1}" for k, c in enumerate(v) if c]
        parts.append(f"e{i}e{j}=" + "+".join(terms))
    return "; ".join(parts) or "zero"


def run_census(dim: int, field: FieldSpec, classify: bool = True, workers: int = 1) -> CensusReport:
    res = scan(dim, field, workers)
    tables = list(res.tables())
    classes = orbit_classify(tables) if classify else None
    verdicts = verify_theorems(tables)
    return CensusReport(field, dim, res.total, res.associative_count, res.nilpotent_count,
                        classes, verdicts)
