"""Claim-by-claim verification suites driven by ``nilalg verify-paper``.

Suites: ``s2`` (the chain algebra), ``s3`` (filiform families), ``s4``
(quasi-filiform families) and ``census`` (exhaustive small-dimension scan).
Every claim records the scale at which it was checked; an exception inside a
claim is reported as a failure of that claim.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from . import families as fam
from .algebra import AlgebraTable, classify_profile, is_associative, nilindex
from .census import run_census
from .field import GF, QQ, FieldSpec
from .grading import associated_graded, is_naturally_graded
from .iso import generator_search, invariants, transport, verify_witness
from .spectral import char_sequence, rank_bound_check

SUITES = ("s2", "s3", "s4", "census")
GRID = (Fraction(-2), Fraction(-1), Fraction(0), Fraction(1), Fraction(2), Fraction(1, 2))


@dataclass
class Claim:
    suite: str
    name: str
    scale: str
    passed: bool
    detail: str = ""

    def to_dict(self) -> dict:
        return {"suite": self.suite, "claim": self.name, "scale": self.scale,
                "passed": self.passed, "detail": self.detail}


def _claim(suite: str, name: str, scale: str, check: Callable[[], object]) -> Claim:
    try:
        out = check()
    except Exception as exc:  # a failing claim must not stop the suite
        return Claim(suite, name, scale, False, f"{type(exc).__name__}: {exc}")
    if isinstance(out, tuple):
        ok, detail = out
    else:
        ok, detail = bool(out), ""
    return Claim(suite, name, scale, bool(ok), detail)


def _first_failure(items) -> tuple[bool, str]:
    """``items`` yields ``(label, ok)``; stop at the first failure."""
    count = 0
    for label, ok in items:
        count += 1
        if not ok:
            return False, f"fails at {label}"
    return True, f"{count} cases"


# ---------------------------------------------------------------------------
# shared fixtures
# ---------------------------------------------------------------------------

def mu1_quadruple(n: int, F: FieldSpec = QQ) -> dict[str, AlgebraTable]:
    return {f"mu1_{k}(n={n})": fam.mu1(k, n, F) for k in range(1, 5)}


def lambda_pair(F: FieldSpec) -> dict[str, AlgebraTable]:
    return {"lambda1": fam.lam(1, F), "lambda2": fam.lam(2, F)}


def pi_list(F: FieldSpec) -> dict[str, AlgebraTable]:
    out = {"pi1(0)": fam.pi(1, 0, F), "pi1(1)": fam.pi(1, 1, F)}
    out.update({f"pi{k}": fam.pi(k, F=F) for k in range(2, 8)})
    out.update({"pi8(0)": fam.pi(8, 0, F), "pi8(2)": fam.pi(8, 2, F)})
    return out


def mu2_list(n: int, F: FieldSpec) -> dict[str, AlgebraTable]:
    return {f"mu2_2(n={n}, alpha=0)": fam.mu2(2, n, 0, F),
            f"mu2_2(n={n}, alpha=1)": fam.mu2(2, n, 1, F),
            f"mu2_3(n={n})": fam.mu2(3, n, F=F),
            f"mu2_4(n={n})": fam.mu2(4, n, F=F)}


def separation_suites() -> dict[str, dict[str, AlgebraTable]]:
    F5 = GF(5)
    return {
        "mu1 quadruple n=5 over GF(5)": mu1_quadruple(5, F5),
        "mu1 quadruple n=6 over GF(5)": mu1_quadruple(6, F5),
        "lambda pair over GF(2)": lambda_pair(GF(2)),
        "lambda pair over GF(3)": lambda_pair(GF(3)),
        "pi list over GF(5)": pi_list(F5),
        "mu2 list n=6 over GF(5)": mu2_list(6, F5),
    }


def pairwise_outcomes(tables: dict[str, AlgebraTable], workers: int = 1) -> list[tuple[str, str, str]]:
    """``(name, name, outcome)`` for every unordered pair, as iso_search would report it.

    Invariants are computed once per table rather than once per pair.
    """
    inv = {name: invariants(t) for name, t in tables.items()}
    out = []
    for (x, a), (y, b) in itertools.combinations(tables.items(), 2):
        if inv[x].difference(inv[y]) is not None:
            out.append((x, y, "ProvedDistinct"))
        else:
            out.append((x, y, generator_search(a, b, workers=workers).outcome))
    return out


def _separated(tables, workers=1):
    for x, y, outcome in pairwise_outcomes(tables, workers):
        if outcome not in ("ProvedDistinct", "ExhaustedNo"):
            return False, f"{x} vs {y}: {outcome}"
    return True, f"{len(tables) * (len(tables) - 1) // 2} pairs"


def _transport_consistency(case, params, trials, seed, F=QQ):
    rng = random.Random(seed)
    general = fam.general_table(case, params, F)
    for t in range(trials):
        change = fam.random_template_change(case, params, rng, F)
        m = fam.template_change(case, general, change)
        mapped = fam.general_table(case, fam.parameter_map(case, params, change, F), F)
        if transport(general, m) != mapped:
            return False, f"trial {t} at {params}"
    return True, f"{trials} random changes"


def _fixed_point(case, params, expected, trials, seed, F=QQ):
    rng = random.Random(seed)
    for t in range(trials):
        change = fam.random_template_change(case, params, rng, F)
        nz = fam.normalize(case, fam.parameter_map(case, params, change, F), F)
        if nz.family != expected:
            return False, f"trial {t}: {nz.family.name} instead of {expected.name}"
    return True, f"{trials} random changes"


def _graded_yes(t: AlgebraTable):
    v = is_naturally_graded(t)
    return v.answer == "Yes" and verify_witness(t, associated_graded(t).induced_table, v.witness)


# ---------------------------------------------------------------------------
# suites
# ---------------------------------------------------------------------------

def suite_s2(seed: int = 0, workers: int = 1) -> list[Claim]:
    s = "s2"
    F5 = GF(5)
    return [
        _claim(s, "chain algebra is associative and null-filiform with nilindex n+1", "n=1..12 over Q",
               lambda: _first_failure(
                   (n, is_associative(fam.mu0(n)) and nilindex(fam.mu0(n)) == n + 1
                    and classify_profile(fam.mu0(n)).classification == "NullFiliform")
                   for n in range(1, 13))),
        _claim(s, "chain algebra has characteristic sequence (n)", "n=2..6, exhaustive over GF(5)",
               lambda: _first_failure(
                   (n, tuple(char_sequence(fam.mu0(n, F5), "exhaustive").sequence) == (n,))
                   for n in range(2, 7))),
        _claim(s, "chain algebra is naturally graded", "n=2..8 over Q",
               lambda: _first_failure((n, _graded_yes(fam.mu0(n))) for n in range(2, 9))),
        _claim(s, "one-generated nilpotent tables are isomorphic to the chain algebra",
               "census dims 1..2 over GF(2) and GF(3)",
               lambda: _first_failure(
                   (f"dim {d} GF({p})", run_census(d, GF(p), classify=False).verdicts[0].passed)
                   for d, p in ((1, 2), (2, 2), (2, 3)))),
    ]


def suite_s3(seed: int = 0, workers: int = 1) -> list[Claim]:
    s = "s3"
    F5 = GF(5)

    def split_families():
        for n in range(4, 13):
            for p in range(1, n - 2):
                yield fam.mu0_split(n, p)

    def mu_primes():
        for n in range(5, 10):
            for p in range(2, n - 2):
                for alpha in (0, 1):
                    beta = [[Fraction((i * 3 + j * 5 + n) % 5 - 2, 1 + (i + j) % 2)
                             for j in range(p)] for i in range(p)]
                    yield fam.mu_prime(n, p, alpha, beta)

    def mu1s():
        for n in range(4, 13):
            for k in range(1, 5):
                yield fam.mu1(k, n)
            for al, be in itertools.product(GRID, GRID):
                yield fam.mu1_general(n, al, be)

    def degree_label(t, p):
        prof = classify_profile(t)
        if p == 1:  # degree 1 is plain filiform, the more specific label
            return prof.classification == "Filiform"
        return prof.classification == "FiliformOfDegree" and prof.degree == p

    return [
        _claim(s, "split chain algebras are associative and filiform of degree p", "n=4..12, 1<=p<=n-3 over Q",
               lambda: _first_failure((t.labels, is_associative(t) and degree_label(t, t.n - _chain_len(t)))
                                      for t in split_families())),
        _claim(s, "split Heisenberg algebras are associative", "p=1..6 over Q",
               lambda: _first_failure((p, is_associative(fam.heisenberg_split(p))) for p in range(1, 7))),
        _claim(s, "mu' tables are associative for arbitrary beta", "n=5..9, 2<=p<=n-3, alpha in {0,1}",
               lambda: _first_failure((t.n, is_associative(t)) for t in mu_primes())),
        _claim(s, "mu1 tables are associative and filiform", "n=4..12, k=1..4 plus alpha,beta grid",
               lambda: _first_failure((t.n, is_associative(t) and classify_profile(t).classification == "Filiform")
                                      for t in mu1s())),
        _claim(s, "filiform parameter map matches transport", "n=5..8, 100 random changes each over Q",
               lambda: _first_failure(
                   (n, _transport_consistency("filiform", {"n": n, "alpha": Fraction(2), "beta": Fraction(-3)},
                                              100, seed + n)[0])
                   for n in (5, 6, 7, 8))),
        _claim(s, "mu1 quadruple is pairwise non-isomorphic", "n=5,6 over GF(5)",
               lambda: _first_failure(
                   (n, _separated(mu1_quadruple(n, F5), workers)[0]) for n in (5, 6))),
        _claim(s, "split chain and split Heisenberg algebras are naturally graded", "n=5..9 over Q",
               lambda: _first_failure(
                   [(f"mu0split n={n} p={p}", _graded_yes(fam.mu0_split(n, p)))
                    for n in range(5, 10) for p in range(1, n - 2)]
                   + [(f"heis p={p}", _graded_yes(fam.heisenberg_split(p))) for p in range(1, 5)])),
        _claim(s, "gr(mu1_2) has the table of mu1_1", "n=6 over Q and GF(5)",
               lambda: all(_graded_matches_mu11(F) for F in (QQ, F5))),
        _claim(s, "mu1_2 is not naturally graded", "n=6 over GF(5)",
               lambda: is_naturally_graded(fam.mu1(2, 6, F5)).answer == "No"),
    ]


def _chain_len(t: AlgebraTable) -> int:
    return sum(1 for lab in t.labels if lab.startswith("e"))


def relabel_graded_mu1(n: int) -> list[list]:
    """Permutation taking gr(mu1_2^n) in its adapted basis to mu1_1^n.

    The adapted basis lists the second generator right after ``e1``; the
    permutation moves it to the end.
    """
    cols = [1] + list(range(3, n + 1)) + [2]
    return [[1 if cols[c] == r + 1 else 0 for c in range(n)] for r in range(n)]


def _graded_matches_mu11(F: FieldSpec, n: int = 6) -> bool:
    gr = associated_graded(fam.mu1(2, n, F))
    return verify_witness(gr.induced_table, fam.mu1(1, n, F), relabel_graded_mu1(n))


def suite_s4(seed: int = 0, workers: int = 1) -> list[Claim]:
    s = "s4"
    F5 = GF(5)

    def quasi(t):
        return is_associative(t) and classify_profile(t).classification == "QuasiFiliform"

    def quasi_tables():
        yield "lambda1", fam.lam(1)
        yield "lambda2", fam.lam(2)
        for k in range(2, 8):
            yield f"pi{k}", fam.pi(k)
        for a in GRID:
            yield f"pi1({a})", fam.pi(1, a)
            if a != -1:
                yield f"pi8({a})", fam.pi(8, a)
        for n in range(6, 13):
            yield f"mu2_1(n={n})", fam.mu2_1(n)
            yield f"mu2_3(n={n})", fam.mu2(3, n)
            yield f"mu2_4(n={n})", fam.mu2(4, n)
            for a in GRID:
                yield f"mu2_2(n={n}, alpha={a})", fam.mu2(2, n, a)

    def charseqs():
        for n in (6, 7):
            yield f"mu2_1 n={n}", fam.mu2_1(n, F5), (n - 2, 1, 1)
            for k in (3, 4):
                yield f"mu2_{k} n={n}", fam.mu2(k, n, F=F5), (n - 2, 2)
            for a in (0, 1, 2):
                yield f"mu2_2 n={n} alpha={a}", fam.mu2(2, n, a, F5), (n - 2, 2)
        for name, t in pi_list(F5).items():
            yield name, t, (3, 2)

    def rank_bound(n):
        t5, tq = fam.mu2_1(n, F5), fam.mu2_1(n)

        def x_of(t):
            def x(A):
                v = [t.field.zero] * n
                v[0] = t.field.one
                v[n - 2] = t.field(A)
                return v
            return x
        return (rank_bound_check(t5, x_of(t5), n - 3, params=range(1, 5))
                and rank_bound_check(tq, x_of(tq), n - 3, samples=50, seed=seed))

    pi_params = [("pi", {"alpha1": 0, "alpha2": Fraction(2), "beta1": 0, "beta2": Fraction(5)}),
                 ("pi", {"alpha1": Fraction(2), "alpha2": Fraction(3), "beta1": 0, "beta2": Fraction(8)}),
                 ("pi", {"alpha1": Fraction(-1, 2), "alpha2": Fraction(1, 3), "beta1": 0,
                         "beta2": Fraction(-2, 3)})]
    map_cases = ([("lambda", {"alpha2": a}) for a in (Fraction(3), Fraction(-1, 2))]
                 + pi_params
                 + [("mu2", {"n": n, "alpha1": Fraction(3), "alpha2": Fraction(2)}) for n in (6, 7)]
                 + [("mu2", {"n": 7, "alpha1": Fraction(1, 2), "alpha2": 0})])

    def fixed_points():
        for n in (6, 7):
            for a in (Fraction(0), Fraction(1), Fraction(-3, 2)):
                yield (f"mu2_2 n={n} alpha={a}",
                       _fixed_point("mu2", {"n": n, "alpha1": a, "alpha2": 0},
                                    fam.FamilyId("mu2", n, 2, alpha=a), 100, seed)[0])
        for a in (Fraction(0), Fraction(1), Fraction(2), Fraction(-1, 3)):
            yield (f"pi1 alpha={a}",
                   _fixed_point("pi", {"alpha1": 0, "alpha2": a, "beta1": 0, "beta2": 0},
                                fam.FamilyId("pi", k=1, alpha=a), 100, seed)[0])

    return [
        _claim(s, "lambda, pi and mu2 tables are associative and quasi-filiform",
               "n=6..12 with parameter grid over Q",
               lambda: _first_failure((name, quasi(t)) for name, t in quasi_tables())),
        _claim(s, "restriction system agrees with associativity of the (3,2) table",
               "(alpha1, alpha2, beta1, beta2) in {-2..2}^4 over Q",
               lambda: _first_failure(
                   (v, fam.restriction_system_check(*v) == is_associative(fam.pi_general(*v)))
                   for v in itertools.product(range(-2, 3), repeat=4))),
        _claim(s, "characteristic sequences of the quasi-filiform families", "n=6,7 exhaustive over GF(5)",
               lambda: _first_failure(
                   (name, tuple(char_sequence(t, "exhaustive").sequence) == want)
                   for name, t, want in charseqs())),
        _claim(s, "rank of L(e1 + A e_(n-1)) is at most n-3 in mu2_1", "n=6,7: all A in GF(5)*, 50 rationals",
               lambda: _first_failure((n, rank_bound(n)) for n in (6, 7))),
        _claim(s, "lambda, pi and mu2 parameter maps match transport", "100 random changes per instance over Q",
               lambda: _first_failure(
                   (f"{case} {params}", _transport_consistency(case, params, 100, seed)[0])
                   for case, params in map_cases)),
        _claim(s, "alpha is fixed under re-normalization of mu2_2 and pi1", "100 random changes per instance over Q",
               lambda: _first_failure(fixed_points())),
        _claim(s, "lambda1 and lambda2 are distinct", "over GF(2) and GF(3)",
               lambda: _first_failure((p, _separated(lambda_pair(GF(p)), workers)[0]) for p in (2, 3))),
        _claim(s, "pi list is pairwise non-isomorphic", "pi1(0), pi1(1), pi2..pi7, pi8(0), pi8(2) over GF(5)",
               lambda: _separated(pi_list(F5), workers)),
        _claim(s, "mu2 list is pairwise non-isomorphic", "n=6 over GF(5)",
               lambda: _separated(mu2_list(6, F5), workers)),
        _claim(s, "lambda1, lambda2 and mu2_1 are naturally graded", "mu2_1 at n=6..9 over Q",
               lambda: _first_failure(
                   [("lambda1", _graded_yes(fam.lam(1))), ("lambda2", _graded_yes(fam.lam(2)))]
                   + [(f"mu2_1 n={n}", _graded_yes(fam.mu2_1(n))) for n in range(6, 10)])),
    ]


def suite_census(seed: int = 0, workers: int = 1, dim: int = 3) -> list[Claim]:
    s = "census"
    claims = []
    scopes = [(d, 2) for d in range(1, dim + 1)] + ([(2, 3)] if dim >= 2 else [])
    for d, p in scopes:
        scale = f"dim {d} over GF({p})"
        try:
            report = run_census(d, GF(p), classify=True, workers=workers)
        except Exception as exc:
            claims.append(Claim(s, "census completes", scale, False, f"{type(exc).__name__}: {exc}"))
            continue
        total = sum(c.orbit_size for c in report.classes)
        claims.append(Claim(s, "iso classes partition the nilpotent tables", scale,
                            total == report.nilpotent_count,
                            f"{report.iso_class_count} classes, {report.nilpotent_count} tables"))
        for v in report.verdicts:
            claims.append(Claim(s, v.name, scale, v.passed, f"{v.checked} tables checked"))
    return claims


def run_suites(names, seed: int = 0, workers: int = 1, census_dim: int = 3) -> list[Claim]:
    out: list[Claim] = []
    for name in names:
        if name == "s2":
            out += suite_s2(seed, workers)
        elif name == "s3":
            out += suite_s3(seed, workers)
        elif name == "s4":
            out += suite_s4(seed, workers)
        elif name == "census":
            out += suite_census(seed, workers, census_dim)
        else:
            raise ValueError(f"unknown suite {name!r}")
    return out
