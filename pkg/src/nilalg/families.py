"""Constructors for the classified nilpotent associative algebras.

Besides the normal forms (``mu0``, ``mu1_k``, ``lambda_k``, ``pi_k``,
``mu2_k`` and the split families) this module carries the general tables
that the classification starts from, the maps that send their
parameters to new ones under a templated change of generators, and the
normalization step that picks the coefficients reaching a normal form.

Basis conventions: chain elements ``e1..e_m`` come first, then ``f1..f_p``
for the split and degree-p families; the quasi-filiform families keep the
literal indices ``e1..en`` of their tables.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Mapping, Sequence

from .algebra import AlgebraTable
from .errors import DegenerateChange, InvalidDimension, InvalidParameter
from .field import QQ, FieldSpec, Matrix


# ---------------------------------------------------------------------------
# table builders
# ---------------------------------------------------------------------------

class _Builder:
    def __init__(self, n: int, F: FieldSpec):
        self.n, self.F = n, F
        self.entries: list[tuple[int, int, int, object]] = []

    def put(self, i: int, j: int, k: int, c=1):
        if F_nonzero(self.F, c):
            self.entries.append((i, j, k, c))

    def chain(self, m: int):
        """``e_i e_j = e_{i+j}`` for ``2 <= i+j <= m``."""
        for i in range(1, m):
            for j in range(1, m + 1 - i):
                self.put(i, j, i + j)

    def table(self, labels=None) -> AlgebraTable:
        return AlgebraTable.from_sparse(self.n, self.F, self.entries, labels)


def F_nonzero(F: FieldSpec, c) -> bool:
    return F(c) != 0


def _e_labels(n: int) -> list[str]:
    return [f"e{i}" for i in range(1, n + 1)]


def _split_labels(m: int, p: int) -> list[str]:
    return [f"e{i}" for i in range(1, m + 1)] + [f"f{i}" for i in range(1, p + 1)]


def mu0(n: int, F: FieldSpec = QQ) -> AlgebraTable:
    """Null-filiform ``mu_0^n``: ``e_i e_j = e_{i+j}``."""
    if n < 1:
        raise InvalidDimension("mu0 needs n >= 1")
    b = _Builder(n, F)
    b.chain(n)
    return b.table(_e_labels(n))


def mu0_split(n: int, p: int, F: FieldSpec = QQ) -> AlgebraTable:
    """``mu_0^{n-p} ⊕ F^p`` with basis ``e1..e_{n-p}, f1..f_p``."""
    if p < 1 or n < p + 2:
        raise InvalidDimension("mu0 ⊕ F^p needs p >= 1 and n >= p + 2")
    b = _Builder(n, F)
    b.chain(n - p)
    return b.table(_split_labels(n - p, p))


def heisenberg_split(p: int, F: FieldSpec = QQ) -> AlgebraTable:
    """``H_1 ⊕ F^{p-1}``: ``e1 f1 = -f1 e1 = e2``, basis ``e1, e2, f1..f_p``."""
    if p < 1:
        raise InvalidDimension("Heisenberg split family needs p >= 1")
    b = _Builder(p + 2, F)
    b.put(1, 3, 2, 1)
    b.put(3, 1, 2, -1)
    return b.table(_split_labels(2, p))


def mu_prime(n: int, p: int, alpha, beta: Sequence[Sequence], F: FieldSpec = QQ) -> AlgebraTable:
    """Filiform of degree p: chain on ``e1..e_{n-p}``, ``e1 f1 = alpha e_{n-p}``,
    ``f_i f_j = beta[i][j] e_{n-p}``."""
    if p < 1 or n <= p + 2:
        raise InvalidDimension("mu' needs n > p + 2")
    if F(alpha) not in (F(0), F(1)):
        raise InvalidParameter("alpha of mu' must be 0 or 1")
    if len(beta) != p or any(len(r) != p for r in beta):
        raise InvalidParameter("beta must be a p x p matrix")
    m = n - p
    b = _Builder(n, F)
    b.chain(m)
    b.put(1, m + 1, m, alpha)
    for i in range(p):
        for j in range(p):
            b.put(m + 1 + i, m + 1 + j, m, beta[i][j])
    return b.table(_split_labels(m, p))


def mu1_general(n: int, alpha, beta, F: FieldSpec = QQ) -> AlgebraTable:
    """Filiform table before normalization: ``e1 e_n = alpha e_{n-1}``, ``e_n e_n = beta e_{n-1}``."""
    if n <= 3:
        raise InvalidDimension("filiform families need n > 3")
    b = _Builder(n, F)
    b.chain(n - 1)
    b.put(1, n, n - 1, alpha)
    b.put(n, n, n - 1, beta)
    return b.table(_e_labels(n))


_MU1 = {1: (0, 0), 2: (0, 1), 3: (1, 0), 4: (1, 1)}


def mu1(k: int, n: int, F: FieldSpec = QQ) -> AlgebraTable:
    if k not in _MU1:
        raise InvalidParameter("mu1_k needs k in 1..4")
    return mu1_general(n, *_MU1[k], F=F)


def lambda_general(alpha2, F: FieldSpec = QQ) -> AlgebraTable:
    """Five-dimensional ``mu(1,2)`` table with ``e4 e2 = e5 e1 = alpha2 e3``."""
    b = _Builder(5, F)
    b.chain(3)
    b.put(4, 1, 5)
    b.put(4, 2, 3, alpha2)
    b.put(5, 1, 3, alpha2)
    return b.table(_e_labels(5))


def lam(k: int, F: FieldSpec = QQ) -> AlgebraTable:
    if k not in (1, 2):
        raise InvalidParameter("lambda_k needs k in {1, 2}")
    return lambda_general(0 if k == 1 else 1, F)


def pi_general(alpha1, alpha2, beta1, beta2, F: FieldSpec = QQ) -> AlgebraTable:
    """Five-dimensional table with characteristic sequence (3,2) before normalization.

    Associative exactly when :func:`restriction_system_check` holds.
    """
    b = _Builder(5, F)
    b.chain(3)
    b.put(1, 4, 5)
    b.put(4, 1, 2, alpha1)
    b.put(4, 1, 5, alpha2)
    b.put(4, 2, 3, F(alpha1) * (F(alpha2) + 1))
    b.put(4, 4, 2, beta1)
    b.put(4, 4, 5, beta2)
    b.put(4, 5, 3, F(alpha2) * F(beta1))
    b.put(5, 1, 3, alpha1)
    b.put(5, 4, 3, beta1)
    return b.table(_e_labels(5))


def pi_parameters(k: int, alpha=None, F: FieldSpec = QQ) -> tuple:
    """``(alpha1, alpha2, beta1, beta2)`` of ``pi_k`` inside :func:`pi_general`."""
    if k in (1, 8):
        if alpha is None:
            raise InvalidParameter(f"pi{k} needs alpha")
        a = F(alpha)
    elif alpha is not None:
        raise InvalidParameter(f"pi{k} takes no alpha")
    table = {
        1: lambda: (0, a, 0, 0),
        2: lambda: (0, 1, 0, 1),
        3: lambda: (0, 0, 0, 1),
        4: lambda: (1, -1, 0, 0),
        5: lambda: (1, 1, 0, 2),
        6: lambda: (0, 1, 1, 0),
        7: lambda: (0, -1, 1, 0),
        8: lambda: (1 - a, a, -a, 1 + a),
    }
    if k not in table:
        raise InvalidParameter("pi_k needs k in 1..8")
    return tuple(F(v) for v in table[k]())


def pi(k: int, alpha=None, F: FieldSpec = QQ) -> AlgebraTable:
    return pi_general(*pi_parameters(k, alpha, F), F=F)


def mu2_1(n: int, F: FieldSpec = QQ) -> AlgebraTable:
    """``mu_{2,1}^n``: chain on ``e1..e_{n-2}`` and ``e_{n-1} e1 = e_n``."""
    if n <= 5:
        raise InvalidDimension("mu2 families need n > 5")
    b = _Builder(n, F)
    b.chain(n - 2)
    b.put(n - 1, 1, n)
    return b.table(_e_labels(n))


def mu2_general(n: int, alpha1, alpha2, F: FieldSpec = QQ) -> AlgebraTable:
    """``e1 e_{n-1} = e_n``, ``e_{n-1} e1 = alpha1 e_n``, ``e_{n-1} e_{n-1} = alpha2 e_n``."""
    if n <= 5:
        raise InvalidDimension("mu2 families need n > 5")
    b = _Builder(n, F)
    b.chain(n - 2)
    b.put(1, n - 1, n)
    b.put(n - 1, 1, n, alpha1)
    b.put(n - 1, n - 1, n, alpha2)
    return b.table(_e_labels(n))


def mu2(k: int, n: int, alpha=None, F: FieldSpec = QQ) -> AlgebraTable:
    if k == 1:
        return mu2_1(n, F)
    if k == 2:
        if alpha is None:
            raise InvalidParameter("mu2_2 needs alpha")
        return mu2_general(n, alpha, 0, F)
    if k == 3:
        return mu2_general(n, 1, 1, F)
    if k == 4:
        return mu2_general(n, 0, 1, F)
    raise InvalidParameter("mu2_k needs k in 1..4")


# ---------------------------------------------------------------------------
# family identifiers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FamilyId:
    """Names one classified algebra.

    ``kind`` is one of ``mu0, mu0split, heis, muprime, mu1, lambda, pi, mu2``.
    """

    kind: str
    n: int | None = None
    k: int | None = None
    p: int | None = None
    alpha: object = None
    beta: tuple | None = None

    _PATTERN = re.compile(r"^(mu0split|mu0|heis|muprime|mu1|mu2|lambda|pi)[_.]?(\d*)$")

    @classmethod
    def parse(cls, text: str, n: int | None = None, p: int | None = None,
              alpha=None, beta=None) -> "FamilyId":
        """Parse ids such as ``mu0``, ``mu1_3``, ``pi8``, ``lambda2``, ``mu2_2``."""
        m = cls._PATTERN.match(text.strip().lower())
        if not m:
            raise InvalidParameter(f"unknown family id {text!r}")
        kind, num = m.group(1), m.group(2)
        k = int(num) if num else None
        if kind in ("mu1", "mu2", "lambda", "pi") and k is None:
            raise InvalidParameter(f"{kind} needs an index, e.g. {kind}_1")
        if kind in ("mu0", "mu0split", "heis", "muprime") and k is not None:
            raise InvalidParameter(f"{kind} takes no index")
        if beta is not None:
            beta = tuple(tuple(r) for r in beta)
        return cls(kind, n, k, p, alpha, beta)

    @property
    def name(self) -> str:
        s = self.kind if self.k is None else f"{self.kind}_{self.k}"
        if self.kind in ("lambda", "pi"):
            s = f"{self.kind}{self.k}"
        args = []
        if self.n is not None and self.kind not in ("lambda", "pi", "heis"):
            args.append(f"n={self.n}")
        if self.p is not None:
            args.append(f"p={self.p}")
        if self.alpha is not None:
            args.append(f"alpha={self.alpha}")
        return s + (f"({', '.join(args)})" if args else "")

    def build(self, F: FieldSpec = QQ) -> AlgebraTable:
        return build(self, F)


def _need(v, what):
    if v is None:
        raise InvalidParameter(f"missing {what}")
    return v


def build(fid: FamilyId, F: FieldSpec = QQ) -> AlgebraTable:
    kind = fid.kind
    if kind == "mu0":
        return mu0(_need(fid.n, "dimension"), F)
    if kind == "mu0split":
        return mu0_split(_need(fid.n, "dimension"), _need(fid.p, "p"), F)
    if kind == "heis":
        return heisenberg_split(_need(fid.p, "p"), F)
    if kind == "muprime":
        n, p = _need(fid.n, "dimension"), _need(fid.p, "p")
        beta = fid.beta if fid.beta is not None else [[0] * p for _ in range(p)]
        return mu_prime(n, p, fid.alpha if fid.alpha is not None else 0, beta, F)
    if kind == "mu1":
        return mu1(fid.k, _need(fid.n, "dimension"), F)
    if kind == "lambda":
        return lam(fid.k, F)
    if kind == "pi":
        return pi(fid.k, fid.alpha, F)
    if kind == "mu2":
        return mu2(fid.k, _need(fid.n, "dimension"), fid.alpha, F)
    raise InvalidParameter(f"unknown family kind {kind!r}")


# ---------------------------------------------------------------------------
# associativity conditions on the five-dimensional pi template
# ---------------------------------------------------------------------------

def restriction_system_check(alpha1, alpha2, beta1, beta2, F: FieldSpec = QQ) -> bool:
    """Both polynomial identities that make :func:`pi_general` associative."""
    a1, a2, b1, b2 = (F(v) for v in (alpha1, alpha2, beta1, beta2))
    first = F.reduce(a1 * b2 - (a1 * a1 * (a2 + 1) + b1 * (a2 * a2 - 1)))
    second = F.reduce(b1 * (a1 * (a2 + 1) + b2 * (a2 - 1)))
    return first == 0 and second == 0


# ---------------------------------------------------------------------------
# basis changes and parameter maps
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BasisChange:
    """Invertible matrix whose columns are the new basis vectors.

    ``coefficients`` keeps the named coefficients when the change follows a
    normalization template: ``A``/``B`` are the coordinate lists (1-based dicts) of
    the two generator images.
    """

    matrix: Matrix
    coefficients: Mapping | None = dc_field(default=None, compare=False)


CASES = ("filiform", "lambda", "pi", "mu2")


def _coef(seq, k, F):
    """1-based coefficient lookup in a list or dict; missing means zero."""
    if isinstance(seq, Mapping):
        return F(seq.get(k, 0))
    return F(seq[k - 1]) if 1 <= k <= len(seq) else F(0)


def _dense(seq, n, F):
    return [_coef(seq, k, F) for k in range(1, n + 1)]


def _nonzero(F, *vals, what="change"):
    for v in vals:
        if F(v) == 0:
            raise DegenerateChange(f"degenerate {what}: a required factor vanishes")


def parameter_map(case: str, params: Mapping, change: Mapping, F: FieldSpec = QQ) -> dict:
    """New parameters after a templated change of generators.

    ``filiform`` (filiform, params ``n, alpha, beta``; change ``A, B`` over
    ``e1..en``), ``mu2`` (params ``n, alpha1, alpha2``), ``lambda`` (params
    ``alpha2``) and ``pi`` (params ``alpha1, alpha2, beta1, beta2``) take
    changes ``e1' = A1 e1 + A2 e4``, ``e4' = B1 e1 + B2 e4`` in the
    five-dimensional cases.
    """
    if case == "filiform":
        n = int(params["n"])
        al, be = F(params["alpha"]), F(params["beta"])
        A, B = change["A"], change["B"]
        a1, an, bn = _coef(A, 1, F), _coef(A, n, F), _coef(B, n, F)
        _nonzero(F, a1, bn)
        if any(_coef(B, k, F) for k in range(1, n - 2)):
            raise DegenerateChange("template requires B_k = 0 for k <= n-3")
        if _coef(B, n - 2, F) != F.reduce(-be * an * bn * F.inv(a1)):
            raise DegenerateChange("template requires B_{n-2} = -beta A_n B_n / A_1")
        return {"n": n,
                "alpha": F.reduce(al * bn * F.inv(F.reduce(a1 ** (n - 2)))),
                "beta": F.reduce(be * bn * bn * F.inv(F.reduce(a1 ** (n - 1))))}
    if case == "mu2":
        n = int(params["n"])
        al1, al2 = F(params["alpha1"]), F(params["alpha2"])
        A, B = change["A"], change["B"]
        a1, am = _coef(A, 1, F), _coef(A, n - 1, F)
        b1, bm = _coef(B, 1, F), _coef(B, n - 1, F)
        if any(_coef(B, k, F) for k in range(1, n - 2)):
            raise DegenerateChange("template requires B_i = 0 for i <= n-3")
        den = F.reduce(a1 + al2 * am)
        _nonzero(F, a1, den, F.reduce(a1 * bm - am * b1))
        return {"n": n,
                "alpha1": F.div(al1 * a1 + al2 * am, den),
                "alpha2": F.div(al2 * bm, den)}
    if case in ("lambda", "pi"):
        a1, a2 = F(change.get("A1", 0)), F(change.get("A2", 0))
        b1, b2 = F(change.get("B1", 0)), F(change.get("B2", 0))
        if b1 != 0:
            raise DegenerateChange("template requires B1 = 0")
        if case == "lambda":
            al2 = F(params["alpha2"])
            den = F.reduce(a1 + al2 * a2)
            _nonzero(F, a1, b2, den)
            return {"alpha2": F.div(al2 * b2, den)}
        al1, al2 = F(params["alpha1"]), F(params["alpha2"])
        be1, be2 = F(params["beta1"]), F(params["beta2"])
        if al1 == 0 and be1 == 0:
            den = F.reduce(a1 + be2 * a2)
            _nonzero(F, a1, b2, den)
            return {"alpha1": F.zero, "alpha2": F.div(al2 * a1 + be2 * a2, den),
                    "beta1": F.zero, "beta2": F.div(be2 * b2, den)}
        if be1 == 0 and al1 != 0:
            if be2 != F.reduce(al1 * (al2 + 1)):
                raise InvalidParameter("branch e5 in Z^r needs beta2 = alpha1 (alpha2 + 1)")
            d1 = F.reduce(a1 + al1 * a2)
            d2 = F.reduce(a1 + al1 * a2 + al1 * al2 * a2)
            _nonzero(F, a1, b2, d1, d2)
            n1 = F.div(al1 * b2, d1)
            n2 = F.div(al2 * a1, d2)
            return {"alpha1": n1, "alpha2": n2, "beta1": F.zero,
                    "beta2": F.reduce(n1 * (n2 + 1))}
        raise InvalidParameter("only the e5 in Z and e5 in Z^r (beta1 = 0) branches carry maps")
    raise InvalidParameter(f"unknown case {case!r}; expected one of {CASES}")


def general_table(case: str, params: Mapping, F: FieldSpec = QQ) -> AlgebraTable:
    """The pre-normalization table a case's parameters describe."""
    if case == "filiform":
        return mu1_general(int(params["n"]), params["alpha"], params["beta"], F)
    if case == "mu2":
        return mu2_general(int(params["n"]), params["alpha1"], params["alpha2"], F)
    if case == "lambda":
        return lambda_general(params["alpha2"], F)
    if case == "pi":
        return pi_general(params["alpha1"], params["alpha2"], params["beta1"], params["beta2"], F)
    raise InvalidParameter(f"unknown case {case!r}")


def read_parameters(case: str, table: AlgebraTable) -> dict:
    """Recover the parameters of a table already in a case's template form."""
    F, n = table.field, table.n
    if case == "filiform":
        params = {"n": n, "alpha": table.product(1, n)[n - 2], "beta": table.product(n, n)[n - 2]}
    elif case == "mu2":
        params = {"n": n, "alpha1": table.product(n - 1, 1)[n - 1],
                  "alpha2": table.product(n - 1, n - 1)[n - 1]}
    elif case == "lambda":
        params = {"alpha2": table.product(4, 2)[2]}
    elif case == "pi":
        e41 = table.product(4, 1)
        e44 = table.product(4, 4)
        params = {"alpha1": e41[1], "alpha2": e41[4], "beta1": e44[1], "beta2": e44[4]}
    else:
        raise InvalidParameter(f"unknown case {case!r}")
    try:
        ok = general_table(case, params, F) == table
    except (InvalidDimension, InvalidParameter):
        ok = False
    if not ok:
        raise InvalidParameter(f"table is not in the {case} template form")
    return params


def template_change(case: str, table: AlgebraTable, change: Mapping) -> BasisChange:
    """Matrix of a templated change: generator images plus the products they generate."""
    F, n = table.field, table.n
    cols: dict[int, list] = {}
    if case in ("filiform", "mu2"):
        gen2 = n if case == "filiform" else n - 1
        cols[1] = _dense(change["A"], n, F)
        cols[gen2] = _dense(change["B"], n, F)
        top = n - 1 if case == "filiform" else n - 2
        for k in range(2, top + 1):
            cols[k] = table.mul(cols[1], cols[k - 1])
        if case == "mu2":
            cols[n] = table.mul(cols[1], cols[n - 1])
    elif case in ("lambda", "pi"):
        a1, a2 = F(change.get("A1", 0)), F(change.get("A2", 0))
        b1, b2 = F(change.get("B1", 0)), F(change.get("B2", 0))
        cols[1] = [a1, 0, 0, a2, 0]
        cols[4] = [b1, 0, 0, b2, 0]
        cols[1] = [F(v) for v in cols[1]]
        cols[4] = [F(v) for v in cols[4]]
        cols[2] = table.mul(cols[1], cols[1])
        cols[3] = table.mul(cols[1], cols[2])
        cols[5] = table.mul(cols[4], cols[1]) if case == "lambda" else table.mul(cols[1], cols[4])
    else:
        raise InvalidParameter(f"unknown case {case!r}")
    m = Matrix.from_columns(F, [cols[k] for k in range(1, n + 1)])
    return BasisChange(m, dict(change))


# ---------------------------------------------------------------------------
# normalization to the listed normal forms
# ---------------------------------------------------------------------------

def exact_root(F: FieldSpec, x, k: int):
    """Some ``y`` in F with ``y**k == x``, or None."""
    x = F(x)
    if k == 1:
        return x
    if F.p:
        for y in range(F.p):
            if pow(y, k, F.p) == x:
                return y
        return None
    if x == 0:
        return Fraction(0)
    sign = 1
    if x < 0:
        if k % 2 == 0:
            return None
        sign = -1
    num, den = abs(x.numerator), x.denominator
    rn, rd = _int_root(num, k), _int_root(den, k)
    if rn is None or rd is None:
        return None
    return Fraction(sign * rn, rd)


def _int_root(m: int, k: int):
    lo, hi = 0, 1
    while hi ** k < m:
        hi *= 2
    while lo < hi:
        mid = (lo + hi) // 2
        if mid ** k < m:
            lo = mid + 1
        else:
            hi = mid
    return lo if lo ** k == m else None


@dataclass(frozen=True)
class Normalization:
    family: FamilyId
    change: dict


def normalize(case: str, params: Mapping, F: FieldSpec = QQ) -> Normalization:
    """Pick the change that reaches a normal form, case by case.

    Raises :class:`InvalidParameter` when a needed root does not exist in F.
    """
    inv = F.inv
    if case == "filiform":
        n = int(params["n"])
        al, be = F(params["alpha"]), F(params["beta"])
        A = {1: F.one}
        if al == 0:
            if be == 0:
                return Normalization(FamilyId("mu1", n, 1), {"A": A, "B": {n: F.one}})
            r = exact_root(F, inv(be), 2)
            if r is None:
                raise InvalidParameter("normalizing beta needs a square root of 1/beta")
            return Normalization(FamilyId("mu1", n, 2), {"A": A, "B": {n - 2: 0, n: r}})
        if be == 0:
            return Normalization(FamilyId("mu1", n, 3), {"A": A, "B": {n: inv(al)}})
        a1 = exact_root(F, F.div(al * al, be), n - 3)
        if a1 is None or a1 == 0:
            raise InvalidParameter("normalizing needs an (n-3)-th root of alpha^2/beta")
        bn = F.div(F.reduce(a1 ** (n - 2)), al)
        return Normalization(FamilyId("mu1", n, 4), {"A": {1: a1}, "B": {n: bn}})
    if case == "mu2":
        n = int(params["n"])
        al1, al2 = F(params["alpha1"]), F(params["alpha2"])
        if al2 == 0:
            return Normalization(FamilyId("mu2", n, 2, alpha=al1), {"A": {1: F.one}, "B": {n - 1: F.one}})
        if al1 == 1:
            return Normalization(FamilyId("mu2", n, 3), {"A": {1: F.one}, "B": {n - 1: inv(al2)}})
        am = F.div(-al1, al2)
        bm = F.div(1 + al2 * am, al2)
        return Normalization(FamilyId("mu2", n, 4), {"A": {1: F.one, n - 1: am}, "B": {n - 1: bm}})
    if case == "lambda":
        al2 = F(params["alpha2"])
        if al2 == 0:
            return Normalization(FamilyId("lambda", k=1), {"A1": 1, "B2": 1})
        return Normalization(FamilyId("lambda", k=2), {"A1": 1, "B2": inv(al2)})
    if case == "pi":
        al1, al2 = F(params["alpha1"]), F(params["alpha2"])
        be1, be2 = F(params["beta1"]), F(params["beta2"])
        if al1 == 0 and be1 == 0:
            if be2 == 0:
                return Normalization(FamilyId("pi", k=1, alpha=al2), {"A1": 1, "B2": 1})
            if al2 == 1:
                return Normalization(FamilyId("pi", k=2), {"A1": 1, "B2": inv(be2)})
            a2 = F.div(-al2, be2)
            return Normalization(FamilyId("pi", k=3),
                                 {"A1": 1, "A2": a2, "B2": F.div(1 + be2 * a2, be2)})
        if be1 == 0:
            if al2 == 0:
                return Normalization(FamilyId("pi", k=8, alpha=F.zero), {"A1": 1, "B2": inv(al1)})
            if al2 == F(-1):
                return Normalization(FamilyId("pi", k=4), {"A1": 1, "B2": inv(al1)})
            a2 = F.div(al2 - 1, al1 * (al2 + 1))
            return Normalization(FamilyId("pi", k=5),
                                 {"A1": 1, "A2": a2, "B2": F.div(1 + al1 * a2, al1)})
        raise InvalidParameter("normalization implemented for the beta1 = 0 branches only")
    raise InvalidParameter(f"unknown case {case!r}")


def random_template_change(case: str, params: Mapping, rng, F: FieldSpec = QQ) -> dict:
    """Random coefficients satisfying a case's template and nondegeneracy conditions.

    ``rng`` is a ``random.Random``; rationals have small height.
    """
    def scalar(nonzero=False):
        while True:
            if F.p:
                v = rng.randrange(F.p)
            else:
                v = Fraction(rng.randint(-9, 9), rng.randint(1, 5))
            if v or not nonzero:
                return F(v)

    for _ in range(1000):
        if case == "filiform":
            n = int(params["n"])
            A = {k: scalar() for k in range(1, n + 1)}
            A[1] = scalar(True)
            bn = scalar(True)
            B = {n - 1: scalar(), n: bn,
                 n - 2: F.reduce(-F(params["beta"]) * A[n] * bn * F.inv(A[1]))}
            change = {"A": A, "B": B}
        elif case == "mu2":
            n = int(params["n"])
            A = {k: scalar() for k in range(1, n + 1)}
            A[1] = scalar(True)
            B = {n - 2: scalar(), n - 1: scalar(True), n: scalar()}
            change = {"A": A, "B": B}
        elif case in ("lambda", "pi"):
            change = {"A1": scalar(True), "A2": scalar(), "B1": F.zero, "B2": scalar(True)}
        else:
            raise InvalidParameter(f"unknown case {case!r}")
        try:
            parameter_map(case, params, change, F)
        except DegenerateChange:
            continue
        return change
    raise DegenerateChange("no admissible change found")
