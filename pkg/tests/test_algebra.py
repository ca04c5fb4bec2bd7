import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from nilalg import families as fam
from nilalg.algebra import (AlgebraTable, Subspace, associativity_defect, centers, classify_profile,
                            is_associative, is_commutative, multiply, nilindex, power_series,
                            product_space)
from nilalg.errors import DimensionMismatch, NotNilpotentInput
from nilalg.field import GF, QQ
from nilalg.iso import transport

from conftest import fields, invertible, random_invertible, transported_family_tables, triangular_tables


def brute_associators(a):
    """All (i, j, k) with (e_i e_j) e_k != e_i (e_j e_k), straight from the definition."""
    bad = []
    for i, j, k in itertools.product(range(1, a.n + 1), repeat=3):
        ei, ej, ek = a.basis_vector(i), a.basis_vector(j), a.basis_vector(k)
        if a.mul(a.mul(ei, ej), ek) != a.mul(ei, a.mul(ej, ek)):
            bad.append((i, j, k))
    return bad


def brute_centers(a):
    """Left/right/two-sided annihilator sizes by scanning every vector of a finite field."""
    F, n = a.field, a.n
    basis = [a.basis_vector(j) for j in range(1, n + 1)]
    left = right = both = 0
    for v in itertools.product(range(F.p), repeat=n):
        v = list(v)
        lz = all(not any(a.mul(v, e)) for e in basis)
        rz = all(not any(a.mul(e, v)) for e in basis)
        left += lz
        right += rz
        both += lz and rz
    return left, right, both


# --- table basics ----------------------------------------------------------

def test_multiply_chain():
    a = fam.mu0(4)
    assert multiply(a, [0, 1, 0, 0], [1, 0, 0, 0]) == [0, 0, 1, 0]
    assert multiply(a, [1, 0, 0, 0], [0, 1, 0, 0]) == [0, 0, 1, 0]


def test_muprime_instance_product():
    a = fam.mu_prime(6, 2, 1, [[0, 3], [0, 0]])
    f1, f2 = a.basis_vector(5), a.basis_vector(6)
    assert multiply(a, f1, f2) == [0, 0, 0, 3, 0, 0]


def test_multiply_by_zero():
    a = fam.pi(8, 2)
    assert multiply(a, [0] * 5, [1, 2, 3, 4, 5]) == [0] * 5


def test_multiply_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        AlgebraTable(2, QQ, {(1, 1): [1, 0, 0]})


def test_zero_products_dropped_for_equality():
    assert AlgebraTable(2, QQ, {(1, 1): [0, 0]}) == AlgebraTable.zero(2)


def test_labels_ignored_by_equality():
    a = fam.mu0(3)
    assert a.with_labels(["x", "y", "z"]) == a


# --- associativity ------------------------------------------------------------

@pytest.mark.parametrize("n", range(2, 11))
def test_chain_is_associative(n):
    assert associativity_defect(fam.mu0(n)) == []


def test_defect_example():
    a = AlgebraTable.from_sparse(3, QQ, [(1, 1, 2, 1), (2, 1, 3, 1)])
    d = associativity_defect(a)
    assert (1, 1, 1) in d
    assert d == brute_associators(a) == sorted(d)


def test_zero_table_associative():
    assert associativity_defect(AlgebraTable.zero(4)) == []


@given(st.data())
def test_defect_matches_brute_force(data):
    F = data.draw(fields())
    a = data.draw(triangular_tables(F, data.draw(st.integers(1, 4))))
    assert associativity_defect(a) == brute_associators(a)


# --- power series and profiles ----------------------------------------------

@pytest.mark.parametrize("n", range(1, 9))
def test_chain_power_series(n):
    ps = power_series(fam.mu0(n))
    assert ps.dims == [n + 1 - i for i in range(1, n + 2)]
    assert nilindex(fam.mu0(n)) == n + 1


def test_zero_algebra_power_series():
    assert power_series(AlgebraTable.zero(3)).dims == [3, 0]
    assert nilindex(AlgebraTable.zero(3)) == 2


def test_dim_zero_convention():
    a = AlgebraTable.zero(0)
    assert nilindex(a) == 1


def test_mu11_power_series():
    assert power_series(fam.mu1(1, 6)).dims == [6, 4, 3, 2, 1, 0]


def test_idempotent_not_nilpotent():
    a = AlgebraTable.from_sparse(1, QQ, [(1, 1, 1, 1)])
    assert nilindex(a) is None
    with pytest.raises(NotNilpotentInput):
        classify_profile(a)


def test_power_series_cutoff():
    a = AlgebraTable.from_sparse(3, QQ, [(1, 1, 1, 1), (2, 2, 3, 1)])
    ps = power_series(a)
    assert not ps.nilpotent and len(ps) <= 2 * 3 + 1


@pytest.mark.parametrize("table,label", [
    (fam.mu0(5), "NullFiliform"),
    (fam.mu0_split(7, 2), "FiliformOfDegree(2)"),
    (fam.mu0_split(9, 3), "FiliformOfDegree(3)"),
    (fam.mu1(3, 6), "Filiform"),
    (fam.mu2_1(7), "QuasiFiliform"),
    (fam.pi(5), "QuasiFiliform"),
])
def test_profile_labels(table, label):
    assert classify_profile(table).label == label


@given(st.data())
def test_powers_multiply_into_sum(data):
    F = data.draw(fields())
    a = data.draw(transported_family_tables(F))
    ps = power_series(a)
    for i, ai in enumerate(ps.terms, start=1):
        for j, aj in enumerate(ps.terms, start=1):
            target = ps.terms[i + j - 1] if i + j - 1 < len(ps.terms) else Subspace(F, a.n)
            assert product_space(a, ai, aj).issubset(target)


@given(st.data())
def test_power_series_strictly_decreasing(data):
    F = data.draw(fields())
    a = data.draw(transported_family_tables(F))
    ps = power_series(a)
    assert ps.nilpotent
    assert all(x > y for x, y in zip(ps.dims, ps.dims[1:]))
    assert ps.dims[-1] == 0


def test_non_associative_series_can_stall():
    # (e2 e2) lands in A^4 through A^2 A^2 although A^3 = span(e4) already
    a = AlgebraTable.from_sparse(4, GF(2), [(1, 1, 2, 1), (2, 2, 4, 1)])
    assert power_series(a).dims == [4, 2, 1, 1, 0]


@given(st.data())
def test_power_series_terminates(data):
    F = data.draw(fields())
    a = data.draw(triangular_tables(F, data.draw(st.integers(1, 5))))
    ps = power_series(a)
    assert len(ps) <= 2 * a.n + 1
    assert ps.nilpotent == (ps.dims[-1] == 0)


# --- centers ----------------------------------------------------------------------

def test_chain_centers():
    c = centers(fam.mu0(5))
    assert c.dims == (1, 1, 1)
    assert c.center.rows == ((0, 0, 0, 0, 1),) or [list(r) for r in c.center.rows] == [[0, 0, 0, 0, 1]]


def test_zero_algebra_center_is_everything():
    assert centers(AlgebraTable.zero(3)).dims == (3, 3, 3)


def test_mu13_centers():
    # e6 kills from the left; from the right e4 - e6 is killed too, since e1e4 = e1e6 = e5
    c = centers(fam.mu1(3, 6))
    assert c.dims == (2, 2, 1)
    assert c.right.contains([0, 0, 0, 1, 0, -1])
    assert brute_centers(fam.mu1(3, 6, GF(3))) == (9, 9, 3)


@pytest.mark.parametrize("k,dims", [(1, (2, 2, 2)), (2, (1, 1, 1)), (4, (1, 1, 1))])
def test_mu1_centers(k, dims):
    assert centers(fam.mu1(k, 6)).dims == dims
    assert brute_centers(fam.mu1(k, 6, GF(3))) == tuple(3 ** d for d in dims)


@pytest.mark.parametrize("p", [2, 3])
@pytest.mark.parametrize("name", ["mu0(4)", "mu1_3(4)", "mu1_4(4)", "heis(2)", "mu0split(4,1)"])
def test_centers_match_vector_scan(p, name):
    F = GF(p)
    a = {"mu0(4)": fam.mu0(4, F), "mu1_3(4)": fam.mu1(3, 4, F), "mu1_4(4)": fam.mu1(4, 4, F),
         "heis(2)": fam.heisenberg_split(2, F), "mu0split(4,1)": fam.mu0_split(4, 1, F)}[name]
    left, right, both = brute_centers(a)
    c = centers(a)
    assert (p ** c.left.dim, p ** c.right.dim, p ** c.center.dim) == (left, right, both)


@given(st.data())
def test_random_table_centers_match_scan(data):
    F = GF(data.draw(st.sampled_from([2, 3])))
    a = data.draw(triangular_tables(F, data.draw(st.integers(1, 4))))
    left, right, both = brute_centers(a)
    c = centers(a)
    assert (F.p ** c.left.dim, F.p ** c.right.dim, F.p ** c.center.dim) == (left, right, both)


@given(st.data())
def test_center_dims_invariant_under_transport(data):
    F = data.draw(fields())
    n = data.draw(st.integers(1, 4))
    a = data.draw(triangular_tables(F, n))
    m = data.draw(invertible(F, n))
    assert centers(transport(a, m)).dims == centers(a).dims


def test_commutative():
    assert is_commutative(fam.mu1(1, 6))
    assert not is_commutative(fam.mu1(4, 6))
    assert is_commutative(fam.pi(6)) and not is_commutative(fam.pi(7))


# --- subspaces -------------------------------------------------------------------

def test_subspace_canonical_equality():
    F = QQ
    u = Subspace(F, 3, [[1, 1, 0], [0, 1, 1]])
    v = Subspace(F, 3, [[1, 2, 1], [2, 2, 0]])
    assert u == v
    assert u.intersect(Subspace(F, 3, [[1, 0, 0], [0, 0, 1]])).dim == 1
    assert (u + Subspace(F, 3, [[0, 0, 1]])).dim == 3


def test_complement_coordinates_are_nonpivots():
    s = Subspace(QQ, 4, [[0, 1, 0, 0], [0, 0, 0, 1]])
    assert s.complement_coordinates() == [0, 2]


def test_associativity_survives_transport():
    rng = random.Random(3)
    for name, a in [("pi8", fam.pi(8, Fraction(1, 3))), ("mu2_3", fam.mu2(3, 7))]:
        b = transport(a, random_invertible(QQ, a.n, rng))
        assert is_associative(b), name
