import random
from fractions import Fraction

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from nilalg import families as fam
from nilalg.algebra import AlgebraTable
from nilalg.field import GF, QQ, FieldSpec, Matrix, rank

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

SMALL_PRIMES = (2, 3, 5, 7)


def scalars(F: FieldSpec):
    if F.p:
        return st.integers(0, F.p - 1)
    return st.builds(Fraction, st.integers(-6, 6), st.integers(1, 4))


@st.composite
def matrices(draw, F: FieldSpec, rows: int, cols: int):
    return Matrix(F, [[draw(scalars(F)) for _ in range(cols)] for _ in range(rows)])


@st.composite
def fields(draw):
    p = draw(st.sampled_from((0,) + SMALL_PRIMES))
    return QQ if p == 0 else GF(p)


def nonzero_scalars(F: FieldSpec):
    if F.p:
        return st.integers(1, F.p - 1)
    return st.builds(Fraction, st.integers(1, 6) | st.integers(-6, -1), st.integers(1, 4))


@st.composite
def invertible(draw, F: FieldSpec, n: int):
    """P * L * U with L unit lower triangular and U upper triangular with nonzero diagonal."""
    lower = [[1 if i == j else (draw(scalars(F)) if j < i else 0) for j in range(n)] for i in range(n)]
    upper = [[draw(nonzero_scalars(F)) if i == j else (draw(scalars(F)) if j > i else 0)
              for j in range(n)] for i in range(n)]
    perm = draw(st.permutations(range(n)))
    p = Matrix(F, [[1 if perm[i] == j else 0 for j in range(n)] for i in range(n)], cols=n)
    return p @ Matrix(F, lower, cols=n) @ Matrix(F, upper, cols=n)


@st.composite
def triangular_tables(draw, F: FieldSpec, n: int, density: float = 0.4):
    """Strictly triangular tables: e_i e_j lies in span(e_k, k > max(i, j)).

    Not necessarily associative; without associativity the power series may stall.
    """
    entries = []
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            for k in range(max(i, j) + 1, n + 1):
                if draw(st.floats(0, 1)) < density:
                    entries.append((i, j, k, draw(scalars(F))))
    return AlgebraTable.from_sparse(n, F, entries)


def random_invertible(F: FieldSpec, n: int, rng: random.Random) -> Matrix:
    while True:
        if F.p:
            rows = [[rng.randrange(F.p) for _ in range(n)] for _ in range(n)]
        else:
            rows = [[Fraction(rng.randint(-3, 3), rng.randint(1, 3)) for _ in range(n)] for _ in range(n)]
        m = Matrix(F, rows)
        if rank(m) == n:
            return m


@st.composite
def transported_family_tables(draw, F: FieldSpec, max_dim: int = 6):
    """A family table rewritten in a random basis: associative and nilpotent."""
    tables = [t for t in family_tables(F).values() if t.n <= max_dim]
    a = draw(st.sampled_from(tables))
    return transport_table(a, draw(invertible(F, a.n)))


def transport_table(a, m):
    from nilalg.iso import transport
    return transport(a, m)


def family_tables(F: FieldSpec) -> dict[str, AlgebraTable]:
    """One instance of every family, small enough for exhaustive work over GF(5)."""
    out = {
        "mu0(4)": fam.mu0(4, F),
        "mu0(5)": fam.mu0(5, F),
        "mu0split(5,2)": fam.mu0_split(5, 2, F),
        "heis(2)": fam.heisenberg_split(2, F),
        "muprime(6,2)": fam.mu_prime(6, 2, 1, [[1, 3], [0, -1]], F),
        "lambda1": fam.lam(1, F),
        "lambda2": fam.lam(2, F),
        "pi1(2)": fam.pi(1, 2, F),
        "pi8(2)": fam.pi(8, 2, F),
        "mu2_1(6)": fam.mu2_1(6, F),
        "mu2_2(6,3)": fam.mu2(2, 6, 3, F),
        "mu2_3(6)": fam.mu2(3, 6, F=F),
        "mu2_4(6)": fam.mu2(4, 6, F=F),
    }
    out.update({f"mu1_{k}(5)": fam.mu1(k, 5, F) for k in range(1, 5)})
    out.update({f"pi{k}": fam.pi(k, F=F) for k in range(2, 8)})
    return out
