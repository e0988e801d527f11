from __future__ import annotations

import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scaleinv.exact import Matrix
from scaleinv.liealg import NilpotentLieAlgebra
from scaleinv.malcev import (
    INFINITE,
    Lattice,
    LatticeError,
    adjoint_exp,
    bch,
    commutator,
    conjugate,
    coset_ball_points,
    from_second_kind,
    identity,
    induced_sequence,
    inverse,
    lattice_membership,
    power,
    sublattice_index,
    to_second_kind,
)

from conftest import CATALOG_ALGEBRAS, catalog_algebra, filiform, heisenberg, l4_lattice, l5_lattice, rand_vec

F = Fraction

fracs = st.fractions(min_value=-5, max_value=5, max_denominator=6)


def vec3():
    return st.tuples(fracs, fracs, fracs)


# --- matrix oracle ----------------------------------------------------------------
# Unitriangular matrices: exp and log are finite sums, computed here with
# plain Fraction lists so the oracle shares no code with the package.

def _mm(A, B):
    n = len(A)
    return [[sum(A[i][k] * B[k][j] for k in range(n)) for j in range(n)] for i in range(n)]


def _add(A, B, c=1):
    return [[a + c * b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def _eye(n):
    return [[F(int(i == j)) for j in range(n)] for i in range(n)]


def mat_exp(X):
    n = len(X)
    out, term = _eye(n), _eye(n)
    for k in range(1, n):
        term = [[v / k for v in row] for row in _mm(term, X)]
        out = _add(out, term)
    return out


def mat_log(U):
    n = len(U)
    N = _add(U, _eye(n), -1)
    out = [[F(0)] * n for _ in range(n)]
    term = _eye(n)
    for k in range(1, n):
        term = _mm(term, N)
        out = _add(out, term, F((-1) ** (k + 1), k))
    return out


def E(n, i, j):
    M = [[F(0)] * n for _ in range(n)]
    M[i - 1][j - 1] = F(1)
    return M


H3_BASIS = [E(3, 1, 2), E(3, 2, 3), E(3, 1, 3)]
L4_BASIS = [_add(_add(E(4, 1, 2), E(4, 2, 3)), E(4, 3, 4)), E(4, 3, 4), E(4, 2, 4), E(4, 1, 4)]


def to_mat(basis, x):
    out = [[F(0)] * len(basis[0]) for _ in basis[0]]
    for c, B in zip(x, basis):
        out = _add(out, B, c)
    return out


def h3_coords(X):
    assert X[0][0] == X[1][1] == 0
    return (X[0][1], X[1][2], X[0][2])


def l4_coords(X):
    x1 = X[0][1]
    assert X[1][2] == x1
    return (x1, X[2][3] - x1, X[1][3], X[0][3])


def test_matrix_realisations_are_homomorphic():
    for alg, basis in ((heisenberg(), H3_BASIS), (filiform(4), L4_BASIS)):
        d = alg.dim
        for i, j in itertools.product(range(d), repeat=2):
            A, B = basis[i], basis[j]
            br = _add(_mm(A, B), _mm(B, A), -1)
            assert br == to_mat(basis, alg.bracket(alg.basis_vector(i), alg.basis_vector(j)))


@pytest.mark.parametrize(
    "alg, basis, coords",
    [(heisenberg(), H3_BASIS, h3_coords), (filiform(4), L4_BASIS, l4_coords)],
    ids=["h3", "L4"],
)
def test_bch_matches_matrix_oracle(alg, basis, coords):
    rng = random.Random(5)
    for _ in range(100):
        x, y = rand_vec(rng, alg.dim), rand_vec(rng, alg.dim)
        expected = coords(mat_log(_mm(mat_exp(to_mat(basis, x)), mat_exp(to_mat(basis, y)))))
        assert bch(alg, x, y) == expected


# --- BCH ---------------------------------------------------------------------------

def test_bch_heisenberg_example(h3):
    assert bch(h3, (1, 0, 0), (0, 1, 0)) == (1, 1, F(1, 2))


@pytest.mark.parametrize("name", CATALOG_ALGEBRAS)
def test_bch_associative(name):
    alg = catalog_algebra(name)
    rng = random.Random(hash(name) & 0xFFFF)
    for _ in range(200):
        x, y, z = (rand_vec(rng, alg.dim, 4, 3) for _ in range(3))
        assert bch(alg, bch(alg, x, y), z) == bch(alg, x, bch(alg, y, z))


@pytest.mark.parametrize("name", CATALOG_ALGEBRAS)
def test_identity_and_inverse(name):
    alg = catalog_algebra(name)
    rng = random.Random(1)
    e = identity(alg.dim)
    for _ in range(20):
        x = rand_vec(rng, alg.dim)
        assert bch(alg, x, e) == tuple(x) == bch(alg, e, x)
        assert bch(alg, x, inverse(x)) == e


@settings(max_examples=80, deadline=None)
@given(vec3(), vec3())
def test_bch_commutative_iff_bracket_vanishes(x, y):
    h = heisenberg()
    commute = bch(h, x, y) == bch(h, y, x)
    assert commute == (not any(h.bracket(x, y)))


@settings(max_examples=80, deadline=None)
@given(vec3(), vec3())
def test_commutator_is_bracket_in_class_two(x, y):
    h = heisenberg()
    assert commutator(h, x, y) == h.bracket(x, y)


@settings(max_examples=50, deadline=None)
@given(vec3(), vec3())
def test_conjugation_is_adjoint_exp(x, y):
    h = heisenberg()
    assert conjugate(h, x, y) == tuple(adjoint_exp(h, x) @ y)


# --- powers --------------------------------------------------------------------------

def test_power_examples(h3):
    x = (F(1), F(1), F(1, 2))
    r = power(h3, x, F(1, 2))
    assert bch(h3, r, r) == x
    assert power(h3, x, -1) == inverse(x)
    assert power(h3, x, 0) == identity(3)


@pytest.mark.parametrize("name", CATALOG_ALGEBRAS)
def test_power_is_repeated_product(name):
    alg = catalog_algebra(name)
    rng = random.Random(2)
    for _ in range(10):
        x = rand_vec(rng, alg.dim)
        acc = identity(alg.dim)
        for m in range(1, 6):
            acc = bch(alg, acc, x)
            assert power(alg, x, m) == acc


# --- coordinates of the second kind -----------------------------------------------------

def test_second_kind_example(h3):
    lat = Lattice.standard(h3)
    assert to_second_kind(lat, (1, 1, F(1, 2))) == (1, 1, 0)
    assert from_second_kind(lat, (1, 1, 0)) == (1, 1, F(1, 2))


def test_abelian_second_kind_is_first_kind():
    lat = Lattice.standard(NilpotentLieAlgebra.abelian(3))
    assert to_second_kind(lat, (F(1, 3), 2, -1)) == (F(1, 3), 2, -1)


@pytest.mark.parametrize(
    "lat",
    [Lattice.standard(heisenberg()), l4_lattice(), l5_lattice()],
    ids=["h3", "L4", "L5"],
)
def test_second_kind_round_trip(lat):
    rng = random.Random(3)
    for _ in range(100):
        x = rand_vec(rng, lat.dim)
        assert from_second_kind(lat, to_second_kind(lat, x)) == x
        assert to_second_kind(lat, from_second_kind(lat, x)) == x


def test_membership_examples(h3):
    lat = Lattice.standard(h3)
    assert lattice_membership(lat, (1, 1, F(1, 2)))
    assert not lattice_membership(lat, (F(1, 2), 0, 0))
    assert lattice_membership(lat, identity(3))


@pytest.mark.parametrize(
    "lat",
    [Lattice.standard(heisenberg()), l4_lattice(), l5_lattice()],
    ids=["h3", "L4", "L5"],
)
def test_lattice_is_closed(lat):
    rng = random.Random(4)
    for _ in range(50):
        a = from_second_kind(lat, [rng.randint(-3, 3) for _ in range(lat.dim)])
        b = from_second_kind(lat, [rng.randint(-3, 3) for _ in range(lat.dim)])
        assert lat.contains(bch(lat.algebra, a, b))
        assert lat.contains(inverse(a))


def test_standard_l4_lattice_is_not_closed(l4):
    with pytest.raises(LatticeError):
        Lattice.standard(l4)


def test_non_adapted_basis_is_rejected(h3):
    with pytest.raises(LatticeError):
        Lattice(h3, Matrix([[0, 0, 1], [1, 0, 0], [0, 1, 0]]))


# --- indices --------------------------------------------------------------------------------

def test_index_examples(h3):
    z2 = Lattice.standard(NilpotentLieAlgebra.abelian(2))
    assert sublattice_index(z2, [(2, 0), (0, 2)]) == 4
    assert sublattice_index(z2, [(1, 0)]) == INFINITE
    assert sublattice_index(Lattice.standard(h3), [(2, 0, 0), (0, 2, 0)]) == 16


def _coset_count(lat, sub_gens, limit=200):
    """Count left cosets x*H by BFS over the generators of ``lat``, merging x, y when y^-1 x in H."""
    alg = lat.algebra
    H = Lattice.generated_by(alg, sub_gens)
    reps = [identity(alg.dim)]
    frontier = list(reps)
    moves = lat.generators() + [inverse(g) for g in lat.generators()]
    while frontier:
        nxt = []
        for x in frontier:
            for g in moves:
                y = bch(alg, x, g)
                if not any(H.contains(bch(alg, inverse(r), y)) for r in reps):
                    reps.append(y)
                    nxt.append(y)
                    assert len(reps) < limit
        frontier = nxt
    return len(reps)


@pytest.mark.parametrize(
    "gens",
    [[(2, 0, 0), (0, 2, 0)], [(2, 0, 0), (0, 1, 0)], [(3, 0, 0), (0, 2, 0), (0, 0, 1)], [(1, 1, F(1, 2)), (0, 2, 0)]],
)
def test_index_matches_coset_enumeration(h3, gens):
    lat = Lattice.standard(h3)
    assert sublattice_index(lat, gens) == _coset_count(lat, gens)


def test_index_matches_coset_enumeration_l4():
    lat = l4_lattice()
    gens = [from_second_kind(lat, (2, 0, 0, 0)), from_second_kind(lat, (0, 1, 0, 0))]
    assert sublattice_index(lat, gens) == _coset_count(lat, gens)


def test_index_is_multiplicative_along_towers(h3):
    C = Lattice.standard(h3)
    B = Lattice.generated_by(h3, [(2, 0, 0), (0, 1, 0)])
    A_gens = [(2, 0, 0), (0, 2, 0)]
    ab = sublattice_index(B, A_gens)
    bc = sublattice_index(C, B.generators())
    assert ab * bc == sublattice_index(C, A_gens)
    assert (ab, bc) == (4, 4)
    rng = random.Random(9)
    lat = l4_lattice()
    for _ in range(5):
        gens = [from_second_kind(lat, [rng.randint(1, 3) * int(i == j) for j in range(4)]) for i in range(4)]
        mid = Lattice.generated_by(lat.algebra, gens + [lat.generators()[0]])
        assert sublattice_index(lat, gens) == sublattice_index(lat, mid.generators()) * sublattice_index(mid, gens)


def test_index_rejects_outside_generators(h3):
    with pytest.raises(LatticeError):
        sublattice_index(Lattice.standard(h3), [(F(1, 2), 0, 0)])


def test_conjugated_lattice_contains_conjugates(h3):
    lat = Lattice.standard(h3)
    x = (F(1, 2), 0, 0)
    conj = lat.conjugated(x)
    for g in lat.generators():
        assert conj.contains(conjugate(h3, x, g))


def test_ball_enumeration_matches_brute_force(h3):
    lat = Lattice.standard(h3)
    table = induced_sequence(lat, [(2, 0, 0), (0, 1, 0)])
    got = set(coset_ball_points(lat, table, 3))
    expected = set()
    for v in itertools.product(range(-3, 4), repeat=3):
        x = from_second_kind(lat, v)
        if v[0] % 2 == 0 and v[2] % 2 == 0:
            expected.add(x)
    assert got == expected
