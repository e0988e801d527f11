from __future__ import annotations

import random
from fractions import Fraction

import mpmath
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy.matrices.normalforms import smith_normal_decomp

from scaleinv.exact import (
    DimensionError,
    Matrix,
    Polynomial,
    charpoly,
    cyclotomic,
    positive_lp_feasible,
    smith_form,
    unit_disk_root_analysis,
)
from scaleinv.exact.linalg import as_fraction, extend_basis, row_space
from scaleinv.exact.poly import count_real_roots, exp_series, log_series, square_free_decomposition

F = Fraction

small_ints = st.integers(min_value=-5, max_value=5)


def square(n):
    return st.lists(st.lists(small_ints, min_size=n, max_size=n), min_size=n, max_size=n)


def to_sympy(m: Matrix) -> sympy.Matrix:
    return sympy.Matrix([[sympy.Rational(a.numerator, a.denominator) for a in row] for row in m])


# --- matrices ---------------------------------------------------------------

def test_floats_are_rejected():
    with pytest.raises(TypeError):
        as_fraction(0.5)


def test_matrix_shape_errors():
    with pytest.raises(DimensionError):
        Matrix([[1, 2]]) @ Matrix([[1, 2]])
    with pytest.raises(DimensionError):
        charpoly(Matrix([[1, 2]]))


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4).flatmap(square))
def test_det_inverse_rank_match_sympy(rows):
    m = Matrix(rows)
    s = sympy.Matrix(rows)
    assert m.det() == s.det()
    assert m.rank() == s.rank()
    if s.det() != 0:
        inv = m.inverse()
        assert inv @ m == Matrix.identity(m.rows)
        assert to_sympy(inv) == s.inv()


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 5).flatmap(square))
def test_charpoly_matches_sympy(rows):
    m = Matrix(rows)
    expected = sympy.Matrix(rows).charpoly().all_coeffs()[::-1]
    assert [int(c) for c in charpoly(m).coeffs] == [int(c) for c in expected]


def test_charpoly_examples():
    assert charpoly(Matrix([[2, 1], [1, 1]])) == Polynomial([1, -3, 1])
    assert charpoly(Matrix.identity(2)) == Polynomial([1, -1]) ** 2
    assert charpoly(Matrix.diag([2, 2, 4])) == Polynomial([-2, 1]) ** 2 * Polynomial([-4, 1])


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4).flatmap(square))
def test_nullspace_is_kernel(rows):
    m = Matrix(rows)
    ns = m.nullspace()
    assert len(ns) == m.cols - m.rank()
    for v in ns:
        assert not any(m @ v)


def test_row_space_is_canonical():
    a = row_space([(1, 2, 3), (0, 1, 1)], 3)
    b = row_space([(1, 3, 4), (2, 4, 6)], 3)
    assert a == b


def test_extend_basis_complements():
    sub = row_space([(0, 0, 1)], 3)
    amb = row_space([(1, 0, 0), (0, 1, 0), (0, 0, 1)], 3)
    ext = extend_basis(sub, amb)
    assert len(ext) == 2
    assert Matrix(list(ext) + [(0, 0, 1)]).rank() == 3


# --- Smith form -------------------------------------------------------------

@pytest.mark.parametrize(
    "rows, factors",
    [([[2, 0], [0, 4]], (2, 4)), ([[1, 1], [0, 2]], (1, 2)), ([[0]], (0,))],
)
def test_smith_examples(rows, factors):
    d, U, V = smith_form(Matrix(rows))
    assert tuple(d) == factors
    D = U @ Matrix(rows) @ V
    assert all(D[i, j] == 0 for i in range(D.rows) for j in range(D.cols) if i != j)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4).flatmap(square))
def test_smith_matches_sympy(rows):
    m = Matrix(rows)
    d, U, V = smith_form(m)
    D, _, _ = smith_normal_decomp(sympy.Matrix(rows), domain=sympy.ZZ)
    theirs = [abs(int(D[i, i])) for i in range(min(D.shape))]
    assert [abs(int(x)) for x in d] == theirs
    assert abs(U.det()) == 1 and abs(V.det()) == 1
    prod = U @ m @ V
    for i in range(prod.rows):
        for j in range(prod.cols):
            assert prod[i, j] == (d[i] if i == j else 0)
    for a, b in zip(d, d[1:]):
        assert a == 0 and b == 0 or b % a == 0 if a else b == 0
    if m.det():
        p = 1
        for x in d:
            p *= x
        assert abs(p) == abs(m.det())


# --- root location ----------------------------------------------------------

@pytest.mark.parametrize(
    "coeffs, inside, on, cyc",
    [
        ([1, -3, 1], 1, 0, ()),
        ([-2, 1], 0, 0, ()),
        ([-1, 0, 1], 0, 2, (1, 2)),
        ([5, -6, 5], 0, 2, ()),  # roots of modulus one that are not roots of unity
        ([1, -1, -1, -1, 1], 1, 2, ()),  # Salem quartic
    ],
)
def test_unit_disk_examples(coeffs, inside, on, cyc):
    loc = unit_disk_root_analysis(Polynomial(coeffs))
    assert (loc.inside, loc.on_circle) == (inside, on)
    assert tuple(n for n, _ in loc.cyclotomic_factors) == cyc


def test_unit_disk_rejects_zero():
    with pytest.raises(ValueError):
        unit_disk_root_analysis(Polynomial())


def _numeric_counts(coeffs):
    mpmath.mp.dps = 60
    roots = mpmath.polyroots(list(reversed(coeffs)), maxsteps=400, extraprec=400)
    eps = mpmath.mpf(10) ** -25
    inside = sum(1 for r in roots if abs(r) < 1 - eps)
    on = sum(1 for r in roots if abs(abs(r) - 1) <= eps)
    return inside, on


def test_unit_disk_against_numeric_roots():
    rng = random.Random(7)
    checked = 0
    while checked < 100:
        deg = rng.randint(1, 6)
        coeffs = [rng.randint(-4, 4) for _ in range(deg)] + [rng.choice([-3, -2, -1, 1, 2, 3])]
        p = Polynomial(coeffs)
        loc = unit_disk_root_analysis(p)
        assert loc.inside + loc.on_circle + loc.outside == p.degree
        # repeated roots slow numeric convergence; compare on the square-free part with multiplicities
        expect_in, expect_on = 0, 0
        for f, mult in square_free_decomposition(p):
            if f.degree < 1:
                continue
            ci, co = _numeric_counts([int(c * f.lc.denominator) if False else c for c in f.monic().coeffs])
            expect_in += ci * mult
            expect_on += co * mult
        assert (loc.inside, loc.on_circle) == (expect_in, expect_on), coeffs
        checked += 1


def test_cyclotomic_polynomials():
    assert cyclotomic(1) == Polynomial([-1, 1])
    assert cyclotomic(6) == Polynomial([1, -1, 1])
    assert cyclotomic(12) == Polynomial([1, 0, -1, 0, 1])


def test_real_root_counts():
    p = Polynomial.from_roots([3, -2, F(1, 2), 5])
    assert count_real_roots(p, 1, "inf") == 2
    assert count_real_roots(p, "-inf", -1) == 1


def test_log_exp_series_inverse():
    p = Polynomial([1, -3, 2])
    lg = log_series(p, 10)
    assert exp_series(lg, 10)[:3] == [1, -3, 2]
    assert all(c == 0 for c in exp_series(lg, 10)[3:])


# --- LP -----------------------------------------------------------------------

def test_lp_examples():
    assert positive_lp_feasible([(1, 1, -1)], 3).weights == (1, 1, 2)
    assert positive_lp_feasible([], 2).weights == (1, 1)
    res = positive_lp_feasible([(1,)], 1)  # w1 + w1 - w1 = 0
    assert not res.feasible
    assert res.certificate.check([(1,)])


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 4), st.integers(0, 4), st.integers(0, 4)), max_size=6))
def test_lp_answers_are_certified(triples):
    n = 5
    eqs = []
    for i, j, k in triples:
        row = [0] * n
        row[i] += 1
        row[j] += 1
        row[k] -= 1
        eqs.append(tuple(row))
    res = positive_lp_feasible(eqs, n)
    if res.feasible:
        assert all(w >= 1 for w in res.weights)
        assert all(sum(a * w for a, w in zip(e, res.weights)) == 0 for e in eqs)
    else:
        assert res.certificate.check(eqs)
