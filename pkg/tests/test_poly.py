from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from eigenbound import exact
from eigenbound.poly import MultiPoly, as_fraction, monomials_up_to

coeffs = st.fractions(min_value=-5, max_value=5, max_denominator=7)
terms2 = st.dictionaries(st.tuples(st.integers(0, 3), st.integers(0, 3)), coeffs, max_size=5)


def poly(t):
    return MultiPoly(2, t)


def test_as_fraction_forms():
    assert as_fraction("3/7") == Fraction(3, 7)
    assert as_fraction("0.25") == Fraction(1, 4)
    assert as_fraction(0.1) == Fraction(1, 10)
    assert as_fraction(-2) == -2
    with pytest.raises(TypeError):
        as_fraction(True)


def test_zero_coefficients_dropped():
    p = MultiPoly(2, {(1, 0): 1, (0, 1): 0})
    assert p.terms == {(1, 0): 1}
    assert (p - p).is_zero()


def test_monomial_count():
    assert len(monomials_up_to(2, 2)) == 6
    assert len(monomials_up_to(3, 4)) == 35


@settings(max_examples=60, deadline=None)
@given(terms2, terms2, terms2)
def test_ring_axioms(a, b, c):
    f, g, h = poly(a), poly(b), poly(c)
    assert f + g == g + f
    assert f * g == g * f
    assert f * (g + h) == f * g + f * h
    assert (f * g) * h == f * (g * h)


@settings(max_examples=60, deadline=None)
@given(terms2, terms2, st.tuples(coeffs, coeffs))
def test_evaluation_homomorphism(a, b, pt):
    f, g = poly(a), poly(b)
    assert (f * g)(pt) == f(pt) * g(pt)
    assert (f + g)(pt) == f(pt) + g(pt)


@settings(max_examples=40, deadline=None)
@given(terms2, terms2)
def test_product_rule(a, b):
    f, g = poly(a), poly(b)
    for i in range(2):
        assert (f * g).diff(i) == f.diff(i) * g + f * g.diff(i)


def test_hessian_of_u():
    x1, x2 = MultiPoly.variable(2, 0), MultiPoly.variable(2, 1)
    u = x1 * x1 + x1 * x2 + x2 * x2
    h = [[e((0, 0)) for e in row] for row in u.hessian()]
    assert h == [[2, 1], [1, 2]]


def test_vectorised_evaluate_matches_exact():
    x1, x2 = MultiPoly.variable(2, 0), MultiPoly.variable(2, 1)
    f = (x1 - x2 * Fraction(1, 3)) ** 3 + 2
    pts = np.array([[0.5, -1.0], [2.0, 0.25]])
    expect = [float(f((Fraction(0.5), Fraction(-1)))), float(f((Fraction(2), Fraction(1, 4))))]
    assert np.allclose(f.evaluate(pts), expect, rtol=1e-14)


def test_substitute_affine():
    x = MultiPoly.variable(1, 0)
    f = x ** 2
    g = f.substitute([x * 2 + 1])
    assert g == x * x * 4 + x * 4 + 1


def test_exact_linear_algebra():
    a = [[2, 1], [1, 3]]
    assert exact.det(a) == 5
    inv = exact.inverse(a)
    assert inv == [[Fraction(3, 5), Fraction(-1, 5)], [Fraction(-1, 5), Fraction(2, 5)]]
    assert exact.solve([[1, 1], [2, 2]], [1, 2]) is None
    assert exact.rank([[1, 2], [2, 4]]) == 1
