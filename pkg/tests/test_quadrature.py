import math

import numpy as np
import pytest

from eigenbound.moments import simplex_monomial_integral
from eigenbound.poly import monomials_up_to
from eigenbound.polytope import Simplex
from eigenbound.quadrature import grundmann_moeller, integrate_simplices


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("order", [2, 3])
def test_rule_exact_to_its_degree(n, order):
    nodes, weights = grundmann_moeller(n, order)
    assert weights.sum() == pytest.approx(1 / math.factorial(n), rel=1e-14)
    std = Simplex(tuple(tuple(int(i == j) for j in range(n)) for i in range(-1, n)))
    for alpha in monomials_up_to(n, 2 * order + 1):
        approx = float(np.sum(weights * np.prod(nodes[:, 1:] ** np.array(alpha), axis=1)))
        assert approx == pytest.approx(float(simplex_monomial_integral(std, alpha)),
                                       rel=1e-12, abs=1e-15)


def test_adaptive_integration_of_smooth_function():
    tri = [np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])]
    f = lambda x: np.exp(x[:, :1] + 2 * x[:, 1:])  # noqa: E731
    val, rep = integrate_simplices(f, tri, tol=1e-10)
    # closed form: int_0^1 int_0^{1-x} e^{x+2y} dy dx = (e^2 - 2e + 1) / 2
    assert val[0] == pytest.approx((math.e**2 - 2 * math.e + 1) / 2, abs=1e-9)
    assert rep.cap_hits == 0 and rep.simplices >= 1


def test_adaptivity_near_singularity_and_cap_warning():
    seg = [np.array([[0.0], [1.0]])]
    f = lambda x: np.sqrt(x)  # noqa: E731
    val, rep = integrate_simplices(f, seg, tol=1e-6)
    assert val[0] == pytest.approx(2 / 3, abs=1e-6)
    assert rep.max_depth > 2 and rep.converged
    with pytest.warns(RuntimeWarning, match="cap"):
        _, rep = integrate_simplices(f, seg, tol=1e-14, depth_cap=2)
    assert rep.cap_hits > 0 and not rep.converged


def test_cap_hits_within_budget_are_converged():
    seg = [np.array([[0.0], [1.0]])]
    f = lambda x: np.sqrt(x)  # noqa: E731
    import warnings
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        _, rep = integrate_simplices(f, seg, tol=1e-8)
    assert rep.cap_hits > 0 and rep.converged


def test_extra_levels_refine():
    tri = [np.array([[0.0, 0.0], [2.0, 0.0], [0.0, 2.0]])]
    f = lambda x: np.cos(x[:, :1]) * np.ones((len(x), 2))  # noqa: E731
    a, _ = integrate_simplices(f, tri, tol=1e-6)
    b, rep = integrate_simplices(f, tri, tol=1e-6, extra_levels=2)
    assert np.allclose(a, b, atol=1e-6)
    assert rep.simplices >= 4
