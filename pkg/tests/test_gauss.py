import math

import numpy as np
import pytest

from discordq.errors import Divergent, IllConditioned
from discordq.gauss import (
    ComplexGaussPoly,
    MomentTable,
    det_sqrt_branch,
    gauss_moments,
    integrate,
    integrate_factored,
    scalar_moment,
)
from discordq.poly import SparsePoly
from discordq.quadrature import quadrature_integrate
from discordq.verify import random_integrand


def one(n):
    return SparsePoly.constant(n)


def test_gaussian_integral():
    assert integrate(ComplexGaussPoly(one(1), [[2.0]], [0.0])) == pytest.approx(math.sqrt(math.pi), rel=1e-14)


def test_second_moment_integral():
    x2 = SparsePoly(1, {(2,): 1.0})
    assert integrate(ComplexGaussPoly(x2, [[2.0]], [0.0])) == pytest.approx(math.sqrt(math.pi) / 2, rel=1e-14)


def test_shifted_univariate_against_closed_form():
    # int exp(-a x^2 + b x + c) = sqrt(pi/a) exp(b^2/4a + c)
    a, b, c = 1.3, 0.7 - 0.2j, 0.1
    got = integrate(ComplexGaussPoly(one(1), [[2 * a]], [b], c))
    assert got == pytest.approx(math.sqrt(math.pi / a) * np.exp(b * b / (4 * a) + c), rel=1e-13)


def test_complex_cross_term():
    # exp(-x^2 - y^2 + i x y)
    quad = np.array([[2.0, -1j], [-1j, 2.0]])
    want = 2 * math.pi / math.sqrt(5)
    got = integrate(ComplexGaussPoly(one(2), quad, [0, 0]))
    assert got == pytest.approx(want, rel=1e-14)
    assert quadrature_integrate(ComplexGaussPoly(one(2), quad, [0, 0])) == pytest.approx(want, rel=1e-10)


def test_det_sqrt_branch():
    assert det_sqrt_branch(np.eye(3)) == pytest.approx(1.0)
    spd = np.array([[2.0, 0.3], [0.3, 1.0]])
    assert det_sqrt_branch(spd) == pytest.approx(math.sqrt(np.linalg.det(spd)))
    assert det_sqrt_branch(np.array([[2.0, -1j], [-1j, 2.0]])) == pytest.approx(math.sqrt(5))


def test_det_sqrt_follows_homotopy():
    # a large imaginary part winds the determinant past the principal branch cut
    quad = np.diag([1 + 3j, 1 + 3j, 1 + 3j])
    val = det_sqrt_branch(quad)
    assert val == pytest.approx((1 + 3j) ** 1.5, rel=1e-12)
    assert val**2 == pytest.approx(np.linalg.det(quad), rel=1e-12)


def test_scalar_moments():
    m = gauss_moments(np.array([[4.0]]), np.array([0.0]))
    s = 0.25
    assert scalar_moment((0,), m) == 1
    assert scalar_moment((4,), m) == pytest.approx(3 * s * s)
    m2 = gauss_moments(np.eye(2), np.array([0.5, -1.0]))
    assert scalar_moment((1, 0), m2) == pytest.approx(0.5)
    assert scalar_moment((0, 1), m2) == pytest.approx(-1.0)


def isserlis(exp, cov):
    """Zero-mean moment by explicit pairing enumeration."""
    idx = [i for i, e in enumerate(exp) for _ in range(e)]

    def pairings(items):
        if not items:
            yield 1.0
            return
        first, rest = items[0], items[1:]
        for k, other in enumerate(rest):
            for tail in pairings(rest[:k] + rest[k + 1 :]):
                yield cov[first, other] * tail

    return sum(pairings(idx)) if len(idx) % 2 == 0 else 0.0


@pytest.mark.parametrize("exp", [(2, 0, 2), (1, 1, 2), (3, 1, 2), (2, 2, 2), (0, 3, 1)])
def test_recursion_matches_isserlis(exp):
    rng = np.random.default_rng(7)
    x = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    cov = x @ x.T
    assert MomentTable(np.zeros(3), cov)(exp) == pytest.approx(isserlis(exp, cov), rel=1e-12)


def test_divergent_kernel():
    with pytest.raises(Divergent):
        integrate(ComplexGaussPoly(one(2), np.diag([1.0, -0.5]), [0, 0]))
    with pytest.raises(Divergent):
        integrate(ComplexGaussPoly(one(1), [[1j]], [0]))


def test_ill_conditioned_kernel():
    with pytest.raises(IllConditioned):
        integrate(ComplexGaussPoly(one(2), np.diag([1.0, 1e-13]), [0, 0]))


def test_asymmetric_quad_rejected():
    with pytest.raises(ValueError):
        ComplexGaussPoly(one(2), [[1.0, 0.5], [0.0, 1.0]], [0, 0])


@pytest.mark.parametrize("n,degree", [(1, 2), (1, 6), (2, 3), (2, 6), (3, 4), (3, 6)])
def test_quadrature_oracle(n, degree):
    rng = np.random.default_rng(100 * n + degree)
    g = random_integrand(rng, n, degree)
    exact = integrate(g)
    assert abs(exact - quadrature_integrate(g)) <= 1e-6 * abs(exact)


def test_linearity():
    rng = np.random.default_rng(3)
    g = random_integrand(rng, 3, 4)
    h = random_integrand(rng, 3, 4)
    combo = ComplexGaussPoly(g.poly * (2 - 1j) + h.poly * 0.5, g.quad, g.lin, g.logconst)
    hg = ComplexGaussPoly(h.poly, g.quad, g.lin, g.logconst)
    want = (2 - 1j) * integrate(g) + 0.5 * integrate(hg)
    assert abs(integrate(combo) - want) <= 1e-12 * abs(want)


def test_real_kernel_gives_real_result():
    rng = np.random.default_rng(4)
    x = rng.normal(size=(4, 4))
    quad = x @ x.T + np.eye(4)
    poly = SparsePoly(4, {(2, 1, 0, 1): 1.5, (0, 0, 3, 1): -0.7, (0, 0, 0, 0): 2.0})
    val = integrate(ComplexGaussPoly(poly, quad, rng.normal(size=4), 0.3))
    assert abs(val.imag) < 1e-12 * abs(val)


@pytest.mark.parametrize("i", [0, 1, 2])
def test_derivative_identity(i):
    rng = np.random.default_rng(5)
    g = random_integrand(rng, 3, 0)
    h = 1e-5
    shift = np.zeros(3)
    shift[i] = h
    plus = integrate(ComplexGaussPoly(one(3), g.quad, g.lin + shift, g.logconst))
    minus = integrate(ComplexGaussPoly(one(3), g.quad, g.lin - shift, g.logconst))
    want = integrate(ComplexGaussPoly(SparsePoly.variable(3, i), g.quad, g.lin, g.logconst))
    assert abs((plus - minus) / (2 * h) - want) <= 1e-6 * abs(want)


def test_factored_matches_expanded():
    rng = np.random.default_rng(6)
    g = random_integrand(rng, 4, 0)
    p1 = SparsePoly(2, {(2, 0): 1.0, (1, 1): -0.5, (0, 0): 0.2})
    p2 = SparsePoly(2, {(0, 2): 1.0, (1, 0): 0.3})
    l1 = rng.normal(size=(2, 4))
    l2 = rng.normal(size=(2, 4))
    expanded = p1.compose_linear(l1) * p2.compose_linear(l2)
    want = integrate(ComplexGaussPoly(expanded, g.quad, g.lin, g.logconst))
    stats = {}
    got = integrate_factored(g.quad, g.lin, g.logconst, [(p1, l1), (p2, l2)], stats)
    assert abs(got - want) <= 1e-12 * abs(want)
    assert stats["moments"] > 0 and stats["cond"] >= 1
