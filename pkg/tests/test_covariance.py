import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from discordq.covariance import (
    OMEGA,
    CovarianceMatrix,
    GaussianParams,
    local_transform,
    standard_form_reduce,
    symplectic_single_mode,
    validate_covariance,
)
from discordq.errors import NonPhysical

VACUUM = np.eye(4) / 4


def test_vacuum_is_valid():
    verdict = validate_covariance(VACUUM)
    assert verdict.ok
    assert verdict.min_eigenvalue == pytest.approx(0, abs=1e-15)


def test_sub_vacuum_variance():
    verdict = validate_covariance(np.diag([1 / 8, 1 / 8, 1 / 4, 1 / 4]))
    assert not verdict.ok
    names = [v.name for v in verdict.violations]
    assert "a < 1/4" in names
    margin = next(v.margin for v in verdict.violations if v.name == "a < 1/4")
    assert margin == pytest.approx(-1 / 8)


def test_two_mode_squeezed_vacuum_valid():
    r = 0.5
    p = GaussianParams(math.cosh(2 * r) / 4, math.cosh(2 * r) / 4, math.sinh(2 * r) / 4, -math.sinh(2 * r) / 4)
    assert validate_covariance(p.matrix()).ok
    assert p == GaussianParams.squeezed_thermal(0, r)


def test_asymmetric_rejected():
    v = VACUUM.copy()
    v[0, 1] = 0.1
    verdict = validate_covariance(v)
    assert any(x.name == "not symmetric" for x in verdict.violations)
    with pytest.raises(NonPhysical):
        standard_form_reduce(v)


def test_violates_uncertainty_only_jointly():
    # local blocks fine, but the correlations are too strong
    p = GaussianParams(0.3, 0.3, 0.29, 0.29)
    verdict = validate_covariance(p.matrix())
    assert not verdict.ok
    assert [v.name for v in verdict.violations] == ["V + i*Omega/4 not positive semidefinite"]


def test_reduce_vacuum_and_fixed_point():
    assert standard_form_reduce(VACUUM) == GaussianParams(0.25, 0.25, 0.0, 0.0)
    p = GaussianParams(0.7, 0.5, 0.3, -0.1)
    got = standard_form_reduce(p.matrix())
    assert np.allclose([got.a, got.b, got.c1, got.c2], [p.a, p.b, p.c1, p.c2], atol=1e-12)


def test_reduce_symmetric_family_on_degenerate_discriminant():
    p = GaussianParams.squeezed_thermal(0.5, 0.7)
    got = standard_form_reduce(p.matrix())
    assert got.c1 == pytest.approx(p.c1, rel=1e-10)
    assert got.c2 == pytest.approx(p.c2, rel=1e-10)


def test_reduce_sign_convention():
    got = standard_form_reduce(GaussianParams(0.6, 0.6, -0.1, 0.3).matrix())
    assert got.c1 == pytest.approx(0.3)
    assert got.c2 == pytest.approx(-0.1)


def test_params_violations():
    assert GaussianParams(0.1, 0.25, 0, 0).violations() == ["a < 1/4 (a = 0.1)"]
    assert not GaussianParams(0.3, 0.3, 0.31, 0).valid
    with pytest.raises(NonPhysical, match="ab < c1"):
        GaussianParams(0.3, 0.3, 0.31, 0).check()


def test_symplectic_generator():
    s = symplectic_single_mode(0.3, 0.8, -1.1)
    omega2 = OMEGA[:2, :2]
    assert np.allclose(s @ omega2 @ s.T, omega2)


def test_json_round_trip():
    cov = GaussianParams(0.7, 0.5, 0.3, -0.1).covariance()
    back = CovarianceMatrix.from_json(cov.to_json())
    assert np.array_equal(back.v, cov.v)
    with pytest.raises(ValueError):
        CovarianceMatrix.from_json('{"V": [[1, 2], [3, 4]]}')
    with pytest.raises(ValueError):
        CovarianceMatrix.from_json("[1, 2]")


valid_params = st.tuples(
    st.floats(0.25, 2.0), st.floats(0.25, 2.0), st.floats(-0.95, 0.95), st.floats(-0.95, 0.95)
).map(lambda t: physical(*t))
angles = st.floats(-math.pi, math.pi)
squeezes = st.floats(-1.0, 1.0)


def physical(a, b, u1, u2):
    """Scale correlations into the physical region of the standard form."""
    # ab - c^2 >= 0 is not enough; bisect on a common scale factor
    lo, hi = 0.0, 1.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        c = mid * math.sqrt(a * b)
        if validate_covariance(GaussianParams(a, b, c * u1, c * u2).matrix()).min_eigenvalue > 1e-6:
            lo = mid
        else:
            hi = mid
    c = lo * math.sqrt(a * b)
    return GaussianParams(a, b, c * u1, c * u2)


@settings(max_examples=60, deadline=None)
@given(valid_params, angles, squeezes, angles, angles, squeezes, angles)
def test_local_symplectic_invariance(p, t1, r1, f1, t2, r2, f2):
    v = local_transform(p.matrix(), symplectic_single_mode(t1, r1, f1), symplectic_single_mode(t2, r2, f2))
    got = standard_form_reduce(v)
    ref = standard_form_reduce(p.matrix())
    assert got.a == pytest.approx(ref.a, rel=1e-9)
    assert got.b == pytest.approx(ref.b, rel=1e-9)
    assert got.c1**2 == pytest.approx(ref.c1**2, abs=1e-9)
    assert got.c2**2 == pytest.approx(ref.c2**2, abs=1e-9)


@settings(max_examples=60, deadline=None)
@given(valid_params)
def test_reduction_idempotent_and_physical(p):
    once = standard_form_reduce(p.matrix())
    twice = standard_form_reduce(once.matrix())
    assert np.allclose([once.a, once.b, once.c1, once.c2], [twice.a, twice.b, twice.c1, twice.c2], atol=1e-12)
    assert once.valid
    assert once.c1 >= abs(once.c2)
