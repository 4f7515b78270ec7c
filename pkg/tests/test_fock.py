import math

import numpy as np
import pytest

from discordq.covariance import GaussianParams
from discordq.errors import NonConverged, TruncationError
from discordq.fock import (
    FockState,
    classical_quantum,
    conditional_blocks,
    converge_q,
    embed,
    fock_photon_number_mixed,
    fock_q,
    fock_q_commutators,
    fock_squeezed_thermal,
    local_unitary,
    photon_added_matching_wigner,
    symmetric_second_moments,
)
from discordq.marker import Method, photon_added_q, q_gaussian_closed, q_squeezed_thermal_formula
from discordq.verify import random_unitary

# fock_q of (|00> + |11>)/sqrt(2); by hand: Tr(S^2) = 1/2, cross term 1/8
BELL_Q = 3 / 8


def random_density(rng, d):
    z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = z @ z.conj().T
    return rho / np.trace(rho).real


def test_classical_classical_is_zero():
    v00, v11 = np.zeros(4), np.zeros(4)
    v00[0] = v11[3] = 1
    s = FockState(0.5 * (np.outer(v00, v00) + np.outer(v11, v11)), 2, 2)
    assert fock_q(s).q == 0


@pytest.mark.parametrize("k", [0.0, 0.25, 0.5, 0.9, 1.0])
def test_photon_number_mixed(k):
    rep = fock_q(fock_photon_number_mixed(k))
    assert rep.q == pytest.approx(k * k * (1 - k) ** 2 / 2, abs=1e-15)
    assert rep.method is Method.FOCK_ORACLE


def test_photon_number_mixed_limits():
    assert fock_photon_number_mixed(1.0).rho[0, 0] == 1
    assert fock_photon_number_mixed(0.0).purity == pytest.approx(1.0)


def test_bell_state_regression():
    s = FockState.from_pure([1, 0, 0, 1], 2, 2)
    assert fock_q(s).q == pytest.approx(BELL_Q, abs=1e-15)
    assert fock_q_commutators(s) == pytest.approx(BELL_Q, abs=1e-15)


def test_contraction_matches_commutator_sum():
    rng = np.random.default_rng(1)
    s = FockState(random_density(rng, 12), 3, 4)
    rep = fock_q(s)
    assert rep.q == pytest.approx(fock_q_commutators(s), rel=1e-12)
    assert rep.q == pytest.approx(rep.term1 - rep.term2, rel=1e-12)
    assert rep.q > 0


def test_block_structure():
    rng = np.random.default_rng(2)
    s = FockState(random_density(rng, 12), 3, 4)
    b = conditional_blocks(s)
    assert b.shape == (4, 4, 3, 3)
    for m in range(4):
        for n in range(4):
            assert np.max(np.abs(b[m, n].conj().T - b[n, m])) <= 1e-12
    assert sum(np.trace(b[m, m]) for m in range(4)) == pytest.approx(1.0, abs=1e-10)


def test_vacuum_truncation():
    s = fock_squeezed_thermal(0.0, 0.0, 8)
    want = np.zeros((64, 64))
    want[0, 0] = 1
    assert np.allclose(s.rho, want, atol=1e-14)


def test_two_mode_squeezed_vacuum_schmidt():
    r, d = 0.3, 15
    s = fock_squeezed_thermal(0.0, r, d)
    diag = np.array([s.rho[k * d + k, k * d + k].real for k in range(d)])
    want = (np.tanh(r) ** np.arange(d) / np.cosh(r)) ** 2
    assert np.allclose(diag, want / want.sum(), rtol=1e-8, atol=1e-14)
    # no weight off the |kk> diagonal
    idx = [k * d + k for k in range(d)]
    off = s.rho.copy()
    off[np.ix_(idx, idx)] = 0
    assert np.max(np.abs(off)) < 1e-10


def test_thermal_deficit():
    s = fock_squeezed_thermal(0.5, 0.3, 20)
    assert s.deficit < 1e-6


def test_small_truncation_refused():
    with pytest.raises(TruncationError):
        fock_squeezed_thermal(0.5, 0.5, 6)
    s = fock_squeezed_thermal(0.5, 0.5, 6, max_deficit=None)
    assert s.deficit > 1e-3


@pytest.mark.parametrize("n,r", [(0.0, 0.3), (0.5, 0.2), (0.25, 0.5)])
def test_agrees_with_closed_form(n, r):
    s = fock_squeezed_thermal(n, r, 16, max_deficit=None)
    ref = q_gaussian_closed(GaussianParams.squeezed_thermal(n, r)).q
    assert fock_q(s).q == pytest.approx(ref, rel=1e-3)


def test_error_shrinks_with_dimension():
    ref = q_gaussian_closed(GaussianParams.squeezed_thermal(0.5, 0.5)).q
    errs = [abs(fock_q(fock_squeezed_thermal(0.5, 0.5, d, max_deficit=None)).q - ref) for d in (6, 10, 14)]
    assert errs[0] > errs[1] > errs[2]


def test_converge_squeezed_vacuum():
    q, history = converge_q(lambda d: fock_squeezed_thermal(0.0, 0.3, d), [8, 12, 16])
    assert [d for d, _ in history] == [8, 12, 16]
    assert q == pytest.approx(q_squeezed_thermal_formula(0, 0.3), rel=1e-6)


def test_converge_exact_state():
    q, history = converge_q(lambda d: embed(fock_photon_number_mixed(0.5), d), [2, 4])
    assert history[0][1] == history[1][1] == pytest.approx(1 / 32)


def test_converge_heavy_tail():
    with pytest.raises(NonConverged) as info:
        converge_q(lambda d: fock_squeezed_thermal(0.0, 1.2, d, max_deficit=None), [8, 12])
    assert len(info.value.history) == 2


def test_converge_requires_increasing_dims():
    with pytest.raises(ValueError):
        converge_q(lambda d: fock_photon_number_mixed(0.5), [4, 4])


def test_local_unitary_invariance():
    rng = np.random.default_rng(3)
    base = fock_squeezed_thermal(0.2, 0.4, 6, max_deficit=None)
    q0 = fock_q(base).q
    for _ in range(5):
        q1 = fock_q(local_unitary(base, random_unitary(rng, 6), random_unitary(rng, 6))).q
        assert q1 == pytest.approx(q0, rel=1e-9)


@pytest.mark.parametrize("seed", range(5))
def test_classical_quantum_states_vanish(seed):
    rng = np.random.default_rng(seed)
    d_a, d_b = 3, 4
    basis = random_unitary(rng, d_a)
    sigmas = [random_density(rng, d_b) for _ in range(d_a)]
    s = classical_quantum(rng.dirichlet(np.ones(d_a)), basis, sigmas)
    assert abs(fock_q(s).q) < 1e-12


def test_photon_added_cross_check():
    s, mode = photon_added_matching_wigner(0.3, 0.4, 20)
    assert mode == 2
    assert fock_q(s).q == pytest.approx(photon_added_q(0.3, 0.4), rel=1e-6)


def test_photon_added_moments():
    s, _ = photon_added_matching_wigner(0.0, 0.0, 6)
    assert np.allclose(np.diag(symmetric_second_moments(s)), [0.25, 0.25, 0.75, 0.75])


def test_state_validation():
    with pytest.raises(ValueError):
        FockState(np.diag([0.5, 0.6, 0, 0]), 2, 2)
    with pytest.raises(ValueError):
        FockState(np.diag([1.5, -0.5, 0, 0]), 2, 2)
    with pytest.raises(ValueError):
        FockState(np.eye(3) / 3, 2, 2)
