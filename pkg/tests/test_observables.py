import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blindwitness.evolution import T_F, build_layered
from blindwitness.observables import (
    binary_entropy,
    bloch_entropy,
    bloch_vectors,
    coherence_angles,
    device_density_matrix,
    n_witnesses,
    normalized_output,
    p_out,
    site_probabilities,
    visibility,
    von_neumann_entropy,
    witness_density_matrix,
    witness_report,
    witness_site_occupancy,
)

from conftest import random_state

SIGMAS = [
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]]),
    np.diag([1.0 + 0j, -1.0]),
]


def test_site_probabilities_basis_state():
    psi = np.zeros(35, complex)
    psi[4] = 1
    p = site_probabilities(psi)
    assert p[4] == 1 and p.sum() == 1


def test_site_probabilities_marginalise(make_model, packet):
    psi = make_model(2).initial_state(packet)
    np.testing.assert_allclose(site_probabilities(psi), np.abs(packet) ** 2, atol=1e-16)


def test_bad_state_length():
    with pytest.raises(ValueError):
        site_probabilities(np.ones(36))
    with pytest.raises(ValueError):
        site_probabilities(np.ones(3 * 35))


def test_n_witnesses():
    assert n_witnesses(np.zeros(35 * 16)) == 4


def test_p_out_reads_output_site():
    psi = np.zeros(70, complex)
    psi[26] = psi[35 + 26] = np.sqrt(0.5)
    assert p_out(psi) == pytest.approx(1.0)


class TestNormalizedOutput:
    def test_constant(self):
        np.testing.assert_array_equal(normalized_output(np.full(10, 0.3)), 0)

    def test_full_contrast(self):
        d = normalized_output([0.0, 0.1, 0.2])
        np.testing.assert_allclose(d, [-1, 0, 1])

    def test_degenerate(self):
        with pytest.raises(ValueError, match="degenerate"):
            normalized_output(np.zeros(5))

    def test_empty(self):
        with pytest.raises(ValueError):
            normalized_output([])


class TestVisibility:
    flux = np.linspace(-1, 1, 401)

    def test_sinusoid(self):
        p = 1 + 0.25 * np.cos(2 * np.pi * self.flux)
        assert visibility(self.flux, p) == pytest.approx(0.25)

    def test_is_half_peak_to_peak_of_normalized(self):
        p = 0.3 + 0.1 * np.cos(2 * np.pi * self.flux) ** 3
        d = normalized_output(p)
        assert visibility(self.flux, p) == pytest.approx(np.ptp(d) / 2)

    def test_too_few_samples(self):
        f = np.linspace(0, 1, 50)
        with pytest.raises(ValueError, match="samples"):
            visibility(f, np.ones(50))

    def test_less_than_a_period(self):
        f = np.linspace(0, 0.5, 201)
        with pytest.raises(ValueError, match="period"):
            visibility(f, np.ones(201))


@pytest.mark.parametrize("n_wit", [1, 2, 3])
def test_bloch_matches_partial_trace(n_wit):
    rng = np.random.default_rng(n_wit)
    psi = random_state(rng, n_wit)
    bloch = bloch_vectors(psi)
    for m in range(n_wit):
        rho = witness_density_matrix(psi, m)
        assert np.trace(rho).real == pytest.approx(1)
        expected = [np.trace(rho @ s).real for s in SIGMAS]
        np.testing.assert_allclose(bloch[m], expected, atol=1e-12)


def test_partial_trace_explicit_kron():
    # |alpha> (x) |beta> (x) |j=3>: witness 1 on beta, witness 2 on alpha -> w = 1
    psi = np.zeros(4 * 35, complex)
    psi[1 * 35 + 2] = 1
    np.testing.assert_allclose(witness_density_matrix(psi, 0), np.diag([0, 1]))
    np.testing.assert_allclose(witness_density_matrix(psi, 1), np.diag([1, 0]))
    np.testing.assert_allclose(bloch_vectors(psi)[:, 2], [-1, 1])


def test_initial_report(make_model, packet):
    psi = make_model(4).initial_state(packet)
    r = witness_report(psi)
    np.testing.assert_allclose(r.bloch, np.tile([1, 0, 0], (4, 1)), atol=1e-15)
    np.testing.assert_allclose(r.theta, 0, atol=1e-15)
    np.testing.assert_allclose(r.entropy, 0, atol=1e-12)
    assert r.device_entropy == pytest.approx(0, abs=1e-12)


def test_initial_phase_sets_angle(make_model, packet):
    psi = make_model(2).initial_state(packet, [0.4, -2.0])
    np.testing.assert_allclose(witness_report(psi).theta, [0.4, -2.0], atol=1e-14)


class TestEntropy:
    def test_binary_entropy_values(self):
        np.testing.assert_allclose(binary_entropy([0, 0.5, 1]), [0, 1, 0])

    def test_maximally_mixed(self):
        assert von_neumann_entropy(np.eye(2) / 2) == pytest.approx(1)
        assert von_neumann_entropy(np.eye(35) / 35) == pytest.approx(np.log2(35))

    def test_pure(self):
        v = np.array([0.6, 0.8j])
        assert von_neumann_entropy(np.outer(v, v.conj())) == pytest.approx(0, abs=1e-12)

    def test_bloch_entropy_zero_length(self):
        assert bloch_entropy(np.zeros(3))[0] == pytest.approx(1)

    def test_device_entropy_of_bell_like_state(self):
        # witness entangled with two orthogonal device sites: one bit
        psi = np.zeros(70, complex)
        psi[3] = psi[35 + 9] = np.sqrt(0.5)
        assert von_neumann_entropy(device_density_matrix(psi)) == pytest.approx(1)
        assert witness_report(psi).entropy[0] == pytest.approx(1)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 4))
def test_bloch_properties_random_states(seed, n_wit):
    psi = random_state(np.random.default_rng(seed), n_wit)
    bloch = bloch_vectors(psi)
    assert np.all(np.linalg.norm(bloch, axis=1) <= 1 + 1e-9)
    s = bloch_entropy(bloch)
    for m in range(n_wit):
        assert s[m] == pytest.approx(von_neumann_entropy(witness_density_matrix(psi, m)), abs=1e-9)
        pa, pb = witness_site_occupancy(psi, m)
        assert pa + pb == pytest.approx(1)
        assert pa - pb == pytest.approx(bloch[m, 2], abs=1e-12)
    s_dev = von_neumann_entropy(device_density_matrix(psi))
    assert 0 <= s_dev <= np.log2(35) + 1e-9


def test_coherence_angle_quadrants():
    b = np.array([[-1, 1e-3, 0], [-1, -1e-3, 0], [0, 1, 0]])
    np.testing.assert_allclose(coherence_angles(b), [np.pi - 1e-3, -np.pi + 1e-3, np.pi / 2], atol=1e-6)


class TestOccupancy:
    def test_no_witnesses(self, packet):
        with pytest.raises(ValueError):
            witness_site_occupancy(packet, 0)

    def test_initial(self, make_model, packet):
        psi = make_model(2).initial_state(packet)
        assert witness_site_occupancy(psi, 1) == (pytest.approx(0.5, abs=1e-15),) * 2

    @pytest.mark.parametrize("flux", [0.0, 0.27, 0.5])
    def test_blind_witnesses_stay_half(self, make_model, packet, flux):
        model = make_model(6, flux=flux)
        states = build_layered(model).evolve_many(model.initial_state(packet), np.linspace(0, 2 * T_F, 15))
        for psi in states:
            for m in range(6):
                pa, pb = witness_site_occupancy(psi, m)
                assert abs(pa - 0.5) < 1e-10 and abs(pb - 0.5) < 1e-10
            assert np.abs(bloch_vectors(psi)[:, 2]).max() < 1e-10
            assert site_probabilities(psi).sum() == pytest.approx(1, abs=1e-9)


@pytest.mark.parametrize("flux", [0.0, 0.5])
def test_branch_probabilities_symmetric(make_model, packet, flux):
    model = make_model(6, flux=flux)
    psi = build_layered(model).evolve(model.initial_state(packet), T_F)
    p = site_probabilities(psi)
    np.testing.assert_allclose(p[15:20], p[20:25], atol=1e-12)


def test_entropy_onset(make_model, packet):
    model = make_model(8, flux=0.5)
    states = build_layered(model).evolve_many(model.initial_state(packet), [0.0, T_F])
    r0, r1 = witness_report(states[0]), witness_report(states[1])
    np.testing.assert_allclose(r0.entropy, 0, atol=1e-9)
    assert np.all(r1.entropy > 0)
    assert 0 < r1.device_entropy <= np.log2(35)
