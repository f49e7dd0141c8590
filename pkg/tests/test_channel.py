import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bpriv import channel, gauss
from bpriv.channel import ChannelParams, GaussianState, InputPolicy
from bpriv.errors import PhotonBudgetError

COSH2 = 3.762195691083631459562213


def _tuples(count, seed):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        eta = rng.uniform(0, 1)
        r, s = rng.uniform(-2, 2, size=2)
        n = rng.uniform(0, 5)
        yield InputPolicy(r, n + math.sinh(r) ** 2), ChannelParams(eta, s)


def test_photon_budget():
    assert channel.photon_budget(2.0, 0.0) == 2.0
    assert channel.photon_budget(2.0, math.asinh(math.sqrt(2))) == pytest.approx(0.0, abs=1e-12)
    assert channel.max_entanglement(2.0) == pytest.approx(1.14622, abs=1e-5)
    with pytest.raises(PhotonBudgetError):
        channel.photon_budget(2.0, 1.5)
    with pytest.raises(PhotonBudgetError):
        InputPolicy(1.5, 2.0)


def test_channel_params_validation():
    with pytest.raises(ValueError):
        ChannelParams(1.2)
    with pytest.raises(ValueError):
        ChannelParams(0.5, 0.0, 1)


@pytest.mark.parametrize("eta", np.linspace(0, 1, 101))
def test_beam_splitter_orthogonal(eta):
    B = channel.beam_splitter_matrix(eta, 2)
    np.testing.assert_allclose(B @ B.T, np.eye(8), atol=1e-12)


def test_beam_splitter_endpoints():
    np.testing.assert_array_equal(channel.beam_splitter_matrix(1.0, 2), np.eye(8))
    B0 = channel.beam_splitter_matrix(0.0, 2)
    eye, zero = np.eye(4), np.zeros((4, 4))
    np.testing.assert_array_equal(B0, np.block([[zero, eye], [-eye, zero]]))
    half = channel.beam_splitter_matrix(0.5, 3)
    np.testing.assert_allclose(np.abs(half[np.nonzero(half)]), 1 / math.sqrt(2), atol=1e-15)
    np.testing.assert_allclose(half @ half.T, np.eye(12), atol=1e-15)
    with pytest.raises(ValueError):
        channel.beam_splitter_matrix(-0.1)


def test_joint_state_vacuum():
    st_ = channel.joint_state(InputPolicy(0.0, 0.0), ChannelParams(0.5, 0.0))
    np.testing.assert_array_equal(st_.mean, np.zeros(8))
    np.testing.assert_allclose(st_.cov, 0.5 * np.eye(8), atol=1e-15)


def test_joint_state_blocks():
    st_ = channel.joint_state(InputPolicy(1.0, 2.0), ChannelParams(0.5, 0.0))
    np.testing.assert_allclose(st_.cov[:4, :4], gauss.cov_from_exponent(gauss.squeeze_exponent(1.0)), atol=1e-12)
    np.testing.assert_allclose(st_.cov[4:, 4:], 0.5 * np.eye(4), atol=1e-15)
    np.testing.assert_array_equal(st_.cov[:4, 4:], 0)


def test_joint_state_displacement():
    st_ = channel.joint_state(InputPolicy(0.0, 1.0), ChannelParams(0.5, 0.0), [1, 0, 0, 0])
    np.testing.assert_array_equal(st_.mean, [1, 0, 0, 0, 0, 0, 0, 0])
    np.testing.assert_allclose(st_.cov, 0.5 * np.eye(8), atol=1e-15)
    with pytest.raises(ValueError):
        channel.joint_state(InputPolicy(0.0, 1.0), ChannelParams(0.5, 0.0), [1, 0])


def test_joint_state_photon_budget():
    # bypass the constructor check to mimic a stale policy object
    pol = object.__new__(InputPolicy)
    object.__setattr__(pol, "r", 1.5)
    object.__setattr__(pol, "n_eff", 2.0)
    with pytest.raises(PhotonBudgetError):
        channel.joint_state(pol, ChannelParams(0.5, 0.0))


def test_propagate_identity_and_swap():
    pol, mu = InputPolicy(0.4, 1.0), np.array([0.3, -0.2, 0.1, 0.5])
    joint = channel.joint_state(pol, ChannelParams(1.0, 0.9), mu)
    out = channel.propagate(joint, ChannelParams(1.0, 0.9))
    np.testing.assert_allclose(out.cov, joint.cov, atol=1e-15)
    np.testing.assert_allclose(out.mean, joint.mean, atol=1e-15)
    swapped = channel.propagate(joint, ChannelParams(0.0, 0.9))
    np.testing.assert_allclose(swapped.cov[:4, :4], joint.cov[4:, 4:], atol=1e-15)
    np.testing.assert_allclose(swapped.cov[4:, 4:], joint.cov[:4, :4], atol=1e-15)
    np.testing.assert_allclose(swapped.mean[4:], mu, atol=1e-15)
    np.testing.assert_allclose(swapped.mean[:4], 0, atol=1e-15)


def test_propagate_dimension_mismatch():
    joint = channel.joint_state(InputPolicy(0.0, 1.0), ChannelParams(0.5, 0.0, 3))
    with pytest.raises(ValueError):
        channel.propagate(joint, ChannelParams(0.5, 0.0, 2))


def test_propagate_matches_closed_form_receiver_block():
    pol, par = InputPolicy(0.0, 2.0), ChannelParams(0.8, 1.0)
    out = channel.propagate(channel.joint_state(pol, par), par)
    v_out = channel.closed_form_covariances(pol, par)[0]
    np.testing.assert_allclose(out.cov[:4, :4], v_out, atol=1e-12)
    np.testing.assert_allclose(channel.marginal(out, "receiver").cov, v_out, atol=1e-12)


def test_marginal_vacuum_and_spectra():
    vac = channel.propagate(channel.joint_state(InputPolicy(0.0, 0.0), ChannelParams(0.3)), ChannelParams(0.3))
    np.testing.assert_allclose(channel.marginal(vac, "receiver").cov, 0.5 * np.eye(4), atol=1e-15)
    pol, par = InputPolicy(0.7, 2.0), ChannelParams(0.35, -0.4, 3)
    out = channel.propagate(channel.joint_state(pol, par), par)
    np.testing.assert_allclose(gauss.symplectic_eigenvalues(channel.marginal(out, "receiver").cov),
                               gauss.symplectic_eigenvalues(channel.marginal(out, "eavesdropper").cov),
                               atol=1e-10)
    with pytest.raises(ValueError):
        channel.marginal(out, "alice")


def test_displacement_scaling():
    eta, mu = 0.64, np.array([1.0, -0.5, 0.25, 2.0])
    par = ChannelParams(eta, 0.3)
    out = channel.propagate(channel.joint_state(InputPolicy(0.2, 1.0), par, mu), par)
    np.testing.assert_allclose(channel.marginal(out, "receiver").mean, math.sqrt(eta) * mu, atol=1e-14)
    np.testing.assert_allclose(channel.marginal(out, "eavesdropper").mean, math.sqrt(1 - eta) * mu, atol=1e-14)


@given(st.lists(st.floats(-5, 5), min_size=4, max_size=4))
def test_conditional_covariance_independent_of_mean(mu):
    par = ChannelParams(0.7, 0.6)
    pol = InputPolicy(0.3, 1.0)
    ref = channel.propagate(channel.joint_state(pol, par), par)
    out = channel.propagate(channel.joint_state(pol, par, mu), par)
    np.testing.assert_array_equal(out.cov, ref.cov)


def test_averaged_cov():
    V = 0.5 * np.eye(4)
    pol0 = InputPolicy(0.0, 0.0)
    np.testing.assert_array_equal(channel.averaged_cov(V, pol0, ChannelParams(0.8), "receiver"), V)
    pol = InputPolicy(0.0, 2.0)
    vbar = channel.averaged_cov(V, pol, ChannelParams(0.8), "receiver")
    np.testing.assert_allclose(vbar, 1.3 * np.eye(4))
    np.testing.assert_allclose(gauss.symplectic_eigenvalues(vbar), [1.3, 1.3])


@given(st.floats(-1, 1), st.floats(-2, 2), st.floats(0, 4))
def test_averaged_cov_balanced_splitter(r, s, n):
    pol = InputPolicy(r, n + math.sinh(r) ** 2)
    vo, ve, vbo, vbe = channel.output_covariances(pol, ChannelParams(0.5, s))
    np.testing.assert_allclose(vbo, vbe, atol=1e-12 * max(1.0, np.abs(vbo).max()))


def test_closed_form_special_cases():
    pol = InputPolicy(0.6, 1.0)
    v_out = channel.closed_form_covariances(pol, ChannelParams(0.3, 0.6))[0]
    np.testing.assert_allclose(v_out, 0.5 * gauss.squeeze_exponent(-0.6), atol=1e-14)
    v_out, v_eve, _, _ = channel.closed_form_covariances(pol, ChannelParams(1.0, -0.2))
    np.testing.assert_allclose(v_out, 0.5 * gauss.squeeze_exponent(-0.6), atol=1e-14)
    np.testing.assert_allclose(v_eve, 0.5 * gauss.squeeze_exponent(0.2), atol=1e-14)
    with pytest.raises(NotImplementedError):
        channel.closed_form_covariances(pol, ChannelParams(0.5, 0.0, 3))


def test_closed_form_matches_generic_example():
    pol, par = InputPolicy(0.5, 2.0), ChannelParams(0.8, 1.0)
    for a, b in zip(channel.output_covariances(pol, par), channel.closed_form_covariances(pol, par)):
        np.testing.assert_allclose(a, b, atol=1e-12)


def test_closed_form_spectra_examples():
    lam, lam_e, _, _ = channel.closed_form_spectra(InputPolicy(0.4, 1.0), ChannelParams(0.3, 0.4))
    np.testing.assert_allclose([lam, lam_e], 0.5, atol=1e-15)
    lam = channel.closed_form_spectra(InputPolicy(0.0, 2.0), ChannelParams(0.8, 1.0))[0]
    assert lam[0] == pytest.approx(0.5 * math.sqrt(0.68 + 0.32 * COSH2), abs=1e-14)
    _, _, lbo, lbe = channel.closed_form_spectra(InputPolicy(0.0, 2.0), ChannelParams(0.8, 0.0))
    assert lbo[0] == pytest.approx(1.3, abs=1e-14)
    assert lbe[0] == pytest.approx(0.7, abs=1e-14)


def test_differential_generic_vs_closed_form():
    for pol, par in _tuples(200, 11):
        generic = channel.output_covariances(pol, par)
        closed = channel.closed_form_covariances(pol, par)
        for a, b in zip(generic, closed):
            np.testing.assert_allclose(a, b, atol=1e-10, rtol=0)
        spectra = [gauss.symplectic_eigenvalues(v) for v in generic]
        for a, b in zip(spectra, channel.closed_form_spectra(pol, par)):
            np.testing.assert_allclose(a, b, atol=1e-10, rtol=0)
        np.testing.assert_allclose(spectra[0], spectra[1], atol=1e-10, rtol=0)


def test_gaussian_state_validation():
    with pytest.raises(ValueError):
        GaussianState(np.zeros(3), np.eye(4))
    st_ = GaussianState(np.zeros(2), np.array([[1.0, 0.2], [0.2000000000001, 1.0]]))
    assert np.array_equal(st_.cov, st_.cov.T)
    assert st_.n_modes == 1
