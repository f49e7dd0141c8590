"""Lossy bosonic memory channel at the covariance level.

The joint state of ``n`` signal modes and ``n`` environment modes is stored in the
block ordering ``gamma = (u, v)``: the signal quadratures ``u`` in the usual
``(q..., p...)`` order followed by the environment quadratures ``v`` in the same
order. Each party's marginal is therefore a contiguous block that is already in
the single-party convention of :mod:`bpriv.gauss`.

The beam splitter maps the annihilation operators (Heisenberg picture) as::

    a_k -> sqrt(eta) a_k - sqrt(1 - eta) b_k
    b_k -> sqrt(1 - eta) a_k + sqrt(eta) b_k

With ``B = [[sqrt(eta) I, sqrt(1-eta) I], [-sqrt(1-eta) I, sqrt(eta) I]]`` this is
``gamma -> B^T gamma`` on quadrature vectors, hence ``mean -> B^T mean`` and
``cov -> B^T cov B``. The Wigner exponent transforms as ``A -> B^T A B`` and the
covariance as ``0.5 inv(B^T A B) = B^T (0.5 inv(A)) B`` because ``B`` is orthogonal.

For ``n > 2`` uses the ensemble term ``eta N / 2`` (resp. ``(1 - eta) N / 2``) is
added to every quadrature of the 2n-dimensional block, the direct extension of
the two-use formulas for i.i.d. displacements.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from bpriv import gauss
from bpriv.errors import PhotonBudgetError

PARTIES = ("receiver", "eavesdropper")


def photon_budget(n_eff: float, r: float) -> float:
    """Ensemble photon number ``N = n_eff - sinh(r)^2`` left after entangling.

    Raises:
        PhotonBudgetError: if ``N < 0``.
    """
    if n_eff < 0:
        raise ValueError(f"n_eff must be nonnegative, got {n_eff}")
    n = n_eff - math.sinh(r) ** 2
    if n < 0:
        # boundary r = asinh(sqrt(n_eff)) can round to a tiny negative N
        if n > -1e-12 * max(1.0, n_eff):
            return 0.0
        raise PhotonBudgetError(
            f"r={r} needs sinh^2 r = {math.sinh(r) ** 2:.6g} photons, budget n_eff={n_eff}"
        )
    return n


def max_entanglement(n_eff: float) -> float:
    """Largest ``|r|`` compatible with the budget, ``asinh(sqrt(n_eff))``."""
    if n_eff < 0:
        raise ValueError(f"n_eff must be nonnegative, got {n_eff}")
    return math.asinh(math.sqrt(n_eff))


@dataclass(frozen=True)
class ChannelParams:
    eta: float
    s: float = 0.0
    n_uses: int = 2

    def __post_init__(self):
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError(f"eta must lie in [0, 1], got {self.eta}")
        if not math.isfinite(self.s):
            raise ValueError(f"s must be finite, got {self.s}")
        if int(self.n_uses) != self.n_uses or self.n_uses < 2:
            raise ValueError(f"n_uses must be an integer >= 2, got {self.n_uses}")


@dataclass(frozen=True)
class InputPolicy:
    """Encoding ensemble: input entanglement ``r`` and photon budget ``n_eff``."""

    r: float
    n_eff: float

    def __post_init__(self):
        photon_budget(self.n_eff, self.r)

    @property
    def n(self) -> float:
        """Ensemble (displacement) photon number."""
        return photon_budget(self.n_eff, self.r)

    @property
    def r_max(self) -> float:
        return max_entanglement(self.n_eff)


@dataclass(frozen=True)
class GaussianState:
    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        cov = gauss.as_covariance(self.cov)
        mean = np.asarray(self.mean, dtype=float)
        if mean.shape != (cov.shape[0],):
            raise ValueError(f"mean has shape {mean.shape}, covariance {cov.shape}")
        object.__setattr__(self, "cov", cov)
        object.__setattr__(self, "mean", mean)

    @property
    def n_modes(self) -> int:
        return self.cov.shape[0] // 2


def beam_splitter_matrix(eta: float, n_uses: int = 2) -> np.ndarray:
    """Orthogonal ``4n x 4n`` beam-splitter matrix in the ``(u, v)`` block ordering."""
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta must lie in [0, 1], got {eta}")
    t = math.sqrt(eta)
    l = math.sqrt(1.0 - eta)
    eye = np.eye(2 * n_uses)
    return np.block([[t * eye, l * eye], [-l * eye, t * eye]])


def joint_state(policy: InputPolicy, params: ChannelParams, mu=None) -> GaussianState:
    """Input (squeezed, displaced by ``mu``) tensored with the squeezed environment.

    ``mu`` holds the quadrature means of the signal modes, ``(q_1.., p_1..)``.
    """
    n = params.n_uses
    mu = np.zeros(2 * n) if mu is None else np.asarray(mu, dtype=float)
    if mu.shape != (2 * n,):
        raise ValueError(f"mu must have length {2 * n}, got shape {mu.shape}")
    # re-validate in case the policy was built around __post_init__
    photon_budget(policy.n_eff, policy.r)
    cov = np.zeros((4 * n, 4 * n))
    cov[: 2 * n, : 2 * n] = gauss.squeezed_vacuum_cov(policy.r, n)
    cov[2 * n :, 2 * n :] = gauss.squeezed_vacuum_cov(params.s, n)
    return GaussianState(np.concatenate([mu, np.zeros(2 * n)]), cov)


def propagate(joint: GaussianState, params: ChannelParams) -> GaussianState:
    """Apply the beam-splitter coupling to every (signal, environment) pair."""
    B = beam_splitter_matrix(params.eta, params.n_uses)
    if joint.cov.shape != B.shape:
        raise ValueError(
            f"joint state has dimension {joint.cov.shape[0]}, channel expects {B.shape[0]}"
        )
    return GaussianState(B.T @ joint.mean, B.T @ joint.cov @ B)


def _party_slice(dim: int, party: str) -> slice:
    if party not in PARTIES:
        raise ValueError(f"party must be one of {PARTIES}, got {party!r}")
    half = dim // 2
    return slice(0, half) if party == "receiver" else slice(half, dim)


def marginal(joint_out: GaussianState, party: str) -> GaussianState:
    """Gaussian partial trace: keep the receiver (signal) or eavesdropper block."""
    dim = joint_out.cov.shape[0]
    if dim % 4:
        raise ValueError(f"joint state dimension {dim} is not 4n")
    sl = _party_slice(dim, party)
    return GaussianState(joint_out.mean[sl], joint_out.cov[sl, sl])


def averaged_cov(conditional: np.ndarray, policy: InputPolicy, params: ChannelParams,
                 party: str) -> np.ndarray:
    """Ensemble-averaged covariance: add ``eta N/2`` (receiver) or ``(1-eta) N/2``."""
    _party_slice(4, party)
    weight = params.eta if party == "receiver" else 1.0 - params.eta
    conditional = gauss.as_covariance(conditional)
    return conditional + 0.5 * weight * policy.n * np.eye(conditional.shape[0])


def output_covariances(policy: InputPolicy, params: ChannelParams):
    """Generic pipeline: ``(V_out, V_eve, Vbar_out, Vbar_eve)`` for any ``n_uses``."""
    out = propagate(joint_state(policy, params), params)
    v_out = marginal(out, "receiver").cov
    v_eve = marginal(out, "eavesdropper").cov
    return (
        v_out,
        v_eve,
        averaged_cov(v_out, policy, params, "receiver"),
        averaged_cov(v_eve, policy, params, "eavesdropper"),
    )


def _require_two_uses(params: ChannelParams):
    if params.n_uses != 2:
        raise NotImplementedError("closed forms exist only for n_uses = 2")


def closed_form_covariances(policy: InputPolicy, params: ChannelParams):
    """Direct two-use formulas for ``(V_out, V_eve, Vbar_out, Vbar_eve)``.

    ``V_out = [eta inv(A_r) + (1-eta) inv(A_s)] / 2`` and symmetrically for the
    eavesdropper with ``eta <-> 1 - eta``; ``inv(A_x)`` is taken as ``A_{-x}``.
    """
    _require_two_uses(params)
    eta = params.eta
    inv_r = gauss.squeeze_exponent(-policy.r, "input")
    inv_s = gauss.squeeze_exponent(-params.s, "environment")
    v_out = 0.5 * (eta * inv_r + (1 - eta) * inv_s)
    v_eve = 0.5 * ((1 - eta) * inv_r + eta * inv_s)
    eye = np.eye(4)
    n = policy.n
    return v_out, v_eve, v_out + 0.5 * eta * n * eye, v_eve + 0.5 * (1 - eta) * n * eye


def closed_form_spectra(policy: InputPolicy, params: ChannelParams):
    """Closed-form symplectic spectra ``(lam_out, lam_eve, lambar_out, lambar_eve)``.

    Each spectrum is doubly degenerate and returned as a length-2 array.
    """
    _require_two_uses(params)
    eta, r, s = params.eta, policy.r, params.s
    n = policy.n
    mix = 2 * eta * (1 - eta)
    lam = 0.5 * math.sqrt(1 - mix + mix * math.cosh(2 * (r - s)))
    cross = mix * (math.cosh(2 * (r - s)) + n * math.cosh(2 * s) - 1)
    signal = n * n + 2 * n * math.cosh(2 * r)
    lam_bar_out = 0.5 * math.sqrt(1 + eta**2 * signal + cross)
    lam_bar_eve = 0.5 * math.sqrt(1 + (1 - eta) ** 2 * signal + cross)
    pair = lambda x: np.array([x, x])
    return pair(lam), pair(lam), pair(lam_bar_out), pair(lam_bar_eve)
