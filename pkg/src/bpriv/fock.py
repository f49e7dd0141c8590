"""Brute-force two-use channel in a truncated Fock basis.

Used only as an independent check of the Gaussian pipeline. Pure states of the
four modes ``(a1, a2, b1, b2)`` are evolved as amplitude arrays; reduced density
matrices of two modes are formed only when entropies are measured.

Operator conventions:

* ``q = (a + a^dag)/sqrt(2)``, vacuum variance 1/2, as in :mod:`bpriv.gauss`.
* A quadrature mean ``(m_q, m_p)`` is produced by the coherent amplitude
  ``alpha = (m_q + i m_p)/sqrt(2)``.
* Two-mode squeezing with strength ``x`` is ``exp[x (a1^dag a2^dag - a1 a2)]``.
  This is the symmetric form ``exp[x/2 sum_{k != k'} (...)]`` with each pair
  counted twice, and reproduces the covariance ``0.5 A_{-x}``.
* The beam splitter ``U`` satisfies ``U^dag a U = sqrt(eta) a - sqrt(1-eta) b``.

Squeezers and displacements are obtained by exponentiating generators in a
padded basis and projecting back onto the cutoff; beam splitters conserve the
total photon number and are exponentiated in a basis large enough to be exact.
The norm lost by the projection is reported as the truncation deficit.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.sparse as sp
from scipy.linalg import expm
from scipy.sparse.linalg import expm_multiply

from bpriv.channel import ChannelParams, InputPolicy
from bpriv.errors import CutoffError, OracleRegimeError
from bpriv.privacy import private_information

TRUNC_TOL = 1e-6
NEG_EIG_TOL = 1e-10
WEIGHT_TOL = 1e-8
PRUNE_WEIGHT = 1e-12
COND_SPREAD_TOL = 1e-6

ORACLE_MAX_N_EFF = 0.75
ORACLE_MAX_SQUEEZE = 0.5
ORACLE_CUTOFFS = (10, 16)

ORDERS = ("squeeze_then_displace", "displace_then_squeeze")


@dataclass(frozen=True)
class FockState:
    """Truncated amplitudes, one axis per mode, each of length ``cutoff``."""

    amplitudes: np.ndarray
    cutoff: int

    @property
    def n_modes(self) -> int:
        return self.amplitudes.ndim

    @property
    def deficit(self) -> float:
        return float(1.0 - np.vdot(self.amplitudes, self.amplitudes).real)


def _padded(D: int) -> int:
    return 2 * D + 10


@lru_cache(maxsize=None)
def annihilation(D: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, D, dtype=float)), 1)


@lru_cache(maxsize=None)
def _two_mode_squeeze_generator(D: int) -> sp.csr_matrix:
    a = sp.csr_matrix(annihilation(D))
    a1 = sp.kron(a, sp.identity(D), format="csr")
    a2 = sp.kron(sp.identity(D), a, format="csr")
    return (a1.T @ a2.T - a1 @ a2).tocsr()


def displacement_matrix(alpha: complex, D: int) -> np.ndarray:
    """``exp(alpha a^dag - alpha* a)`` projected onto the first ``D`` levels."""
    Dw = _padded(D)
    a = annihilation(Dw)
    return expm(alpha * a.T - np.conj(alpha) * a)[:D, :D]


def _squeeze_apply(x: float, vec: np.ndarray, Dw: int) -> np.ndarray:
    if x == 0.0:
        return vec
    return expm_multiply(x * _two_mode_squeeze_generator(Dw), vec.reshape(-1)).reshape(Dw, Dw)


@lru_cache(maxsize=64)
def squeezed_vacuum(x: float, D: int) -> np.ndarray:
    """Two-mode squeezed vacuum amplitudes ``psi[n1, n2]`` truncated to ``D``."""
    out = np.array(_squeezed_vacuum_padded(x, D)[:D, :D])
    out.setflags(write=False)
    return out


def _coherent_column(alpha: complex, Dw: int) -> np.ndarray:
    a = annihilation(Dw)
    vec = np.zeros(Dw, dtype=complex)
    vec[0] = 1.0
    return expm(alpha * a.T - np.conj(alpha) * a) @ vec


def _input_amplitudes(alpha1: complex, alpha2: complex, r: float, D: int, order: str) -> np.ndarray:
    if order == "squeeze_then_displace":
        Dw = _padded(D)
        a = annihilation(Dw)
        d1 = expm(alpha1 * a.T - np.conj(alpha1) * a)
        d2 = expm(alpha2 * a.T - np.conj(alpha2) * a)
        # psi[n1, n2] -> D1 psi D2^T, all in the padded basis before projecting
        return (d1 @ _squeezed_vacuum_padded(r, D) @ d2.T)[:D, :D]
    if order == "displace_then_squeeze":
        Dw = _padded(D)
        prod = np.outer(_coherent_column(alpha1, Dw), _coherent_column(alpha2, Dw))
        return _squeeze_apply(r, prod, Dw)[:D, :D]
    raise ValueError(f"order must be one of {ORDERS}, got {order!r}")


@lru_cache(maxsize=64)
def _squeezed_vacuum_padded(x: float, D: int) -> np.ndarray:
    Dw = _padded(D)
    vac = np.zeros((Dw, Dw), dtype=complex)
    vac[0, 0] = 1.0
    out = _squeeze_apply(x, vac, Dw)
    out.setflags(write=False)
    return out


def mean_to_alpha(mu) -> tuple[complex, complex]:
    """Quadrature means ``(q1, q2, p1, p2)`` to coherent amplitudes of each mode."""
    q1, q2, p1, p2 = (float(v) for v in mu)
    return complex(q1, p1) / math.sqrt(2), complex(q2, p2) / math.sqrt(2)


def build_input(mu1: complex, mu2: complex, r: float, D: int,
                order: str = "squeeze_then_displace", trunc_tol: float = TRUNC_TOL) -> FockState:
    """Two-mode input: squeezed vacuum with coherent amplitudes ``mu1``, ``mu2``.

    ``order="squeeze_then_displace"`` gives ``D(mu1) D(mu2) S(r)|00>``, whose
    quadrature means are ``sqrt(2) (Re mu, Im mu)`` independently of ``r``; this is
    the ensemble the Gaussian pipeline describes. ``"displace_then_squeeze"``
    gives ``S(r) D(mu2) D(mu1)|00>``, whose means are the displacement mapped by
    the squeezer's symplectic matrix.

    Raises:
        CutoffError: if the truncated state misses more than ``trunc_tol`` of norm.
    """
    if D < 2:
        raise ValueError(f"cutoff must be >= 2, got {D}")
    state = FockState(_input_amplitudes(complex(mu1), complex(mu2), float(r), D, order), D)
    if state.deficit > trunc_tol:
        raise CutoffError(f"cutoff D={D} loses {state.deficit:.3e} of the input norm")
    return state


@lru_cache(maxsize=32)
def beam_splitter_unitary(eta: float, D: int) -> np.ndarray:
    """Two-mode beam splitter as a ``(D*D, D*D)`` matrix on ``|n_a, n_b>``.

    The generator ``theta (a^dag b - a b^dag)`` conserves ``n_a + n_b``; with
    ``sin theta = -sqrt(1 - eta)`` it realizes the Heisenberg map
    ``a -> sqrt(eta) a - sqrt(1-eta) b``. Exponentiating in a basis with per-mode
    cutoff ``2D - 1`` holds every photon-number block reachable from the ``D`` box
    exactly, so the only approximation is the final projection.
    """
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta must lie in [0, 1], got {eta}")
    Dw = 2 * D - 1
    theta = -math.asin(math.sqrt(1.0 - eta))
    a = annihilation(Dw)
    eye = np.eye(Dw)
    A = np.kron(a, eye)
    B = np.kron(eye, a)
    U = expm(theta * (A.T @ B - A @ B.T)).reshape(Dw, Dw, Dw, Dw)
    out = np.ascontiguousarray(U[:D, :D, :D, :D]).reshape(D * D, D * D)
    out.setflags(write=False)
    return out


def _evolve(inp: np.ndarray, env: np.ndarray, U: np.ndarray, D: int) -> np.ndarray:
    # X[(a1, b1), (a2, b2)] = in[a1, a2] env[b1, b2]; one splitter per use
    X = np.einsum("ac,bd->abcd", inp, env).reshape(D * D, D * D)
    Y = U @ X @ U.T
    return Y.reshape(D, D, D, D).transpose(0, 2, 1, 3)


def apply_channel(inp: FockState, s: float, eta: float, D: int | None = None,
                  trunc_tol: float = TRUNC_TOL) -> FockState:
    """Couple a two-mode input to the squeezed environment; returns modes (a1, a2, b1, b2)."""
    D = inp.cutoff if D is None else D
    if D != inp.cutoff or inp.n_modes != 2:
        raise ValueError("apply_channel expects a two-mode input at the same cutoff")
    env = squeezed_vacuum(float(s), D)
    out = FockState(_evolve(inp.amplitudes, env, beam_splitter_unitary(float(eta), D), D), D)
    if out.deficit > trunc_tol:
        raise CutoffError(f"cutoff D={D} loses {out.deficit:.3e} of the output norm")
    return out


def _party_matrix(amps: np.ndarray, party: str) -> np.ndarray:
    D = amps.shape[0]
    M = amps.reshape(D * D, D * D)
    if party == "receiver":
        return M
    if party == "eavesdropper":
        return M.T
    raise ValueError(f"unknown party {party!r}")


def reduced_density(state: FockState, party: str) -> np.ndarray:
    """Partial trace onto the receiver (a1, a2) or eavesdropper (b1, b2) modes."""
    if state.n_modes != 4:
        raise ValueError("reduced_density expects a four-mode state")
    M = _party_matrix(state.amplitudes, party)
    return M @ M.conj().T


def density_entropy(rho: np.ndarray) -> float:
    """Von Neumann entropy (bits) of a trace-normalized copy of ``rho``."""
    rho = 0.5 * (rho + rho.conj().T)
    w = np.linalg.eigvalsh(rho)
    if w[0] < -NEG_EIG_TOL:
        raise ArithmeticError(f"density matrix has eigenvalue {w[0]:.3e}")
    w = np.clip(w, 0.0, None)
    w = w / w.sum()
    w = w[w > 0]
    return float(-np.sum(w * np.log2(w)))


def reduced_entropy(state: FockState, party: str) -> float:
    return density_entropy(reduced_density(state, party))


def quadrature_moments(state: FockState):
    """Quadrature means and symmetrized covariance of a Fock state.

    Ordered like the Gaussian pipeline: one ``(q1, q2, p1, p2)`` block per party,
    where each consecutive pair of modes is a party (two uses). Second moments use the
    exact commutator ``[a, a^dag] = 1`` rather than the truncated one.
    """
    psi = state.amplitudes
    m = psi.ndim
    D = state.cutoff
    a = annihilation(D)
    lowered = [np.moveaxis(np.tensordot(a, psi, axes=([1], [k])), 0, k) for k in range(m)]
    first = np.array([np.vdot(psi, x) for x in lowered])
    aa = np.array([[np.vdot(psi, np.moveaxis(np.tensordot(a, lowered[j], axes=([1], [i])), 0, i))
                    for j in range(m)] for i in range(m)])
    ad_a = np.array([[np.vdot(lowered[i], lowered[j]) for j in range(m)] for i in range(m)])
    eye = np.eye(m)
    # c = (a_1..a_m, a_1^dag..a_m^dag); C[i, j] = <c_i c_j>
    C = np.block([[aa, ad_a.T + eye], [ad_a, aa.conj()]])
    mean_c = np.concatenate([first, first.conj()])
    s2 = 1 / math.sqrt(2)
    T_q = np.hstack([s2 * eye, s2 * eye])
    T_p = np.hstack([-1j * s2 * eye, 1j * s2 * eye])
    rows = []
    for block in (slice(k, k + 2) for k in range(0, m, 2)):
        rows.append(T_q[block])
        rows.append(T_p[block])
    T = np.vstack(rows)
    mean = (T @ mean_c).real
    second = T @ (0.5 * (C + C.T)) @ T.T
    cov = second.real - np.outer(mean, mean)
    return mean, cov


def check_oracle_regime(policy: InputPolicy, params: ChannelParams, D: int, quad_order: int):
    if params.n_uses != 2:
        raise OracleRegimeError("the Fock oracle only covers n_uses = 2")
    if policy.n_eff > ORACLE_MAX_N_EFF:
        raise OracleRegimeError(f"n_eff={policy.n_eff} exceeds the oracle limit {ORACLE_MAX_N_EFF}")
    if abs(policy.r) > ORACLE_MAX_SQUEEZE:
        raise OracleRegimeError(f"|r|={abs(policy.r)} exceeds the oracle limit {ORACLE_MAX_SQUEEZE}")
    if abs(params.s) > ORACLE_MAX_SQUEEZE:
        raise OracleRegimeError(f"|s|={abs(params.s)} exceeds the oracle limit {ORACLE_MAX_SQUEEZE}")
    lo, hi = ORACLE_CUTOFFS
    if not lo <= D <= hi:
        raise OracleRegimeError(f"cutoff D={D} outside the oracle range [{lo}, {hi}]")
    if quad_order < 5 or quad_order % 2 == 0:
        raise OracleRegimeError(f"quadrature order must be odd and >= 5, got {quad_order}")


def quadrature_nodes(n: float, order: int):
    """Tensor Gauss-Hermite rule over the four quadrature means of the ensemble.

    Each real component is normal with variance ``n / 2``. Returns ``(nodes, weights)``
    with nodes of shape ``(k, 4)`` in ``(q1, q2, p1, p2)`` order.
    """
    if n == 0:
        return np.zeros((1, 4)), np.ones(1)
    x, w = np.polynomial.hermite.hermgauss(order)
    x = x * math.sqrt(n)  # sqrt(2 * variance)
    w = w / math.sqrt(math.pi)
    grids = np.meshgrid(x, x, x, x, indexing="ij")
    wgrid = np.meshgrid(w, w, w, w, indexing="ij")
    nodes = np.stack([g.ravel() for g in grids], axis=1)
    weights = np.prod(np.stack([g.ravel() for g in wgrid], axis=1), axis=1)
    keep = weights >= PRUNE_WEIGHT
    return nodes[keep], weights[keep]


@dataclass
class OracleResult:
    chi_out: float
    chi_eve: float
    s_out_avg: float
    s_eve_avg: float
    s_cond: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    node_deficits: np.ndarray = field(repr=False)
    purity_gap: float = 0.0
    purity_checked: int = 0
    weight_deficit: float = 0.0
    trace_deficit_out: float = 0.0
    trace_deficit_eve: float = 0.0

    @property
    def i_p(self) -> float:
        return 0.5 * (self.chi_out - self.chi_eve)

    @property
    def n_nodes(self) -> int:
        return len(self.weights)

    @property
    def max_node_deficit(self) -> float:
        return float(self.node_deficits.max())

    @property
    def cond_spread(self) -> float:
        """Ensemble-weighted mean deviation of the conditional entropy from its average.

        This is the error made by treating the conditional entropy as a constant
        under the ensemble integral.
        """
        avg = float(np.dot(self.weights, self.s_cond))
        return float(np.dot(self.weights, np.abs(self.s_cond - avg)))

    @property
    def cond_range(self) -> float:
        """Unweighted max - min of the conditional entropy over all nodes."""
        return float(self.s_cond.max() - self.s_cond.min())


def run_oracle(policy: InputPolicy, params: ChannelParams, D: int = 12, quad_order: int = 7,
               workers: int = 1, trunc_tol: float = TRUNC_TOL, purity_stride: int = 16) -> OracleResult:
    """Ensemble-averaged and conditional entropies of both parties, with diagnostics.

    Every node's four-mode output is pure, so the receiver and eavesdropper
    conditional states share their nonzero spectrum. The receiver's is computed at
    every node; the eavesdropper's is computed independently at every
    ``purity_stride``-th node (and the heaviest one) and the largest entropy
    mismatch is reported as ``purity_gap``.
    """
    check_oracle_regime(policy, params, D, quad_order)
    nodes, weights = quadrature_nodes(policy.n, quad_order)
    weight_deficit = abs(1.0 - float(weights.sum()))
    if weight_deficit > WEIGHT_TOL:
        raise ArithmeticError(f"quadrature weights miss {weight_deficit:.3e} of the mass")
    env = squeezed_vacuum(float(params.s), D)
    U = beam_splitter_unitary(float(params.eta), D)
    heaviest = int(np.argmax(weights))
    stride = max(int(purity_stride), 1)

    def node(i):
        a1, a2 = mean_to_alpha(nodes[i])
        amps = _evolve(_input_amplitudes(a1, a2, policy.r, D, "squeeze_then_displace"), env, U, D)
        M = amps.reshape(D * D, D * D)
        rho_out = M @ M.conj().T
        rho_eve = M.T @ M.conj()
        s_out = density_entropy(rho_out)
        gap = None
        if i % stride == 0 or i == heaviest:
            gap = abs(s_out - density_entropy(rho_eve))
        deficit = 1.0 - float(np.vdot(amps, amps).real)
        return rho_out, rho_eve, s_out, gap, deficit

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(node, range(len(nodes))))
    else:
        results = [node(i) for i in range(len(nodes))]

    rho_out_avg = np.zeros((D * D, D * D), dtype=complex)
    rho_eve_avg = np.zeros_like(rho_out_avg)
    for w, (ro, re, *_rest) in zip(weights, results):
        rho_out_avg += w * ro
        rho_eve_avg += w * re
    s_cond = np.array([res[2] for res in results])
    gaps = [res[3] for res in results if res[3] is not None]
    node_deficits = np.array([res[4] for res in results])
    trace_out = 1.0 - float(np.trace(rho_out_avg).real)
    trace_eve = 1.0 - float(np.trace(rho_eve_avg).real)
    if max(trace_out, trace_eve) > trunc_tol:
        raise CutoffError(
            f"cutoff D={D} loses {max(trace_out, trace_eve):.3e} of the averaged trace"
        )
    s_out_avg = density_entropy(rho_out_avg)
    s_eve_avg = density_entropy(rho_eve_avg)
    s_cond_avg = float(np.dot(weights, s_cond))
    return OracleResult(
        chi_out=s_out_avg - s_cond_avg,
        chi_eve=s_eve_avg - s_cond_avg,
        s_out_avg=s_out_avg,
        s_eve_avg=s_eve_avg,
        s_cond=s_cond,
        weights=weights,
        node_deficits=node_deficits,
        purity_gap=max(gaps),
        purity_checked=len(gaps),
        weight_deficit=weight_deficit,
        trace_deficit_out=trace_out,
        trace_deficit_eve=trace_eve,
    )


def ensemble_chi(policy: InputPolicy, params: ChannelParams, D: int = 12, quad_order: int = 7):
    """Oracle Holevo quantities ``(chi_out, chi_eve)`` for two uses."""
    res = run_oracle(policy, params, D, quad_order)
    return res.chi_out, res.chi_eve


@dataclass(frozen=True)
class Comparison:
    gaussian: dict
    oracle: dict
    diff: dict
    diagnostics: dict


def compare_report(policy: InputPolicy, params: ChannelParams, D: int = 12,
                   quad_order: int = 7, workers: int = 1) -> Comparison:
    """Gaussian pipeline versus Fock oracle for ``chi_out``, ``chi_eve`` and ``I_p``."""
    rep = private_information(policy, params)
    res = run_oracle(policy, params, D, quad_order, workers=workers)
    gauss_vals = {"chi_out": rep.chi_out, "chi_eve": rep.chi_eve, "i_p": rep.i_p}
    oracle_vals = {"chi_out": res.chi_out, "chi_eve": res.chi_eve, "i_p": res.i_p}
    return Comparison(
        gaussian=gauss_vals,
        oracle=oracle_vals,
        diff={k: abs(gauss_vals[k] - oracle_vals[k]) for k in gauss_vals},
        diagnostics={
            "cutoff": D,
            "quad_order": quad_order,
            "n_nodes": res.n_nodes,
            "weight_deficit": res.weight_deficit,
            "trace_deficit_out": res.trace_deficit_out,
            "trace_deficit_eve": res.trace_deficit_eve,
            "max_node_deficit": res.max_node_deficit,
            "cond_spread": res.cond_spread,
            "cond_range": res.cond_range,
            "purity_gap": res.purity_gap,
            "s_cond": float(np.dot(res.weights, res.s_cond)),
        },
    )
