"""Holevo quantities, private information and its maximization over entanglement."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from bpriv import gauss
from bpriv.channel import (
    ChannelParams,
    InputPolicy,
    closed_form_spectra,
    max_entanglement,
    output_covariances,
    photon_budget,
)
from bpriv.errors import PhotonBudgetError

__all__ = [
    "PrivacyReport",
    "SweepGrid",
    "SweepRow",
    "photon_budget",
    "max_entanglement",
    "holevo",
    "private_information",
    "golden_section_max",
    "maximize_over_r",
    "sweep",
    "normal_mode_private_information",
]

CLOSED_FORM_TOL = 1e-9


@dataclass(frozen=True)
class PrivacyReport:
    chi_out: float
    chi_eve: float
    i_p: float
    spectra: dict
    policy: InputPolicy
    params: ChannelParams


def _spectra(policy: InputPolicy, params: ChannelParams) -> dict:
    v_out, v_eve, vbar_out, vbar_eve = output_covariances(policy, params)
    return {
        "out": gauss.symplectic_eigenvalues(v_out),
        "eve": gauss.symplectic_eigenvalues(v_eve),
        "out_avg": gauss.symplectic_eigenvalues(vbar_out),
        "eve_avg": gauss.symplectic_eigenvalues(vbar_eve),
    }


def _check_closed_form(spectra: dict, policy: InputPolicy, params: ChannelParams):
    expected = closed_form_spectra(policy, params)
    for key, ref in zip(("out", "eve", "out_avg", "eve_avg"), expected):
        err = float(np.max(np.abs(spectra[key] - ref)))
        if err > CLOSED_FORM_TOL * max(1.0, float(ref[0])):
            raise AssertionError(
                f"generic {key} spectrum deviates from closed form by {err:.3e} "
                f"at eta={params.eta}, r={policy.r}, s={params.s}, n_eff={policy.n_eff}"
            )


def holevo(policy: InputPolicy, params: ChannelParams, party: str) -> float:
    """Holevo information (bits, over all ``n_uses``) available to ``party``.

    The conditional entropy does not depend on the displacement, so the ensemble
    integral reduces to ``S(Vbar) - S(V)``.
    """
    spectra = _spectra(policy, params)
    if party == "receiver":
        return gauss.entropy_from_spectrum(spectra["out_avg"]) - gauss.entropy_from_spectrum(spectra["out"])
    if party == "eavesdropper":
        return gauss.entropy_from_spectrum(spectra["eve_avg"]) - gauss.entropy_from_spectrum(spectra["eve"])
    raise ValueError(f"unknown party {party!r}")


def private_information(policy: InputPolicy, params: ChannelParams,
                        check_closed_form: bool = True) -> PrivacyReport:
    """Per-use private information ``(chi_out - chi_eve) / n_uses``.

    Computed through the generic covariance pipeline. For two uses the spectra are
    also compared against the closed forms when ``check_closed_form`` is set.
    """
    spectra = _spectra(policy, params)
    if check_closed_form and params.n_uses == 2:
        _check_closed_form(spectra, policy, params)
    s_out = gauss.entropy_from_spectrum(spectra["out"])
    s_eve = gauss.entropy_from_spectrum(spectra["eve"])
    chi_out = gauss.entropy_from_spectrum(spectra["out_avg"]) - s_out
    chi_eve = gauss.entropy_from_spectrum(spectra["eve_avg"]) - s_eve
    return PrivacyReport(
        chi_out=chi_out,
        chi_eve=chi_eve,
        i_p=(chi_out - chi_eve) / params.n_uses,
        spectra=spectra,
        policy=policy,
        params=params,
    )


INV_PHI = (math.sqrt(5) - 1) / 2


def golden_section_max(f: Callable[[float], float], a: float, b: float, tol: float = 1e-6,
                       trace: list | None = None) -> float:
    """Maximize a unimodal ``f`` on ``[a, b]`` until the bracket is ``<= tol`` wide.

    Evaluations are appended to ``trace`` as ``(x, f(x))`` when given.
    """
    def ev(x):
        y = f(x)
        if trace is not None:
            trace.append((x, y))
        return y

    a, b = min(a, b), max(a, b)
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = ev(c), ev(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = ev(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = ev(d)
    return 0.5 * (a + b)


def maximize_over_r(params: ChannelParams, n_eff: float, grid_points: int = 201,
                    tol: float = 1e-6, trace: list | None = None):
    """Two-use private capacity: maximize ``I_p`` over ``r`` in ``[-r_max, r_max]``.

    A coarse grid locates the best bracket (the curve can have two local maxima
    under memory), then golden-section search refines it to ``tol`` in ``r``.

    Returns:
        ``(r_star, report)``.
    """
    r_max = max_entanglement(n_eff)

    def ip(r):
        r = min(max(r, -r_max), r_max)
        return private_information(InputPolicy(r, n_eff), params, check_closed_form=False).i_p

    if r_max == 0.0:
        return 0.0, private_information(InputPolicy(0.0, n_eff), params)
    grid = np.linspace(-r_max, r_max, grid_points)
    values = []
    for r in grid:
        y = ip(float(r))
        values.append(y)
        if trace is not None:
            trace.append((float(r), y))
    best = int(np.argmax(values))
    lo = float(grid[max(best - 1, 0)])
    hi = float(grid[min(best + 1, grid_points - 1)])
    r_star = golden_section_max(ip, lo, hi, tol=tol, trace=trace)
    # a flat curve (eta = 1/2) or a boundary maximum can leave the grid point ahead
    if values[best] > ip(r_star):
        r_star = float(grid[best])
    return r_star, private_information(InputPolicy(r_star, n_eff), params)


@dataclass(frozen=True)
class SweepGrid:
    """Rectangular grid over ``(eta, s, n_eff, r)``; ``r`` is an inclusive linspace."""

    eta: Sequence[float]
    s: Sequence[float]
    n_eff: Sequence[float]
    r_min: float
    r_max: float
    r_steps: int
    n_uses: int = 2

    def __post_init__(self):
        for name in ("eta", "s", "n_eff"):
            if len(getattr(self, name)) == 0:
                raise ValueError(f"sweep grid axis {name!r} is empty")
        if self.r_steps < 1:
            raise ValueError(f"r_steps must be >= 1, got {self.r_steps}")
        if self.r_steps > 1 and self.r_max < self.r_min:
            raise ValueError(f"r_max={self.r_max} is below r_min={self.r_min}")

    def r_values(self) -> np.ndarray:
        if self.r_steps == 1:
            return np.array([self.r_min])
        return np.linspace(self.r_min, self.r_max, self.r_steps)

    def keys(self):
        """Grid keys in lexicographic ``(eta, s, n_eff, r)`` order."""
        rs = self.r_values()
        for eta in sorted(self.eta):
            for s in sorted(self.s):
                for n_eff in sorted(self.n_eff):
                    for r in rs:
                        yield float(eta), float(s), float(n_eff), float(r)


@dataclass(frozen=True)
class SweepRow:
    eta: float
    s: float
    n_eff: float
    r: float
    n: float
    feasible: bool
    report: PrivacyReport | None = field(default=None, compare=False)

    @property
    def chi_out(self) -> float:
        return self.report.chi_out if self.report else math.nan

    @property
    def chi_eve(self) -> float:
        return self.report.chi_eve if self.report else math.nan

    @property
    def i_p(self) -> float:
        return self.report.i_p if self.report else math.nan


def _row(key, n_uses: int) -> SweepRow:
    eta, s, n_eff, r = key
    n = n_eff - math.sinh(r) ** 2
    try:
        policy = InputPolicy(r, n_eff)
    except PhotonBudgetError:
        return SweepRow(eta, s, n_eff, r, n, False)
    report = private_information(policy, ChannelParams(eta, s, n_uses))
    return SweepRow(eta, s, n_eff, r, policy.n, True, report)


def sweep(grid: SweepGrid, workers: int = 1) -> list[SweepRow]:
    """Evaluate every grid point; infeasible points are kept and flagged.

    Rows come back in key order regardless of ``workers``.
    """
    keys = list(grid.keys())
    if workers <= 1:
        return [_row(k, grid.n_uses) for k in keys]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda k: _row(k, grid.n_uses), keys))


def _single_mode_chi(weight: float, r_mode: float, s_mode: float, n: float) -> float:
    # squeezed signal and environment modes with diagonal covariances; the loss
    # keeps them diagonal, so nu = sqrt(var_q var_p)
    var_q = 0.5 * (weight * math.exp(2 * r_mode) + (1 - weight) * math.exp(2 * s_mode))
    var_p = 0.5 * (weight * math.exp(-2 * r_mode) + (1 - weight) * math.exp(-2 * s_mode))
    extra = 0.5 * weight * n
    nu = math.sqrt(var_q * var_p)
    nu_bar = math.sqrt((var_q + extra) * (var_p + extra))
    return gauss.g_entropy(max(nu_bar - 0.5, 0.0)) - gauss.g_entropy(max(nu - 0.5, 0.0))


def normal_mode_private_information(policy: InputPolicy, params: ChannelParams) -> float:
    """``I_p`` for ``n_uses`` modes via the normal modes of the symmetric squeezers.

    The generator ``sum_{k != k'}`` is diagonalized by the uniform mode (eigenvalue
    ``n - 1``) and its ``n - 1`` orthogonal complements (eigenvalue ``-1``). Each
    normal mode is an independent single-mode lossy channel with squeezing
    ``lambda r`` on the input and ``lambda s`` on the environment, and the isotropic
    ensemble noise is unchanged by the rotation.
    """
    n_uses = params.n_uses
    n = policy.n
    total = 0.0
    for lam, mult in ((n_uses - 1, 1), (-1, n_uses - 1)):
        r_mode, s_mode = lam * policy.r, lam * params.s
        chi_out = _single_mode_chi(params.eta, r_mode, s_mode, n)
        chi_eve = _single_mode_chi(1 - params.eta, r_mode, s_mode, n)
        total += mult * (chi_out - chi_eve)
    return total / n_uses
