"""Differential and symmetry suites behind ``bpriv verify``."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from bpriv import gauss
from bpriv.channel import (
    ChannelParams,
    InputPolicy,
    closed_form_covariances,
    closed_form_spectra,
    max_entanglement,
    output_covariances,
)
from bpriv.privacy import normal_mode_private_information, private_information

CLOSED_FORM_TOL = 1e-10
SYMMETRY_TOL = 1e-12
N_USE_CLAIM_TOL = 1e-9


@dataclass
class SuiteResult:
    name: str
    passed: bool
    value: float
    tol: float
    detail: dict = field(default_factory=dict)
    # informational suites report but never fail the run
    informational: bool = False

    @property
    def status(self) -> str:
        if self.informational:
            return "HOLDS" if self.passed else "DISCREPANCY"
        return "PASS" if self.passed else "FAIL"

    def line(self) -> str:
        extra = "".join(f" {k}={_fmt(v)}" for k, v in self.detail.items())
        return f"suite={self.name} status={self.status} max_err={self.value:.3e} tol={self.tol:.0e}{extra}"


def _fmt(v):
    return f"{v:.6g}" if isinstance(v, float) else str(v)


def random_tuples(count: int, seed: int = 0, n_uses: int = 2, eta_range=(0.0, 1.0),
                  squeeze_max: float = 2.0, n_max: float = 5.0):
    """Random ``(policy, params)`` pairs with ``|r|, |s| <= squeeze_max`` and ``N <= n_max``."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        eta = float(rng.uniform(*eta_range))
        r = float(rng.uniform(-squeeze_max, squeeze_max))
        s = float(rng.uniform(-squeeze_max, squeeze_max))
        n = float(rng.uniform(0.0, n_max))
        out.append((InputPolicy(r, n + math.sinh(r) ** 2), ChannelParams(eta, s, n_uses)))
    return out


def closed_form_suite(count: int = 200, seed: int = 0) -> list[SuiteResult]:
    """Generic pipeline against the two-use closed forms, plus ``lambda_out == lambda_eve``."""
    cov_err = spec_err = lam_err = 0.0
    for policy, params in random_tuples(count, seed):
        generic = output_covariances(policy, params)
        closed = closed_form_covariances(policy, params)
        cov_err = max(cov_err, max(float(np.max(np.abs(a - b))) for a, b in zip(generic, closed)))
        spectra = [gauss.symplectic_eigenvalues(v) for v in generic]
        refs = closed_form_spectra(policy, params)
        spec_err = max(spec_err, max(float(np.max(np.abs(a - b))) for a, b in zip(spectra, refs)))
        lam_err = max(lam_err, float(np.max(np.abs(spectra[0] - spectra[1]))))
    return [
        SuiteResult("closed_form_covariances", cov_err <= CLOSED_FORM_TOL, cov_err, CLOSED_FORM_TOL,
                    {"tuples": count}),
        SuiteResult("closed_form_spectra", spec_err <= CLOSED_FORM_TOL, spec_err, CLOSED_FORM_TOL,
                    {"tuples": count}),
        SuiteResult("equal_conditional_mixedness", lam_err <= CLOSED_FORM_TOL, lam_err, CLOSED_FORM_TOL,
                    {"tuples": count}),
    ]


def null_point_grid(n_r: int = 10, n_s: int = 10, n_eff_values=(1.0, 2.0, 3.0, 4.0, 5.0)):
    for n_eff in n_eff_values:
        r_max = max_entanglement(n_eff)
        for r in np.linspace(-r_max, r_max, n_r):
            for s in np.linspace(-3.0, 3.0, n_s):
                yield InputPolicy(float(r), n_eff), float(s)


def symmetry_suite(count: int = 100, seed: int = 1) -> list[SuiteResult]:
    null = 0.0
    for policy, s in null_point_grid():
        null = max(null, abs(private_information(policy, ChannelParams(0.5, s)).i_p))
    anti = mirror = even = 0.0
    for policy, params in random_tuples(count, seed, squeeze_max=1.5):
        ip = private_information(policy, params).i_p
        flipped = ChannelParams(1.0 - params.eta, params.s)
        anti = max(anti, abs(ip + private_information(policy, flipped).i_p))
        neg_policy = InputPolicy(-policy.r, policy.n_eff)
        mirror = max(mirror, abs(ip - private_information(neg_policy, ChannelParams(params.eta, -params.s)).i_p))
        memless = ChannelParams(params.eta, 0.0)
        even = max(even, abs(private_information(policy, memless).i_p
                             - private_information(neg_policy, memless).i_p))
    return [
        SuiteResult("null_point", null <= SYMMETRY_TOL, null, SYMMETRY_TOL, {"points": 500}),
        SuiteResult("eta_antisymmetry", anti <= SYMMETRY_TOL, anti, SYMMETRY_TOL, {"tuples": count}),
        SuiteResult("joint_sign_mirror", mirror <= SYMMETRY_TOL, mirror, SYMMETRY_TOL, {"tuples": count}),
        SuiteResult("memoryless_evenness", even <= SYMMETRY_TOL, even, SYMMETRY_TOL, {"tuples": count}),
    ]


def n_use_suite(n_uses: int = 3, count: int = 20, seed: int = 2) -> list[SuiteResult]:
    """Check ``I_p(n) = I_p(2)`` and the internal consistency of the n-use pipeline.

    The equality is reported as informational: with the symmetric squeezer the
    normal-mode squeezings are ``(n-1) r`` once and ``-r`` ``n-1`` times, so the
    per-use value depends on ``n`` unless ``r = s = 0``.
    """
    claim = 0.0
    decomp = 0.0
    purity = 0.0
    for policy, params in random_tuples(count, seed, n_uses=n_uses, squeeze_max=1.0):
        rep_n = private_information(policy, params)
        rep_2 = private_information(policy, ChannelParams(params.eta, params.s, 2))
        claim = max(claim, abs(rep_n.i_p - rep_2.i_p))
        oracle = normal_mode_private_information(policy, params)
        decomp = max(decomp, abs(rep_n.i_p - oracle) / max(1.0, abs(oracle)))
        purity = max(purity, float(np.max(np.abs(rep_n.spectra["out"] - rep_n.spectra["eve"]))))
    product = 0.0
    for policy, params in random_tuples(count, seed + 1, n_uses=n_uses, squeeze_max=0.0):
        product = max(product, abs(private_information(policy, params).i_p
                                   - private_information(policy, ChannelParams(params.eta, 0.0, 2)).i_p))
    return [
        SuiteResult(f"n_use_claim_n{n_uses}", claim <= N_USE_CLAIM_TOL, claim, N_USE_CLAIM_TOL,
                    {"tuples": count}, informational=True),
        SuiteResult(f"n_use_normal_modes_n{n_uses}", decomp <= 1e-9, decomp, 1e-9, {"tuples": count}),
        SuiteResult(f"n_use_equal_mixedness_n{n_uses}", purity <= CLOSED_FORM_TOL, purity, CLOSED_FORM_TOL,
                    {"tuples": count}),
        SuiteResult(f"n_use_memoryless_product_n{n_uses}", product <= CLOSED_FORM_TOL, product,
                    CLOSED_FORM_TOL, {"tuples": count}),
    ]


def oracle_suite(points, D: int = 12, quad_order: int = 7, tol: float = 5e-3,
                 workers: int = 1) -> list[SuiteResult]:
    """Fock oracle against the Gaussian pipeline at each ``(policy, params)`` point."""
    from bpriv.fock import compare_report

    out = []
    for policy, params in points:
        cmp = compare_report(policy, params, D, quad_order, workers=workers)
        name = f"oracle_eta{params.eta:g}_r{policy.r:g}_s{params.s:g}_neff{policy.n_eff:g}"
        out.append(SuiteResult(name, cmp.diff["i_p"] <= tol, cmp.diff["i_p"], tol, {
            "d": D,
            "quad": quad_order,
            "ip_gauss": cmp.gaussian["i_p"],
            "ip_oracle": cmp.oracle["i_p"],
            "dchi_out": cmp.diff["chi_out"],
            "dchi_eve": cmp.diff["chi_eve"],
            "trace_deficit": max(cmp.diagnostics["trace_deficit_out"], cmp.diagnostics["trace_deficit_eve"]),
            "cond_spread": cmp.diagnostics["cond_spread"],
        }))
    return out
