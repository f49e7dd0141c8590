"""Acceptance criteria, one test per criterion.

Each test records a single ``CRITERION n: PASS|FAIL ...`` line that is printed in
the terminal summary, then asserts.
"""

import io
import math
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES, oracle_run

from bpriv import cli, verify
from bpriv.channel import ChannelParams, InputPolicy
from bpriv.gauss import g_entropy
from bpriv.privacy import SweepGrid, max_entanglement, maximize_over_r, private_information, sweep

# g(0.8) - g(0.2), mpmath at 25 digits
SPOT_REF = 1.003910001730335


def record(n: int, ok: bool, detail: str):
    ACCEPTANCE_LINES.append(f"CRITERION {n}: {'PASS' if ok else 'FAIL'} {detail}")
    assert ok, detail


def test_criterion_1_null_point():
    t0 = time.perf_counter()
    worst = 0.0
    count = 0
    for policy, s in verify.null_point_grid():
        worst = max(worst, abs(private_information(policy, ChannelParams(0.5, s)).i_p))
        count += 1
    elapsed = time.perf_counter() - t0
    record(1, count == 500 and worst <= 1e-12 and elapsed < 1.0,
           f"null point max|I_p|={worst:.2e} (tol 1e-12) over {count} points in {elapsed:.2f}s (< 1s)")


def test_criterion_2_closed_form_agreement():
    t0 = time.perf_counter()
    res = verify.closed_form_suite(200, seed=0)
    elapsed = time.perf_counter() - t0
    cov, spec = res[0], res[1]
    record(2, cov.passed and spec.passed and elapsed < 1.0,
           f"covariance err={cov.value:.2e}, spectra err={spec.value:.2e} (tol 1e-10) "
           f"on 200 tuples in {elapsed:.2f}s (< 1s)")


def test_criterion_3_equal_mixedness():
    lam = verify.closed_form_suite(200, seed=0)[2]
    record(3, lam.passed, f"max|lambda_out - lambda_eve|={lam.value:.2e} (tol 1e-10) on 200 tuples")


def test_criterion_4_symmetries():
    res = {r.name: r for r in verify.symmetry_suite(count=100, seed=1)}
    anti, mirror, even = res["eta_antisymmetry"], res["joint_sign_mirror"], res["memoryless_evenness"]
    record(4, anti.passed and mirror.passed and even.passed,
           f"eta antisymmetry {anti.value:.2e}, (r,s) mirror {mirror.value:.2e}, "
           f"s=0 evenness {even.value:.2e} (tol 1e-12, 100 tuples)")


def test_criterion_5_fig1_structure():
    t0 = time.perf_counter()
    eta, n_eff = 0.8, 2.0
    best = {s: maximize_over_r(ChannelParams(eta, s), n_eff) for s in (0.0, 1.0, 2.0, 3.0)}
    at_zero = {s: private_information(InputPolicy(0.0, n_eff), ChannelParams(eta, s)).i_p for s in best}
    elapsed = time.perf_counter() - t0
    a = abs(best[0.0][0]) <= 1e-4
    b = all(best[s][0] > 0 and best[s][1].i_p > at_zero[s] + 1e-6 for s in (1.0, 2.0, 3.0))
    maxima = [best[s][1].i_p for s in (0.0, 1.0, 2.0, 3.0)]
    c = all(x > y for x, y in zip(maxima, maxima[1:]))
    record(5, a and b and c and elapsed < 5.0,
           f"(a) r*(s=0)={best[0.0][0]:.1e} (b) r*(s=1,2,3)="
           f"{','.join(f'{best[s][0]:.3f}' for s in (1.0, 2.0, 3.0))} beat r=0 "
           f"(c) maxima {','.join(f'{m:.4f}' for m in maxima)} decreasing; {elapsed:.2f}s (< 5s)")


def test_criterion_6_fig2_structure():
    t0 = time.perf_counter()
    n_eff = 2.0
    r_max = max_entanglement(n_eff)
    rows = sweep(SweepGrid([0.2], [0.0, 1.0, 2.0, 3.0], [n_eff], -r_max, r_max, 229))
    at_zero = [private_information(InputPolicy(0.0, n_eff), ChannelParams(0.2, s)).i_p
               for s in (0.0, 1.0, 2.0, 3.0)]
    elapsed = time.perf_counter() - t0
    feasible = [row.i_p for row in rows if row.feasible]
    top = max(feasible)
    increasing = all(x < y <= 0 for x, y in zip(at_zero, at_zero[1:]))
    record(6, top <= 0 and increasing and elapsed < 5.0,
           f"max feasible I_p={top:.3e} over {len(feasible)} points; I_p(r=0) for s=0..3 "
           f"{','.join(f'{v:.4f}' for v in at_zero)} increasing; {elapsed:.2f}s (< 5s)")


def test_criterion_7_spot_value():
    val = private_information(InputPolicy(0.0, 2.0), ChannelParams(0.8, 0.0)).i_p
    exact = g_entropy(0.8) - g_entropy(0.2)
    ok = abs(val - SPOT_REF) <= 1e-6 and abs(exact - SPOT_REF) <= 1e-12
    record(7, ok, f"I_p={val:.10f} vs g(0.8)-g(0.2)={SPOT_REF:.10f}, diff {abs(val - SPOT_REF):.1e} (tol 1e-6)")


ORACLE_POINTS = [(eta, r, s) for eta in (0.3, 0.7) for r in (0.0, 0.3) for s in (0.0, 0.3)]


@pytest.mark.slow
def test_criterion_8_oracle_equivalence():
    t0 = time.perf_counter()
    n_eff = 0.5
    worst12 = 0.0
    shrinks = True
    parts = []
    for eta, r, s in ORACLE_POINTS:
        ref = private_information(InputPolicy(r, n_eff), ChannelParams(eta, s)).i_p
        gap12 = abs(oracle_run(eta, r, s, n_eff, 12).i_p - ref)
        gap14 = abs(oracle_run(eta, r, s, n_eff, 14).i_p - ref)
        worst12 = max(worst12, gap12)
        shrinks = shrinks and gap14 < gap12
        parts.append(f"{gap12:.1e}->{gap14:.1e}")
    elapsed = time.perf_counter() - t0
    record(8, worst12 <= 5e-3 and shrinks,
           f"max|dI_p| at D=12 {worst12:.2e} (tol 5e-3), gap shrinks at D=14 for all 8 points "
           f"[{' '.join(parts)}]; {elapsed:.0f}s" if shrinks else
           f"max|dI_p| at D=12 {worst12:.2e}; gap did not shrink at D=14 [{' '.join(parts)}]")


def test_criterion_9_n_uses():
    res = {r.name: r for r in verify.n_use_suite(3, count=20, seed=2)}
    claim = res["n_use_claim_n3"]
    consistency = [res["n_use_normal_modes_n3"], res["n_use_equal_mixedness_n3"],
                   res["n_use_memoryless_product_n3"]]
    if claim.passed:
        record(9, True, f"|I_p(3) - I_p(2)|={claim.value:.2e} (tol 1e-9) on 20 tuples")
    else:
        ok = all(c.passed for c in consistency)
        record(9, ok, f"claim DISCREPANCY documented (max|I_p(3) - I_p(2)|={claim.value:.2e}); "
                      f"n=3 consistency: normal modes {consistency[0].value:.1e}, "
                      f"equal mixedness {consistency[1].value:.1e}, "
                      f"memoryless product {consistency[2].value:.1e} (tol 1e-9/1e-10)")


def test_criterion_10_determinism(tmp_path):
    path = tmp_path / "fig1.csv"
    cfg = cli.RunConfig(eta=[0.8, 0.2], s=[0.0, 1.0, 2.0, 3.0], n_eff=[2.0], out=str(path))
    outputs = []
    for workers in (1, 1, 4):
        cfg.workers = workers
        cli.cmd_sweep(cfg)
        outputs.append(path.read_bytes())
    same = outputs[0] == outputs[1]
    # worker count is echoed in the header; rows must still match
    rows = lambda b: [l for l in b.decode().splitlines() if not l.startswith("# ")]
    record(10, same and rows(outputs[0]) == rows(outputs[2]),
           f"two sweeps byte-identical ({len(outputs[0])} bytes, {len(rows(outputs[0])) - 1} rows); "
           f"rows identical with 4 workers")
