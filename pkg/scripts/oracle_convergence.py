"""Fock oracle against the Gaussian pipeline as the cutoff grows.

Slow: each (point, cutoff) pair takes tens of seconds at D = 14.

    python scripts/oracle_convergence.py --cutoffs 10,12,14
"""

import argparse
import time

from bpriv.channel import ChannelParams, InputPolicy
from bpriv.fock import compare_report


def floats(text):
    return [float(x) for x in text.split(",")]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--eta", type=floats, default=[0.3, 0.7])
    ap.add_argument("--r", type=floats, default=[0.0, 0.3])
    ap.add_argument("--s", type=floats, default=[0.0, 0.3])
    ap.add_argument("--n-eff", type=float, default=0.5)
    ap.add_argument("--cutoffs", default="10,12,14")
    ap.add_argument("--quad", type=int, default=7)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    cutoffs = [int(x) for x in args.cutoffs.split(",")]
    print("eta r s D seconds dI_p dchi_out dchi_eve trace_deficit max_node_deficit cond_spread")
    for eta in args.eta:
        for r in args.r:
            for s in args.s:
                policy, params = InputPolicy(r, args.n_eff), ChannelParams(eta, s)
                for D in cutoffs:
                    t0 = time.perf_counter()
                    cmp = compare_report(policy, params, D, args.quad, workers=args.workers)
                    dg = cmp.diagnostics
                    print(f"{eta:g} {r:g} {s:g} {D} {time.perf_counter() - t0:.1f} "
                          f"{cmp.diff['i_p']:.3e} {cmp.diff['chi_out']:.3e} {cmp.diff['chi_eve']:.3e} "
                          f"{max(dg['trace_deficit_out'], dg['trace_deficit_eve']):.2e} "
                          f"{dg['max_node_deficit']:.2e} {dg['cond_spread']:.2e}", flush=True)


if __name__ == "__main__":
    main()
