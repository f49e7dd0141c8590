"""Private information versus r for s = 0, 1, 2, 3 at a fixed eta, as CSV + SVG.

    python scripts/fig_curves.py --eta 0.8 --out-dir results/fig1
    python scripts/fig_curves.py --eta 0.2 --out-dir results/fig2
"""

import argparse
from pathlib import Path

from bpriv import cli
from bpriv.channel import ChannelParams, InputPolicy
from bpriv.plotting import plot_sweep
from bpriv.privacy import maximize_over_r, private_information


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--eta", type=float, default=0.8)
    ap.add_argument("--n-eff", type=float, default=2.0)
    ap.add_argument("--r-steps", type=int, default=229)
    ap.add_argument("--out-dir", default="results/fig1")
    args = ap.parse_args()

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / "sweep.csv"
    cfg = cli.RunConfig(eta=[args.eta], s=[0.0, 1.0, 2.0, 3.0], n_eff=[args.n_eff],
                        r_steps=args.r_steps, out=str(csv_path))
    cli.cmd_sweep(cfg)
    for path in plot_sweep(csv_path, out):
        print("wrote", path)

    print(f"{'s':>4} {'I_p(r=0)':>12} {'r*':>9} {'I_p(r*)':>12}")
    for s in cfg.s:
        params = ChannelParams(args.eta, s)
        r_star, rep = maximize_over_r(params, args.n_eff)
        base = private_information(InputPolicy(0.0, args.n_eff), params).i_p
        print(f"{s:4g} {base:12.6f} {r_star:9.4f} {rep.i_p:12.6f}")


if __name__ == "__main__":
    main()
