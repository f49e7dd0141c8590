"""Per-use private information for n = 2, 3, 4 uses of the symmetric memory channel.

    python scripts/n_use_check.py --eta 0.8 --s 1 --r 0.5
"""

import argparse
import math

from bpriv.channel import ChannelParams, InputPolicy
from bpriv.privacy import normal_mode_private_information, private_information


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--eta", type=float, default=0.8)
    ap.add_argument("--s", type=float, default=1.0)
    ap.add_argument("--r", type=float, default=0.5)
    ap.add_argument("--n", type=float, default=1.0, help="modulation photons N")
    ap.add_argument("--max-uses", type=int, default=6)
    args = ap.parse_args()

    policy = InputPolicy(args.r, args.n + math.sinh(args.r) ** 2)
    print(f"{'uses':>4} {'I_p generic':>14} {'I_p normal modes':>17}")
    for n_uses in range(2, args.max_uses + 1):
        params = ChannelParams(args.eta, args.s, n_uses)
        print(f"{n_uses:4d} {private_information(policy, params).i_p:14.9f} "
              f"{normal_mode_private_information(policy, params):17.9f}")


if __name__ == "__main__":
    main()
