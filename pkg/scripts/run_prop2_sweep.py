"""Close random alternating chains onto the complement of their head and
confirm the head observable annihilates every admissible state.
"""

import argparse

import numpy as np

from nonlocality_lab.chains import prop2_verify, random_chain


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--k-max", type=int, default=5)
    parser.add_argument("--trials", type=int, default=200)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    for k in range(1, args.k_max + 1):
        worst = 0.0
        dims = set()
        for _ in range(args.trials):
            chain, _ = random_chain(2 * k + 1, rng)
            rep = prop2_verify(chain, k)
            worst = max(worst, rep.max_head_norm)
            dims.add(rep.admissible_dim)
        print(
            f"k={k}: {args.trials} chains, max head residual {worst:.3e}, "
            f"admissible dims {sorted(dims)}"
        )


if __name__ == "__main__":
    main()
