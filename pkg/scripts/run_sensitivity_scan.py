"""Scan how fast the exact correlations leak when the last measurement
direction is rotated away from its ideal orientation by an angle epsilon.
"""

import argparse

import numpy as np

from nonlocality_lab.hardy import build_hardy, schmidt_state, sensitivity
from nonlocality_lab.spin_observables import Direction


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--lam", type=float, default=0.8)
    parser.add_argument("--theta", type=float, default=1.0)
    parser.add_argument("--phi", type=float, default=0.0)
    parser.add_argument("--eps-min", type=float, default=1e-6)
    parser.add_argument("--eps-max", type=float, default=1e-2)
    parser.add_argument("--num-eps", type=int, default=13)
    args = parser.parse_args()

    cfg = build_hardy(schmidt_state(args.lam), Direction(args.theta, args.phi))
    eps = np.logspace(np.log10(args.eps_min), np.log10(args.eps_max), args.num_eps)
    report = sensitivity(cfg, eps)

    print("epsilon        leak_probability")
    for e, leak in zip(report.epsilons, report.leak_probabilities):
        print(f"{e:.6e}   {leak:.6e}")
    print(f"fitted exponent: {report.fitted_exponent:.6f}  (quadratic means 2.0)")


if __name__ == "__main__":
    main()
