"""Search for the largest violation probability over Schmidt states and
measurement directions, then rebuild the optimal configuration and print it.
"""

import argparse

from nonlocality_lab.hardy import (
    MAX_VIOLATION,
    OptimizerConfig,
    build_hardy,
    max_hardy_probability,
    schmidt_state,
)
def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--starts", type=int, default=32)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    opt = max_hardy_probability(OptimizerConfig(n_starts=args.starts, seed=args.seed))
    print(f"p_max        = {opt.p_max:.15f}")
    print(f"closed form  = {MAX_VIOLATION:.15f}  (gap {opt.p_max - MAX_VIOLATION:+.2e})")
    print(f"lambda*      = {opt.schmidt_coefficient:.10f}")
    print(f"n1*          = (theta={opt.direction.theta:.10f}, phi={opt.direction.phi:.10f})")

    cfg = build_hardy(schmidt_state(opt.schmidt_coefficient), opt.direction)
    for name, d in (("n1", cfg.n1), ("n2", cfg.n2), ("n3", cfg.n3), ("n4", cfg.n4)):
        print(f"  {name}: theta={d.theta:.10f} phi={d.phi:.10f}")
    print(f"rebuilt p_violation = {cfg.p_violation:.15f}")


if __name__ == "__main__":
    main()
