"""Per-cycle error of the four two-level schemes on the same problem.

    python scripts/compare_schemes.py --n 32 --k 3 --cycles 8
"""
import argparse

import numpy as np

from relaxamg import problems
from relaxamg.relaxation import build_setup
from relaxamg.schemes import CYCLES
from relaxamg.splitting import canonical_basis, every_other
from relaxamg.transfer_flow import ideal_restriction


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=32)
    ap.add_argument("--k", type=int, default=3)
    ap.add_argument("--cycles", type=int, default=8)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    setup = build_setup(problems.poisson1d(args.n), "jacobi")
    split = every_other(args.n)
    basis = canonical_basis(split)
    R = ideal_restriction(setup, split)  # R A_hat Q = 0, so every scheme applies
    x0 = np.random.default_rng(args.seed).uniform(-1, 1, args.n)
    b = np.zeros(args.n)

    hist = {}
    for name, cycle in CYCLES.items():
        x, norms = x0.astype(complex), [np.linalg.norm(x0)]
        for _ in range(args.cycles):
            x = cycle(setup, basis, R, b, x, args.k).x_new
            norms.append(np.linalg.norm(x))
        hist[name] = norms

    names = list(hist)
    print("cycle  " + "  ".join(f"{n:>15s}" for n in names))
    for c in range(args.cycles + 1):
        print(f"{c:5d}  " + "  ".join(f"{hist[n][c]:15.3e}" for n in names))
    print("factor " + "  ".join(f"{hist[n][-1] / hist[n][-2] if hist[n][-2] > 0 else 0.0:15.4f}" for n in names))


if __name__ == "__main__":
    main()
