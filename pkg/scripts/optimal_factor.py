"""Measured Markovian convergence with spectral transfers against |lambda_{n_c+1}|^k.

    python scripts/optimal_factor.py --n 16 --nc 8 --k 3
"""
import argparse

import numpy as np

from relaxamg import problems
from relaxamg.relaxation import build_setup
from relaxamg.schemes import markovian_cycle
from relaxamg.transfer_flow import optimal_transfers


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=16)
    ap.add_argument("--nc", type=int, default=8)
    ap.add_argument("--cycles", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    setup = build_setup(problems.poisson1d(args.n), "jacobi")
    spec = optimal_transfers(setup, args.nc)
    x = np.random.default_rng(args.seed).uniform(-1, 1, args.n)
    b = np.zeros(args.n)
    print(f"|lambda_cut| = {abs(spec.Lambda_f[0]):.6f}")
    print("k  predicted   measured   rel.diff")
    for k in (1, 2, 3, 4, 5):
        y, prev = x.astype(complex), None
        for _ in range(args.cycles):
            prev = np.linalg.norm(y)
            y = markovian_cycle(setup, spec.basis, spec.R_inf, b, y, k).x_new
        measured = np.linalg.norm(y) / prev
        predicted = abs(spec.Lambda_f[0]) ** k
        print(f"{k}  {predicted:.6f}  {measured:.6f}  {abs(measured / predicted - 1):.2e}")


if __name__ == "__main__":
    main()
