"""Distance of the k-step interpolation weights from the ideal weights.

    python scripts/ideal_limit.py --n 32 --kmax 50
"""
import argparse

import numpy as np

from relaxamg import problems
from relaxamg.linalg import spectral_radius
from relaxamg.relaxation import build_setup
from relaxamg.splitting import every_nth
from relaxamg.transfer_flow import ideal_weights


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=32)
    ap.add_argument("--kmax", type=int, default=50)
    ap.add_argument("--omega", type=float, default=2 / 3)
    args = ap.parse_args()

    setup = build_setup(problems.poisson1d(args.n), "jacobi", omega=args.omega)
    splits = {f"every {s}": every_nth(args.n, s) for s in (2, 3, 4)}
    rows = {}
    for label, split in splits.items():
        W_inf = ideal_weights(setup, split)
        rows[label] = [np.linalg.norm(ideal_weights(setup, split, k) - W_inf) for k in range(1, args.kmax + 1)]
        Tff = setup.T[np.ix_(split.fine, split.fine)]
        print(f"{label}: rho(T_ff) = {spectral_radius(Tff):.4f}")
    print("k     " + "  ".join(f"{l:>11s}" for l in rows))
    for k in range(args.kmax):
        if k < 10 or (k + 1) % 5 == 0:
            print(f"{k + 1:<4d}  " + "  ".join(f"{rows[l][k]:11.3e}" for l in rows))


if __name__ == "__main__":
    main()
