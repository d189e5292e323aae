"""Run the transfer flow and compare its limit with the spectral coarse space.

    python scripts/flow_demo.py --n 16 --k 3
"""
import argparse

import numpy as np
import scipy.linalg as sla

from relaxamg import problems
from relaxamg.relaxation import build_setup
from relaxamg.splitting import canonical_basis, every_other
from relaxamg.transfer_flow import flow_run, optimal_transfers


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=16)
    ap.add_argument("--k", type=int, default=3)
    ap.add_argument("--infinite-k", action="store_true")
    args = ap.parse_args()

    setup = build_setup(problems.poisson1d(args.n), "jacobi")
    b = canonical_basis(every_other(args.n))
    st = flow_run(b.P, b.P_dual, setup, k=args.k, infinite_k=args.infinite_k)
    for tau in range(0, st.tau + 1, max(1, st.tau // 12)):
        print(f"tau {tau:4d}  ||Q^ T P|| = {st.residuals[tau]:.3e}  energy = {np.sum(st.energies[tau]):.6f}")
    print(f"converged at tau = {st.tau}, residual {st.residuals[-1]:.3e}")

    P = st.P
    inv = np.linalg.norm(setup.T @ P - P @ (st.P_dual @ setup.T @ P))
    print(f"T-invariance of col(P): {inv:.3e}")
    try:
        spec = optimal_transfers(setup, b.n_c)
        angles = sla.subspace_angles(P, spec.P_inf)
        print(f"largest principal angle to the top-{b.n_c} eigenspace: {np.max(angles):.3e}")
    except ValueError as exc:
        print(f"no spectral comparison: {exc}")


if __name__ == "__main__":
    main()
