"""Command-line experiment runner.

Subcommands: ``solve``, ``diagnose``, ``flow``, ``oracle-check``, ``verify``.
Exit codes: 0 on success, 2 on verification failure, 1 on error.
"""
import argparse
import csv
import io
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .config import ConfigError, ExperimentConfig, load_config
from .experiment import build_components, run, write_report
from .memory import cr_diagnostics
from .splitting import canonical_basis
from .suites import SUITES, oracle_suite, run_suites
from .transfer_flow import flow_init, flow_step, infinite_k_flow_step

EXIT_OK, EXIT_ERROR, EXIT_VERIFY = 0, 1, 2


def _config(args):
    overrides = {} if args.seed is None else {"seed": args.seed}
    if args.config is None:
        return replace(ExperimentConfig(), **overrides)
    return load_config(args.config, **overrides)


def _out_dir(args, cfg):
    return Path(args.out if args.out is not None else cfg.output.dir)


def _cmd_solve(args):
    cfg = _config(args)
    rep = run(cfg)
    csv_path, _ = write_report(rep, _out_dir(args, cfg), stem=f"{cfg.output.prefix}solve")
    last = rep.error_norm[-1]
    print(f"{cfg.scheme.name}: {cfg.cycles} cycles, final error {last:.3e}, wrote {csv_path}")
    return EXIT_OK


def _cmd_diagnose(args):
    cfg = _config(args)
    comp = build_components(cfg)
    setup, basis, R = comp.setup, comp.basis, comp.R
    cr = cr_diagnostics(setup, basis, cfg.scheme.k)
    diag = {
        "n": setup.n,
        "n_c": int(basis.n_c),
        "k": cfg.scheme.k,
        "cr_rho": cr["rho"],
        "cr_decay": cr["decay"],
        "RAQ_norm": float(np.linalg.norm(R @ setup.A_hat @ basis.Q)),
        "basis_residual": float(basis.max_residual()),
    }
    text = json.dumps(diag, indent=2, sort_keys=True) + "\n"
    out = _out_dir(args, cfg)
    out.mkdir(parents=True, exist_ok=True)
    (out / f"{cfg.output.prefix}diagnose.json").write_text(text)
    sys.stdout.write(text)
    return EXIT_OK


def _cmd_flow(args):
    cfg = _config(args)
    comp = build_components(cfg)
    setup = comp.setup
    b0 = canonical_basis(comp.split)
    state = flow_init(b0.P, b0.P_dual, setup)
    while state.residuals[-1] > cfg.basis.tol and state.tau < cfg.basis.max_tau:
        if args.infinite_k:
            state = infinite_k_flow_step(state, setup)
        else:
            state = flow_step(state, setup, cfg.basis.flow_k)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["tau", "residual", "total_energy", "max_column_energy"])
    for tau, (r, e) in enumerate(zip(state.residuals, state.energies)):
        w.writerow([tau, repr(float(r)), repr(float(np.sum(e))), repr(float(np.max(e)))])
    out = _out_dir(args, cfg)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"{cfg.output.prefix}flow.csv"
    path.write_text(buf.getvalue())
    print(f"flow: tau={state.tau}, residual {state.residuals[-1]:.3e}, wrote {path}")
    return EXIT_OK


def _report(checks):
    for c in checks:
        print(c.line())
    failed = sum(not c.passed for c in checks)
    print(f"{len(checks) - failed}/{len(checks)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_VERIFY


def _cmd_oracle(args):
    return _report(oracle_suite())


def _cmd_verify(args):
    return _report(run_suites(args.suite or None))


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="experiment config file (key = value)")
    common.add_argument("--out", help="output directory (default: output.dir)")
    common.add_argument("--seed", type=int, help="override the config seed")

    parser = argparse.ArgumentParser(prog="relaxamg", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("solve", parents=[common], help="run two-level cycles, write CSV and JSON")
    sub.add_parser("diagnose", parents=[common], help="compatible-relaxation diagnostics")
    p = sub.add_parser("flow", parents=[common], help="run the transfer flow, write per-step CSV")
    p.add_argument("--infinite-k", action="store_true", help="use the k -> infinity update")
    sub.add_parser("oracle-check", parents=[common], help="path enumeration vs matrix weights")
    p = sub.add_parser("verify", parents=[common], help="run the invariant suites")
    p.add_argument("--suite", action="append", choices=sorted(SUITES), help="restrict to a named suite (repeatable)")
    return parser


COMMANDS = {
    "solve": _cmd_solve,
    "diagnose": _cmd_diagnose,
    "flow": _cmd_flow,
    "oracle-check": _cmd_oracle,
    "verify": _cmd_verify,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, ValueError, RuntimeError, OSError, np.linalg.LinAlgError) as exc:
        where = f" (config {args.config})" if args.config else ""
        print(f"error{where}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
