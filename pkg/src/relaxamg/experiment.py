"""Build an experiment from an :class:`ExperimentConfig` and run two-level cycles."""
import csv
import io
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import splitting as sp
from .memory import cr_diagnostics, noise
from .problems import generate
from .relaxation import build_setup
from .schemes import CYCLES
from .transfer_flow import flow_run, ideal_basis, ideal_restriction, optimal_transfers

__all__ = ["ConvergenceReport", "Components", "build_components", "run", "write_report"]


@dataclass(frozen=True, eq=False)
class Components:
    setup: object
    split: object
    basis: object
    R: np.ndarray
    spectral: object = None


@dataclass
class ConvergenceReport:
    error_norm: list = field(default_factory=list)
    residual_norm: list = field(default_factory=list)
    factor: list = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)

    def csv_text(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["cycle", "error_norm", "residual_norm", "factor"])
        for c, (e, r, f) in enumerate(zip(self.error_norm, self.residual_norm, self.factor)):
            w.writerow([c, repr(e), repr(r), "" if f is None else repr(f)])
        return buf.getvalue()


def _make_split(cfg, n):
    s = cfg.split
    if s.strategy == "every_other":
        return sp.every_other(n)
    if s.strategy == "every_nth":
        return sp.every_nth(n, s.stride)
    if s.strategy == "red_black":
        if cfg.problem.kind != "poisson2d":
            raise ValueError("red_black split needs a poisson2d problem")
        return sp.red_black(cfg.problem.nx, cfg.problem.ny)
    if s.strategy == "explicit":
        return sp.explicit_split(n, s.coarse)
    raise ValueError(f"unknown split strategy {s.strategy!r}")


def build_components(cfg):
    """Problem, smoother, split, transfer basis and restriction for `cfg`."""
    A = generate(cfg.problem)
    omega = cfg.smoother.omega if cfg.smoother.kind in ("jacobi", "richardson") else None
    setup = build_setup(A, cfg.smoother.kind, omega=omega)
    split = _make_split(cfg, setup.n)
    spectral = None
    kind = cfg.basis.kind
    if kind == "canonical":
        basis = sp.canonical_basis(split)
    elif kind == "ideal":
        basis = ideal_basis(setup, split)
    elif kind == "flow":
        b0 = sp.canonical_basis(split)
        basis = flow_run(b0.P, b0.P_dual, setup, k=cfg.basis.flow_k,
                         max_tau=cfg.basis.max_tau, tol=cfg.basis.tol).basis
    elif kind == "optimal":
        spectral = optimal_transfers(setup, split.n_c)
        basis = spectral.basis
    elif kind == "random":
        basis = sp.random_basis(setup.n, split.n_c, np.random.default_rng(cfg.seed))
    else:
        raise ValueError(f"unknown basis kind {kind!r}")

    rk = cfg.restriction.kind
    if rk == "p_dual":
        R = basis.P_dual
    elif rk == "ideal":
        R = ideal_restriction(setup, split)
    elif rk == "spectral":
        spectral = spectral or optimal_transfers(setup, split.n_c)
        R = spectral.R_inf
    else:
        raise ValueError(f"unknown restriction kind {rk!r}")
    return Components(setup, split, basis, R, spectral)


def run(cfg):
    """Run ``cfg.cycles`` two-level cycles; deterministic for a given seed."""
    comp = build_components(cfg)
    setup, basis, R = comp.setup, comp.basis, comp.R
    n = setup.n
    rng = np.random.default_rng(cfg.seed)
    x0 = rng.uniform(-1.0, 1.0, n).astype(np.complex128)
    if cfg.rhs == "zero":
        x_exact = np.zeros(n, dtype=np.complex128)
    else:
        x_exact = rng.uniform(-1.0, 1.0, n).astype(np.complex128)
    b = setup.A @ x_exact
    k = cfg.scheme.k
    cycle = CYCLES[cfg.scheme.name]

    rep = ConvergenceReport()
    x = x0
    prev = None
    for c in range(cfg.cycles + 1):
        if c > 0:
            x = cycle(setup, basis, R, b, x, k).x_new
        err = float(np.linalg.norm(x_exact - x))
        rep.error_norm.append(err)
        rep.residual_norm.append(float(np.linalg.norm(b - setup.A @ x)))
        rep.factor.append(None if prev is None else (err / prev if prev > 0 else 0.0))
        prev = err

    cr = cr_diagnostics(setup, basis, k)
    e_phi_0 = basis.Q_dual @ (x_exact - x0)
    diag = {
        "n": n,
        "n_c": int(basis.n_c),
        "RAQ_norm": float(np.linalg.norm(R @ setup.A_hat @ basis.Q)),
        "cr_rho": cr["rho"],
        "cr_decay": cr["decay"],
        "noise_norm_initial": float(np.linalg.norm(noise(setup, basis, R, e_phi_0, k).eta)),
        "basis_residual": float(basis.max_residual()),
        "asymptotic_factor": rep.factor[-1],
    }
    if comp.spectral is not None:
        diag["lambda_cut_abs"] = float(abs(comp.spectral.Lambda_f[0]))
        diag["predicted_factor"] = float(abs(comp.spectral.Lambda_f[0]) ** k)
    diag["config"] = asdict(cfg)
    rep.diagnostics = diag
    return rep


def write_report(rep, out_dir, stem="solve"):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / f"{stem}.csv"
    json_path = out / f"{stem}.json"
    csv_path.write_text(rep.csv_text())
    json_path.write_text(json.dumps(rep.diagnostics, indent=2, sort_keys=True, default=str) + "\n")
    return csv_path, json_path
