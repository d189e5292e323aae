"""Two-level multigrid built from relaxation: memory-bearing interpolation,
idealized two-level schemes and relaxation-driven transfer operators."""
from .config import ExperimentConfig, load_config, parse_config
from .problems import ProblemSpec, generate
from .relaxation import build_setup, relax
from .splitting import TransferBasis, canonical_basis, every_other

__version__ = "0.1.0"

__all__ = [
    "ExperimentConfig",
    "ProblemSpec",
    "TransferBasis",
    "build_setup",
    "canonical_basis",
    "every_other",
    "generate",
    "load_config",
    "parse_config",
    "relax",
]
