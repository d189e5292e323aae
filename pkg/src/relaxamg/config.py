"""Experiment configuration: flat ``section.key = value`` files.

Example::

    # 1D Poisson, Markovian cycle with ideal restriction
    problem.kind = poisson1d
    problem.n = 32
    smoother.kind = jacobi
    smoother.omega = 0.6666666666666666
    split.strategy = every_other
    basis.kind = canonical
    restriction.kind = ideal
    scheme.name = markovian
    scheme.k = 3
    cycles = 10
    seed = 0

Unknown sections or keys are errors. Lists (``split.coarse``) are
comma-separated, 0-based.
"""
import dataclasses
from dataclasses import dataclass, field
from pathlib import Path

from .problems import ProblemSpec

__all__ = [
    "ConfigError",
    "SmootherSpec",
    "SplitSpec",
    "BasisSpec",
    "RestrictionSpec",
    "SchemeSpec",
    "OutputSpec",
    "ExperimentConfig",
    "parse_config",
    "load_config",
]


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SmootherSpec:
    kind: str = "jacobi"
    omega: float = 2.0 / 3.0


@dataclass(frozen=True)
class SplitSpec:
    strategy: str = "every_other"  # every_other | every_nth | red_black | explicit
    stride: int = 2
    coarse: tuple = ()


@dataclass(frozen=True)
class BasisSpec:
    kind: str = "canonical"  # canonical | ideal | flow | optimal | random
    max_tau: int = 500
    tol: float = 1e-10
    flow_k: int = 3


@dataclass(frozen=True)
class RestrictionSpec:
    kind: str = "p_dual"  # p_dual | ideal | spectral


@dataclass(frozen=True)
class SchemeSpec:
    name: str = "markovian"
    k: int = 3


@dataclass(frozen=True)
class OutputSpec:
    dir: str = "out"
    prefix: str = ""


@dataclass(frozen=True)
class ExperimentConfig:
    problem: ProblemSpec = field(default_factory=ProblemSpec)
    smoother: SmootherSpec = field(default_factory=SmootherSpec)
    split: SplitSpec = field(default_factory=SplitSpec)
    basis: BasisSpec = field(default_factory=BasisSpec)
    restriction: RestrictionSpec = field(default_factory=RestrictionSpec)
    scheme: SchemeSpec = field(default_factory=SchemeSpec)
    output: OutputSpec = field(default_factory=OutputSpec)
    cycles: int = 10
    seed: int = 0
    rhs: str = "zero"  # zero | random

    def __post_init__(self):
        if self.cycles < 0:
            raise ConfigError(f"cycles must be >= 0, got {self.cycles}")
        if self.scheme.k < 1:
            raise ConfigError(f"scheme.k must be >= 1, got {self.scheme.k}")
        if self.rhs not in ("zero", "random"):
            raise ConfigError(f"rhs must be 'zero' or 'random', got {self.rhs!r}")
        if self.problem.kind == "custom_file" and not Path(self.problem.path).is_file():
            raise ConfigError(f"problem.path {self.problem.path!r} does not exist")


def _convert(raw, typ, key):
    try:
        if typ is int:
            return int(raw)
        if typ is float:
            return float(raw)
        if typ is tuple:
            return tuple(int(t) for t in raw.split(",") if t.strip())
        return raw
    except ValueError:
        raise ConfigError(f"{key}: cannot parse {raw!r} as {typ.__name__}") from None


def _section_class(name):
    for f in dataclasses.fields(ExperimentConfig):
        if f.name == name and f.default_factory is not dataclasses.MISSING:
            return type(f.default_factory())
    return None


def parse_config(text, **overrides):
    """Parse configuration text into an :class:`ExperimentConfig`.

    Keyword `overrides` use the dotted keys with ``.`` replaced by ``__``
    (e.g. ``seed=3``, ``scheme__k=2``) and take precedence over the text.
    """
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        s = line.split("#", 1)[0].strip()
        if not s:
            continue
        if "=" not in s:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, raw = (t.strip() for t in s.split("=", 1))
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        values[key] = raw
    for k, v in overrides.items():
        values[k.replace("__", ".")] = str(v)

    scalars = {f.name: f.type for f in dataclasses.fields(ExperimentConfig)
               if f.default_factory is dataclasses.MISSING}
    sections = {}
    kwargs = {}
    for key, raw in values.items():
        parts = key.split(".")
        if len(parts) == 1 and key in scalars:
            kwargs[key] = _convert(raw, scalars[key], key)
            continue
        cls = _section_class(parts[0]) if len(parts) == 2 else None
        if cls is None:
            raise ConfigError(f"unknown key {key!r}")
        types = {g.name: g.type for g in dataclasses.fields(cls)}
        if parts[1] not in types:
            raise ConfigError(f"unknown key {key!r}; section {parts[0]!r} accepts {sorted(types)}")
        sections.setdefault(parts[0], {})[parts[1]] = _convert(raw, types[parts[1]], key)
    for sec, kw in sections.items():
        try:
            kwargs[sec] = _section_class(sec)(**kw)
        except ValueError as exc:
            raise ConfigError(f"{sec}: {exc}") from exc
    return ExperimentConfig(**kwargs)


def load_config(path, **overrides):
    return parse_config(Path(path).read_text(), **overrides)
