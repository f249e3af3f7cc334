"""Experiment configuration: parsing, validation, serialization, presets.

The on-disk format is line-oriented UTF-8 ``key = value`` with ``#``
comments and dotted keys for grouping, e.g. ``dissipation.order = 2``.
Parsing collects every error (with its line number) before failing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Union

import numpy as np

from .dissipation import DissipationConfig, DissipationMode
from .operators import Basis
from .semidisc import FluxKind, ProblemKind, validate_flux
from .stepping import Integrator, TimeGrid


@dataclass(frozen=True)
class GaussianIC:
    """exp(-width (x - center)^2)"""

    center: float
    width: float = 20.0


@dataclass(frozen=True)
class StepIC:
    """1 on [lo, hi], 0 elsewhere"""

    lo: float
    hi: float


@dataclass(frozen=True)
class SinePlusIC:
    """sin(pi x) + offset"""

    offset: float = 0.01


InitialCondition = Union[GaussianIC, StepIC, SinePlusIC]

_IC_KIND = {GaussianIC: "gaussian", StepIC: "step", SinePlusIC: "sine_plus"}


def ic_function(ic: InitialCondition):
    """Vectorized evaluator for an initial condition."""
    if isinstance(ic, GaussianIC):
        return lambda x: np.exp(-ic.width * (x - ic.center) ** 2)
    if isinstance(ic, StepIC):
        return lambda x: np.where((x >= ic.lo) & (x <= ic.hi), 1.0, 0.0)
    if isinstance(ic, SinePlusIC):
        return lambda x: np.sin(np.pi * x) + ic.offset
    raise TypeError(f"unknown initial condition {ic!r}")


@dataclass(frozen=True)
class OutputConfig:
    directory: str = "."
    prefix: str = "run"
    snapshot_times: tuple[float, ...] = ()
    diagnostics: bool = False


@dataclass(frozen=True)
class ExperimentConfig:
    problem: ProblemKind
    basis: Basis
    p: int
    n_elements: int
    x_min: float
    x_max: float
    initial: InitialCondition
    flux: FluxKind
    time: TimeGrid
    dissipation: DissipationConfig = field(default_factory=DissipationConfig)
    integrator: Integrator = Integrator.EULER
    output: OutputConfig = field(default_factory=OutputConfig)


class ConfigError(ValueError):
    """One or more configuration problems; each entry is (line, message)
    with line = 0 for whole-file problems."""

    def __init__(self, errors: list[tuple[int, str]]):
        self.errors = list(errors)
        super().__init__(
            "\n".join(
                f"line {ln}: {msg}" if ln else msg for ln, msg in self.errors
            )
        )


_ENUM_KEYS = {
    "problem": {e.value: e for e in ProblemKind},
    "basis": {e.value: e for e in Basis},
    "flux": {e.value: e for e in FluxKind},
    "integrator": {e.value: e for e in Integrator},
    "dissipation.mode": {e.value: e for e in DissipationMode},
    "initial.kind": {"gaussian": GaussianIC, "step": StepIC, "sine_plus": SinePlusIC},
}

_INT_KEYS = {"p", "elements", "time.steps", "dissipation.order"}
_FLOAT_KEYS = {
    "domain.min",
    "domain.max",
    "time.final",
    "dissipation.epsilon",
    "initial.center",
    "initial.width",
    "initial.lo",
    "initial.hi",
    "initial.offset",
}
_BOOL_KEYS = {"output.diagnostics"}
_STR_KEYS = {"output.directory", "output.prefix"}
_FLOAT_LIST_KEYS = {"output.snapshots"}

_ALL_KEYS = (
    set(_ENUM_KEYS) | _INT_KEYS | _FLOAT_KEYS | _BOOL_KEYS | _STR_KEYS | _FLOAT_LIST_KEYS
)

_REQUIRED = (
    "problem",
    "basis",
    "p",
    "elements",
    "domain.min",
    "domain.max",
    "flux",
    "time.final",
    "time.steps",
)

#: which initial.* parameter keys belong to which kind
_IC_PARAMS = {
    "gaussian": {"initial.center", "initial.width"},
    "step": {"initial.lo", "initial.hi"},
    "sine_plus": {"initial.offset"},
}


def _parse_value(key: str, raw: str):
    if key in _ENUM_KEYS:
        table = _ENUM_KEYS[key]
        if raw not in table:
            raise ValueError(f"expected one of {sorted(table)}, got {raw!r}")
        return table[raw]
    if key in _INT_KEYS:
        return int(raw)
    if key in _FLOAT_KEYS:
        v = float(raw)
        if not math.isfinite(v):
            raise ValueError(f"non-finite value {raw!r}")
        return v
    if key in _BOOL_KEYS:
        if raw not in ("true", "false"):
            raise ValueError(f"expected true or false, got {raw!r}")
        return raw == "true"
    if key in _FLOAT_LIST_KEYS:
        return tuple(float(tok) for tok in raw.split())
    return raw  # string key


def parse_config(text: str) -> ExperimentConfig:
    """Parse a config document; raises ConfigError listing every problem."""
    errors: list[tuple[int, str]] = []
    values: dict[str, object] = {}
    lines: dict[str, int] = {}

    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            errors.append((lineno, f"expected 'key = value', got {body!r}"))
            continue
        key, raw = (part.strip() for part in body.split("=", 1))
        if key not in _ALL_KEYS:
            errors.append((lineno, f"unknown key {key!r}"))
            continue
        if key in lines:
            errors.append((lineno, f"duplicate key {key!r}"))
            continue
        lines[key] = lineno
        try:
            values[key] = _parse_value(key, raw)
        except ValueError as exc:
            errors.append((lineno, f"{key}: {exc}"))

    # a key whose value failed to parse is present in lines, so it is not
    # additionally reported as missing
    for key in _REQUIRED:
        if key not in values and key not in lines:
            errors.append((0, f"missing required key {key!r}"))

    if errors:
        raise ConfigError(errors)

    cfg, post_errors = _assemble(values, lines)
    if post_errors:
        raise ConfigError(post_errors)
    assert cfg is not None
    return cfg


def _assemble(
    values: dict[str, object], lines: dict[str, int]
) -> tuple[ExperimentConfig | None, list[tuple[int, str]]]:
    errors: list[tuple[int, str]] = []

    def where(key: str) -> int:
        return lines.get(key, 0)

    problem = values["problem"]
    basis = values["basis"]
    p = values["p"]
    n_el = values["elements"]
    x_min = values["domain.min"]
    x_max = values["domain.max"]
    flux = values["flux"]

    if p < 1:
        errors.append((where("p"), f"p must be >= 1, got {p}"))
    if n_el < 1:
        errors.append((where("elements"), f"elements must be >= 1, got {n_el}"))
    if not x_max > x_min:
        errors.append((where("domain.max"), f"domain [{x_min}, {x_max}] is empty"))
    try:
        validate_flux(problem, flux)
    except ValueError as exc:
        errors.append((where("flux"), str(exc)))

    try:
        tgrid = TimeGrid(values["time.final"], values["time.steps"])
    except ValueError as exc:
        errors.append((where("time.final"), str(exc)))
        tgrid = None

    ic_cls = values.get("initial.kind", GaussianIC)
    kind_name = {v: k for k, v in _ENUM_KEYS["initial.kind"].items()}[ic_cls]
    allowed = _IC_PARAMS[kind_name]
    for key in sorted(set().union(*_IC_PARAMS.values()) & set(values)):
        if key not in allowed:
            errors.append(
                (where(key), f"{key} does not apply to initial.kind = {kind_name}")
            )
    initial: InitialCondition
    if ic_cls is GaussianIC:
        center = values.get("initial.center", 0.5 * (x_min + x_max))
        initial = GaussianIC(center, values.get("initial.width", 20.0))
    elif ic_cls is StepIC:
        if "initial.lo" not in values or "initial.hi" not in values:
            errors.append(
                (where("initial.kind"), "initial.kind = step needs initial.lo and initial.hi")
            )
            initial = StepIC(0.0, 0.0)
        else:
            initial = StepIC(values["initial.lo"], values["initial.hi"])
            if not initial.hi > initial.lo:
                errors.append((where("initial.hi"), "step needs initial.hi > initial.lo"))
    else:
        initial = SinePlusIC(values.get("initial.offset", 0.01))

    mode = values.get("dissipation.mode", DissipationMode.OFF)
    try:
        diss = DissipationConfig(
            mode,
            values.get("dissipation.order", 1),
            values.get("dissipation.epsilon", 0.0),
        )
    except ValueError as exc:
        errors.append((where("dissipation.mode"), str(exc)))
        diss = DissipationConfig()

    tfin = values.get("time.final", 1.0)
    out = OutputConfig(
        values.get("output.directory", "."),
        values.get("output.prefix", "run"),
        values.get("output.snapshots", (0.0, float(tfin))),
        values.get("output.diagnostics", False),
    )

    if errors or tgrid is None:
        return None, errors
    return (
        ExperimentConfig(
            problem, basis, p, n_el, x_min, x_max, initial, flux, tgrid, diss,
            values.get("integrator", Integrator.EULER), out,
        ),
        errors,
    )


def validate_config(cfg: ExperimentConfig) -> None:
    """Cross-field checks not enforced by the component constructors."""
    errors: list[tuple[int, str]] = []
    if cfg.p < 1:
        errors.append((0, f"p must be >= 1, got {cfg.p}"))
    if cfg.n_elements < 1:
        errors.append((0, f"elements must be >= 1, got {cfg.n_elements}"))
    if not cfg.x_max > cfg.x_min:
        errors.append((0, f"domain [{cfg.x_min}, {cfg.x_max}] is empty"))
    try:
        validate_flux(cfg.problem, cfg.flux)
    except ValueError as exc:
        errors.append((0, str(exc)))
    if errors:
        raise ConfigError(errors)


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def format_config(cfg: ExperimentConfig) -> str:
    """Serialize to the line format; parse_config(format_config(c)) == c."""
    rows: list[tuple[str, object]] = [
        ("problem", cfg.problem.value),
        ("basis", cfg.basis.value),
        ("p", cfg.p),
        ("elements", cfg.n_elements),
        ("domain.min", cfg.x_min),
        ("domain.max", cfg.x_max),
        ("flux", cfg.flux.value),
        ("integrator", cfg.integrator.value),
        ("initial.kind", _IC_KIND[type(cfg.initial)]),
    ]
    if isinstance(cfg.initial, GaussianIC):
        rows += [("initial.center", cfg.initial.center), ("initial.width", cfg.initial.width)]
    elif isinstance(cfg.initial, StepIC):
        rows += [("initial.lo", cfg.initial.lo), ("initial.hi", cfg.initial.hi)]
    else:
        rows += [("initial.offset", cfg.initial.offset)]
    rows += [
        ("time.final", cfg.time.t_final),
        ("time.steps", cfg.time.num_steps),
        ("dissipation.mode", cfg.dissipation.mode.value),
        ("dissipation.order", cfg.dissipation.order),
    ]
    if cfg.dissipation.mode is DissipationMode.FIXED:
        rows.append(("dissipation.epsilon", cfg.dissipation.epsilon))
    rows += [
        ("output.directory", cfg.output.directory),
        ("output.prefix", cfg.output.prefix),
        ("output.snapshots", " ".join(repr(t) for t in cfg.output.snapshot_times)),
        ("output.diagnostics", cfg.output.diagnostics),
    ]
    return "\n".join(f"{k} = {_fmt(v)}" for k, v in rows) + "\n"


def preset(name: str) -> ExperimentConfig:
    """Named experiment setups; see preset_names()."""
    if name not in _PRESETS:
        raise KeyError(f"unknown preset {name!r}; choose from {preset_names()}")
    return _PRESETS[name]()


def preset_names() -> list[str]:
    return sorted(_PRESETS)


def _advection_smooth() -> ExperimentConfig:
    return ExperimentConfig(
        problem=ProblemKind.ADVECTION,
        basis=Basis.GAUSS,
        p=7,
        n_elements=8,
        x_min=0.0,
        x_max=2.0,
        initial=GaussianIC(center=1.0, width=20.0),
        flux=FluxKind.CENTRAL,
        time=TimeGrid(10.0, 120_000),
        output=OutputConfig(prefix="advection-smooth", snapshot_times=(0.0, 10.0)),
    )


def _advection_step() -> ExperimentConfig:
    return ExperimentConfig(
        problem=ProblemKind.ADVECTION,
        basis=Basis.GAUSS,
        p=15,
        n_elements=16,
        x_min=0.0,
        x_max=2.0,
        initial=StepIC(0.5, 1.0),
        flux=FluxKind.UPWIND,
        time=TimeGrid(8.0, 100_000),
        output=OutputConfig(prefix="advection-step", snapshot_times=(0.0, 8.0)),
    )


def _burgers_sine() -> ExperimentConfig:
    return ExperimentConfig(
        problem=ProblemKind.BURGERS,
        basis=Basis.GAUSS,
        p=15,
        n_elements=16,
        x_min=0.0,
        x_max=2.0,
        initial=SinePlusIC(offset=0.01),
        flux=FluxKind.LLF,
        time=TimeGrid(3.0, 15_000),
        output=OutputConfig(prefix="burgers-sine", snapshot_times=(0.0, 0.31, 3.0)),
    )


_PRESETS = {
    "advection-smooth": _advection_smooth,
    "advection-step": _advection_step,
    "burgers-sine": _burgers_sine,
}


def apply_overrides(
    cfg: ExperimentConfig,
    steps: int | None = None,
    dissipation: str | None = None,
    order: int | None = None,
    epsilon: float | None = None,
    output_dir: str | None = None,
    prefix: str | None = None,
) -> ExperimentConfig:
    """Apply CLI override flags; only the named fields change."""
    if steps is not None:
        cfg = replace(cfg, time=TimeGrid(cfg.time.t_final, steps))
    if dissipation is not None or order is not None or epsilon is not None:
        d = cfg.dissipation
        mode = DissipationMode(dissipation) if dissipation is not None else d.mode
        new_order = order if order is not None else d.order
        new_eps = epsilon if epsilon is not None else d.epsilon
        # DissipationConfig validates on construction; bad combinations
        # (e.g. fixed mode without epsilon) raise ValueError here
        cfg = replace(cfg, dissipation=DissipationConfig(mode, new_order, new_eps))
    if output_dir is not None:
        cfg = replace(cfg, output=replace(cfg.output, directory=output_dir))
    if prefix is not None:
        cfg = replace(cfg, output=replace(cfg.output, prefix=prefix))
    return cfg
