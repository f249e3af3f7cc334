"""Run a configured experiment end to end and write its outputs.

The step loop runs either on the compiled kernel (forward Euler, no
per-element diagnostics, any basis for advection, nodal bases for
Burgers) or on the pure-numpy path, which covers everything.  Both
produce the same records; `backend="auto"` prefers the kernel when it
applies.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

from ._backend import HAVE_COMPILED, _kernels
from .config import ExperimentConfig, ic_function, validate_config
from .csvio import write_diagnostics_csv, write_energy_csv, write_snapshot_csv
from .dissipation import DissipationMode, build_pipeline
from .fields import SolutionField, init_field, Mesh1D
from .operators import Basis, OperatorSet, build_operators, constant_coefficients
from .semidisc import FluxKind, ProblemKind, make_rhs
from .stepping import (
    BlowUpError,
    Integrator,
    StepRecord,
    STEPPERS,
    initial_record,
)

#: a run aborts when the energy exceeds this multiple of its initial value
ENERGY_BLOWUP_FACTOR = 1.0e12

_PROBLEM_ID = {ProblemKind.ADVECTION: 0, ProblemKind.BURGERS: 1}
_FLUX_ID = {FluxKind.CENTRAL: 0, FluxKind.UPWIND: 1, FluxKind.LLF: 2}
_MODE_ID = {DissipationMode.OFF: 0, DissipationMode.FIXED: 1, DissipationMode.ADAPTIVE: 2}


@dataclass(frozen=True)
class SimulationResult:
    config: ExperimentConfig
    final: SolutionField
    records: list[StepRecord]
    backend: str
    files: list[str]


def compiled_applicable(config: ExperimentConfig) -> bool:
    return (
        HAVE_COMPILED
        and config.integrator is Integrator.EULER
        and not config.output.diagnostics
        and (config.problem is ProblemKind.ADVECTION or config.basis is not Basis.MODAL)
    )


def select_backend(config: ExperimentConfig, requested: str = "auto") -> str:
    if requested == "python":
        return "python"
    if requested == "compiled":
        if not compiled_applicable(config):
            raise ValueError(
                "compiled backend unavailable for this configuration"
                + ("" if HAVE_COMPILED else " (extension not built)")
            )
        return "compiled"
    if requested != "auto":
        raise ValueError(f"unknown backend {requested!r}")
    return "compiled" if compiled_applicable(config) else "python"


def _snapshot_steps(config: ExperimentConfig) -> dict[int, list[float]]:
    """Map requested snapshot times to step indices (nearest boundary)."""
    dt = config.time.dt
    k_max = config.time.num_steps
    out: dict[int, list[float]] = {}
    for t in config.output.snapshot_times:
        k = min(max(int(round(t / dt)), 0), k_max)
        out.setdefault(k, []).append(t)
    return out


def _snapshot_path(config: ExperimentConfig, t: float) -> str:
    return os.path.join(
        config.output.directory, f"{config.output.prefix}_snapshot_t{t:g}.csv"
    )


def _energy_path(config: ExperimentConfig) -> str:
    return os.path.join(config.output.directory, f"{config.output.prefix}_energy.csv")


def _diagnostics_path(config: ExperimentConfig) -> str:
    return os.path.join(
        config.output.directory, f"{config.output.prefix}_diagnostics.csv"
    )


class _Outputs:
    """Collects rows during the run and flushes them even on abort."""

    def __init__(self, config: ExperimentConfig, ops: OperatorSet, enabled: bool):
        self.config = config
        self.ops = ops
        self.enabled = enabled
        self.diag_rows: list = []
        self.files: list[str] = []

    def snapshot(self, field: SolutionField, times: list[float]) -> None:
        if not self.enabled:
            return
        for t in times:
            path = _snapshot_path(self.config, t)
            write_snapshot_csv(path, field, self.ops)
            self.files.append(path)

    def diagnostics(self, step: int, time: float, reports) -> None:
        if self.enabled and reports:
            self.diag_rows.extend((step, time, r) for r in reports)

    def flush(self, records: list[StepRecord]) -> None:
        if not self.enabled:
            return
        path = _energy_path(self.config)
        write_energy_csv(path, records)
        self.files.append(path)
        if self.config.output.diagnostics:
            path = _diagnostics_path(self.config)
            write_diagnostics_csv(path, self.diag_rows)
            self.files.append(path)


def run_simulation(
    config: ExperimentConfig, backend: str = "auto", write_outputs: bool = True
) -> SimulationResult:
    """Integrate the configured problem and write the configured CSVs.

    Raises BlowUpError (with partial outputs already flushed) when the
    energy leaves the finite/bounded regime.
    """
    validate_config(config)
    chosen = select_backend(config, backend)
    mesh = Mesh1D(config.x_min, config.x_max, config.n_elements)
    ops = build_operators(config.basis, config.p)
    pipeline = build_pipeline(config.dissipation, ops)
    field = init_field(mesh, ops, ic_function(config.initial))

    outputs = _Outputs(config, ops, write_outputs)
    if write_outputs:
        os.makedirs(config.output.directory, exist_ok=True)

    records = [initial_record(field, ops)]
    e0 = records[0].energy
    limit = ENERGY_BLOWUP_FACTOR * e0 if e0 > 0.0 else math.inf
    snaps = _snapshot_steps(config)
    if 0 in snaps:
        outputs.snapshot(field, snaps[0])

    try:
        if chosen == "compiled":
            field = _run_compiled(config, ops, pipeline, field, records, limit, snaps, outputs)
        else:
            field = _run_python(config, ops, pipeline, field, records, limit, snaps, outputs)
    except BlowUpError:
        outputs.flush(records)
        raise
    outputs.flush(records)
    return SimulationResult(config, field, records, chosen, outputs.files)


def _run_python(config, ops, pipeline, field, records, limit, snaps, outputs):
    dt = config.time.dt
    rhs_fn = make_rhs(config.problem, ops, config.flux)
    step_fn = STEPPERS[config.integrator]
    collect = config.output.diagnostics
    for k in range(1, config.time.num_steps + 1):
        field, rec, reports = step_fn(field, rhs_fn, pipeline, dt, step=k, collect=collect)
        records.append(rec)
        if collect:
            outputs.diagnostics(k, rec.time, reports)
        if not rec.energy <= limit:
            raise BlowUpError(k, rec.energy)
        if k in snaps:
            outputs.snapshot(field, snaps[k])
    return field


def _run_compiled(config, ops, pipeline, field, records, limit, snaps, outputs):
    dt = config.time.dt
    k_max = config.time.num_steps
    u = np.ascontiguousarray(field.coeffs, dtype=np.float64)
    a_s = pipeline.a_s if pipeline.a_s is not None else np.zeros((0, 0))
    m = np.ascontiguousarray(ops.m_diag)
    wm = np.ascontiguousarray(ops.m_diag * constant_coefficients(ops))

    boundaries = sorted(set(k for k in snaps if k > 0) | {k_max})
    start = 0
    for stop in boundaries:
        n_chunk = stop - start
        out_e = np.empty(n_chunk)
        out_m = np.empty(n_chunk)
        out_lo = np.empty(n_chunk)
        out_hi = np.empty(n_chunk)
        out_cl = np.empty(n_chunk, dtype=np.int64)
        done, blew = _kernels.run_euler_chunk(
            u,
            np.ascontiguousarray(ops.D),
            np.ascontiguousarray(ops.R),
            np.ascontiguousarray(ops.C),
            np.ascontiguousarray(a_s),
            m,
            wm,
            field.mesh.jacobian,
            dt,
            _PROBLEM_ID[config.problem],
            _FLUX_ID[config.flux],
            _MODE_ID[config.dissipation.mode],
            config.dissipation.epsilon,
            limit,
            out_e,
            out_m,
            out_lo,
            out_hi,
            out_cl,
        )
        for j in range(done):
            k = start + j + 1
            records.append(
                StepRecord(
                    k, k * dt, out_e[j], out_m[j], out_lo[j], out_hi[j], int(out_cl[j])
                )
            )
        if blew:
            raise BlowUpError(start + done, out_e[done - 1])
        start = stop
        field = field.with_coeffs(u.copy())
        if stop in snaps:
            outputs.snapshot(field, snaps[stop])
    return field
