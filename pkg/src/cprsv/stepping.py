"""Explicit time stepping with per-stage adaptive dissipation."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum, unique

import numpy as np

from .dissipation import DissipationPipeline, EpsilonReport, PipelineResult
from .fields import SolutionField, energy, mass


@unique
class Integrator(Enum):
    EULER = "euler"
    SSPRK33 = "ssprk33"


@dataclass(frozen=True)
class TimeGrid:
    t_final: float
    num_steps: int

    def __post_init__(self) -> None:
        if not self.t_final > 0.0:
            raise ValueError(f"t_final must be positive, got {self.t_final}")
        if self.num_steps < 1:
            raise ValueError(f"num_steps must be >= 1, got {self.num_steps}")

    @property
    def dt(self) -> float:
        return self.t_final / self.num_steps


@dataclass(frozen=True)
class StepRecord:
    """State summary after one completed step (step 0 is the initial state)."""

    step: int
    time: float
    energy: float
    mass: float
    eps_min: float
    eps_max: float
    clamped_elements: int


class BlowUpError(RuntimeError):
    """The solution left the finite/bounded-energy regime."""

    def __init__(self, step: int, energy_value: float):
        super().__init__(f"blow-up at step {step}: energy {energy_value:g}")
        self.step = step
        self.energy = energy_value


def initial_record(field: SolutionField, ops) -> StepRecord:
    return StepRecord(0, 0.0, energy(field, ops), mass(field, ops), 0.0, 0.0, 0)


def _stage(
    field: SolutionField,
    rhs_fn,
    pipeline: DissipationPipeline,
    dt: float,
    collect: bool = False,
) -> tuple[SolutionField, PipelineResult]:
    dudt = rhs_fn(field)
    res = pipeline.apply(field.coeffs, dudt.coeffs, dt, collect)
    return field.with_coeffs(field.coeffs + dt * res.corrected), res


def _record(
    field: SolutionField, pipeline: DissipationPipeline, step: int, dt: float, stages
) -> StepRecord:
    eps_min = min(float(np.min(r.eps)) for r in stages)
    eps_max = max(float(np.max(r.eps)) for r in stages)
    clamped = np.zeros(field.coeffs.shape[0], dtype=bool)
    for r in stages:
        clamped |= r.clamped
    return StepRecord(
        step,
        step * dt,
        energy(field, pipeline.ops),
        mass(field, pipeline.ops),
        eps_min,
        eps_max,
        int(np.sum(clamped)),
    )


def euler_step(
    field: SolutionField,
    rhs_fn,
    pipeline: DissipationPipeline,
    dt: float,
    step: int = 1,
    collect: bool = False,
) -> tuple[SolutionField, StepRecord, list[EpsilonReport] | None]:
    """One forward Euler step; the record reflects the post-step state."""
    new, res = _stage(field, rhs_fn, pipeline, dt, collect)
    return new, _record(new, pipeline, step, dt, (res,)), res.reports


def ssprk33_step(
    field: SolutionField,
    rhs_fn,
    pipeline: DissipationPipeline,
    dt: float,
    step: int = 1,
    collect: bool = False,
) -> tuple[SolutionField, StepRecord, list[EpsilonReport] | None]:
    """One SSP-RK(3,3) step (Shu-Osher form); each stage reselects epsilon.

    The record aggregates the stages: min/max strength over all three and
    the count of elements clamped in any stage.
    """
    s1, r1 = _stage(field, rhs_fn, pipeline, dt, collect)
    s2h, r2 = _stage(s1, rhs_fn, pipeline, dt, collect)
    s2 = field.with_coeffs(0.75 * field.coeffs + 0.25 * s2h.coeffs)
    s3h, r3 = _stage(s2, rhs_fn, pipeline, dt, collect)
    new = field.with_coeffs((field.coeffs + 2.0 * s3h.coeffs) / 3.0)
    reports = None
    if collect:
        reports = [rep for r in (r1, r2, r3) if r.reports for rep in r.reports]
    return new, _record(new, pipeline, step, dt, (r1, r2, r3)), reports


STEPPERS = {Integrator.EULER: euler_step, Integrator.SSPRK33: ssprk33_step}
