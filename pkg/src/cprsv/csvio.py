"""CSV output with deterministic, shortest-round-trip float formatting."""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .dissipation import EpsilonReport
from .fields import SolutionField, evaluation_points
from .operators import Basis, OperatorSet
from .stepping import StepRecord

ENERGY_HEADER = "step,time,energy,mass,eps_min,eps_max,clamped_elements"
SNAPSHOT_HEADER = "element,node,x,u"
DIAGNOSTICS_HEADER = "step,time,element,A,B,C,discriminant,epsilon,clamped"


def fmt(x: float) -> str:
    """repr of a Python float: shortest digits that round-trip."""
    return repr(float(x))


def write_energy_csv(path: str, records: Sequence[StepRecord]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(ENERGY_HEADER + "\n")
        for r in records:
            fh.write(
                f"{r.step},{fmt(r.time)},{fmt(r.energy)},{fmt(r.mass)},"
                f"{fmt(r.eps_min)},{fmt(r.eps_max)},{r.clamped_elements}\n"
            )


def write_snapshot_csv(path: str, field: SolutionField, ops: OperatorSet) -> None:
    """One row per (element, node).  Nodal fields report their collocation
    values; modal fields are evaluated at the degree-p Gauss nodes."""
    xi = evaluation_points(ops)
    xs = field.mesh.physical_points(xi)
    if ops.basis is Basis.MODAL:
        from .legendre import legendre_vandermonde

        vals = field.coeffs @ legendre_vandermonde(ops.p, xi).T
    else:
        vals = field.coeffs
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(SNAPSHOT_HEADER + "\n")
        for i in range(xs.shape[0]):
            for j in range(xs.shape[1]):
                fh.write(f"{i},{j},{fmt(xs[i, j])},{fmt(vals[i, j])}\n")


def write_diagnostics_csv(
    path: str, rows: Iterable[tuple[int, float, EpsilonReport]]
) -> None:
    """Rows are (step, time, report) triples."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(DIAGNOSTICS_HEADER + "\n")
        for step, time, r in rows:
            fh.write(
                f"{step},{fmt(time)},{r.element},{fmt(r.A)},{fmt(r.B)},{fmt(r.C)},"
                f"{fmt(r.discriminant)},{fmt(r.epsilon)},{1 if r.clamped else 0}\n"
            )
