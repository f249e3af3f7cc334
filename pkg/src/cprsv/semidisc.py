"""Semidiscrete right-hand sides for periodic advection and Burgers.

Both problems use the correction form: a volume term plus
C (g_face - f_num) with C = M^{-1} R^T B, acting per element.  Advection
is the plain divergence form; Burgers uses the energy-stable 1/3-2/3
split, whose surface consistency term is g = 1/3 R(U u) + 1/6 (R u)^2.
"""

from __future__ import annotations

from enum import Enum, unique
from functools import lru_cache

import numpy as np

from .fields import SolutionField
from .legendre import legendre_vandermonde
from .operators import Basis, OperatorSet, projection_rule


@unique
class ProblemKind(Enum):
    ADVECTION = "advection"
    BURGERS = "burgers"


@unique
class FluxKind(Enum):
    CENTRAL = "central"
    UPWIND = "upwind"
    LLF = "llf"


_FLUX_PROBLEM = {
    FluxKind.CENTRAL: ProblemKind.ADVECTION,
    FluxKind.UPWIND: ProblemKind.ADVECTION,
    FluxKind.LLF: ProblemKind.BURGERS,
}


def validate_flux(problem: ProblemKind, flux: FluxKind) -> None:
    if _FLUX_PROBLEM[flux] is not problem:
        raise ValueError(f"flux {flux.value!r} is not defined for {problem.value!r}")


def numerical_flux(flux: FluxKind, problem: ProblemKind, u_minus, u_plus):
    """Interface flux from the left/right trace states (vectorized)."""
    validate_flux(problem, flux)
    u_minus = np.asarray(u_minus, dtype=np.float64)
    u_plus = np.asarray(u_plus, dtype=np.float64)
    if flux is FluxKind.CENTRAL:
        return 0.5 * (u_minus + u_plus)
    if flux is FluxKind.UPWIND:
        return u_minus.copy()
    # local Lax-Friedrichs for f(u) = u^2 / 2
    lam = np.maximum(np.abs(u_minus), np.abs(u_plus))
    return 0.25 * (u_minus**2 + u_plus**2) - 0.5 * lam * (u_plus - u_minus)


def interface_states(field: SolutionField, ops: OperatorSet) -> tuple[np.ndarray, np.ndarray]:
    """Trace pairs (u_minus, u_plus) at the n_elements periodic interfaces.

    Interface j sits at the right face of element j; u_minus[j] is element
    j's right trace and u_plus[j] is element (j+1) mod N's left trace.
    """
    traces = field.coeffs @ ops.R.T
    return traces[:, 1].copy(), np.roll(traces[:, 0], -1)


def advection_rhs(field: SolutionField, ops: OperatorSet, flux: FluxKind) -> SolutionField:
    """du/dt = -D u - C (f_num - R u), scaled by 1/J per element."""
    validate_flux(ProblemKind.ADVECTION, flux)
    u = field.coeffs
    traces = u @ ops.R.T
    fnum = numerical_flux(flux, ProblemKind.ADVECTION, traces[:, 1], np.roll(traces[:, 0], -1))
    f_faces = np.stack([np.roll(fnum, 1), fnum], axis=1)
    rhs = -(u @ ops.D.T) - (f_faces - traces) @ ops.C.T
    rhs /= field.mesh.jacobian
    return field.with_coeffs(rhs)


@lru_cache(maxsize=None)
def _modal_product_tables(p: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Quadrature tables for exact modal products: weights, Vandermonde at
    the quadrature nodes, and the projection scale (2n + 1) / 2."""
    q = projection_rule(p)
    v = legendre_vandermonde(p, q.nodes)
    scale = (2.0 * np.arange(p + 1) + 1.0) / 2.0
    for arr in (q.weights, v, scale):
        arr.setflags(write=False)
    return q.weights, v, scale


def burgers_rhs(field: SolutionField, ops: OperatorSet, flux: FluxKind) -> SolutionField:
    """Split-form Burgers right-hand side

        du/dt = -1/3 D (U u) - 1/3 U* D u - C (f_num - 1/3 R(U u) - 1/6 (R u)^2)

    with U multiplication by u (collocated or exactly projected) and U* its
    M-adjoint, scaled by 1/J per element.
    """
    validate_flux(ProblemKind.BURGERS, flux)
    u = field.coeffs
    if ops.basis is Basis.MODAL:
        # U u and U* D u by exact quadrature: U is M-self-adjoint, so
        # U* D u is the projection of u(x) u'(x)
        w, v, scale = _modal_product_tables(ops.p)
        uvals = u @ v.T
        duvals = (u @ ops.D.T) @ v.T
        uu = ((uvals**2 * w[None, :]) @ v) * scale[None, :]
        u_du = ((uvals * duvals * w[None, :]) @ v) * scale[None, :]
        volume = -(uu @ ops.D.T) / 3.0 - u_du / 3.0
    else:
        uu = u * u
        volume = -(uu @ ops.D.T) / 3.0 - u * (u @ ops.D.T) / 3.0
    traces = u @ ops.R.T
    traces_uu = uu @ ops.R.T
    fnum = numerical_flux(flux, ProblemKind.BURGERS, traces[:, 1], np.roll(traces[:, 0], -1))
    f_faces = np.stack([np.roll(fnum, 1), fnum], axis=1)
    g = f_faces - traces_uu / 3.0 - traces**2 / 6.0
    rhs = volume - g @ ops.C.T
    rhs /= field.mesh.jacobian
    return field.with_coeffs(rhs)


def make_rhs(problem: ProblemKind, ops: OperatorSet, flux: FluxKind):
    """Bind a problem and flux into a field -> field evaluator."""
    validate_flux(problem, flux)
    if problem is ProblemKind.ADVECTION:
        return lambda field: advection_rhs(field, ops, flux)
    return lambda field: burgers_rhs(field, ops, flux)
