"""Adaptive artificial dissipation for explicit Euler updates.

The update u+ = u + dt (du/dt - eps A u) with A = (M^{-1} D^T M a D)^s
changes the element energy by

    |u+|_M^2 - |u|_M^2 - 2 dt <u, du/dt>_M = dt (A2 eps^2 + B2 eps + C2)

with A2 = dt |A u|_M^2, B2 = -2 <u, A u>_M - 2 dt <du/dt, A u>_M and
C2 = dt |du/dt|_M^2.  Choosing eps as the smaller root of the quadratic
removes the O(dt^2) energy growth of the explicit Euler step exactly;
when no admissible root exists eps falls back to 0 and the element is
flagged as clamped.

All inner products use the reference-element mass matrix on the stored
coefficients; the common jacobian factors out of the quadratic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum, unique

import numpy as np

from .fields import SolutionField
from .operators import OperatorSet, dissipation_operator, multiplication_operator

#: below this the leading quadratic coefficient is treated as exactly zero
TINY_A = 1.0e-300
#: negative discriminants within this relative window are snapped to zero
DISC_SNAP = 1.0e-14


@unique
class DissipationMode(Enum):
    OFF = "off"
    FIXED = "fixed"
    ADAPTIVE = "adaptive"


@dataclass(frozen=True)
class DissipationConfig:
    mode: DissipationMode = DissipationMode.OFF
    order: int = 1
    epsilon: float = 0.0  # fixed-mode strength

    def __post_init__(self) -> None:
        if self.order < 1:
            raise ValueError(f"dissipation order must be >= 1, got {self.order}")
        if self.mode is DissipationMode.FIXED and not self.epsilon > 0.0:
            raise ValueError("fixed dissipation needs epsilon > 0")


@dataclass(frozen=True)
class EpsilonReport:
    """Per-element record of the adaptive strength selection."""

    element: int
    A: float
    B: float
    C: float
    discriminant: float
    epsilon: float
    epsilon_1: float  # larger root; logged only, never applied
    clamped: bool


def compute_abc(
    u: np.ndarray, dudt: np.ndarray, asu: np.ndarray, dt: float, m: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Quadratic coefficients of the post-step energy residual, per element.

    Arguments are (N, n) coefficient arrays and the diagonal of M.
    """
    a = dt * np.einsum("ik,k,ik->i", asu, m, asu)
    b = -2.0 * np.einsum("ik,k,ik->i", u, m, asu) - 2.0 * dt * np.einsum(
        "ik,k,ik->i", dudt, m, asu
    )
    c = dt * np.einsum("ik,k,ik->i", dudt, m, dudt)
    return a, b, c


def _solve_epsilon(a: float, b: float, c: float) -> tuple[float, float, float, bool]:
    """Return (epsilon, epsilon_1, discriminant, clamped)."""
    if a < TINY_A:
        # A u vanished; nothing to adapt.  C == 0 (stationary element) is benign.
        return 0.0, math.nan, math.nan, c != 0.0
    disc = b * b - 4.0 * a * c
    if disc < 0.0 and disc >= -DISC_SNAP * b * b:
        disc = 0.0
    if disc < 0.0 or b > 0.0:
        return 0.0, math.nan, disc, True
    root = math.sqrt(disc)
    eps = (-b - root) / (2.0 * a)
    eps1 = (-b + root) / (2.0 * a)
    return (eps if eps > 0.0 else 0.0), eps1, disc, False


def adaptive_epsilon(a: float, b: float, c: float) -> tuple[float, bool]:
    """Smaller nonnegative root of a eps^2 + b eps + c = 0, or (0, clamped)."""
    eps, _, _, clamped = _solve_epsilon(float(a), float(b), float(c))
    return eps, clamped


def max_stable_dt(u: np.ndarray, asu: np.ndarray, eps: float, m: np.ndarray) -> float:
    """Largest Euler dt for which -eps A u alone does not grow the energy:
    2 <u, A u>_M / (eps |A u|_M^2)."""
    den = eps * float(asu @ (m * asu))
    if den == 0.0:
        return math.inf
    return 2.0 * float(u @ (m * asu)) / den


def apply_dissipation(
    dudt: SolutionField, u: SolutionField, a_s: np.ndarray, eps
) -> SolutionField:
    """Subtract eps A^s u from a right-hand side; *eps* is a scalar or a
    per-element array."""
    eps = np.asarray(eps, dtype=np.float64)
    if eps.ndim == 0:
        eps = np.full(u.coeffs.shape[0], float(eps))
    return dudt.with_coeffs(dudt.coeffs - eps[:, None] * (u.coeffs @ a_s.T))


@dataclass(frozen=True)
class PipelineResult:
    corrected: np.ndarray  # (N, n) right-hand side after dissipation
    eps: np.ndarray  # (N,) applied strengths
    clamped: np.ndarray  # (N,) bool
    reports: list[EpsilonReport] | None


@dataclass(frozen=True)
class DissipationPipeline:
    """Bound dissipation operator plus the per-step strength policy."""

    config: DissipationConfig
    ops: OperatorSet
    a_s: np.ndarray | None  # None when mode is off

    def apply(
        self, u: np.ndarray, dudt: np.ndarray, dt: float, collect: bool = False
    ) -> PipelineResult:
        n_el = u.shape[0]
        mode = self.config.mode
        if mode is DissipationMode.OFF:
            return PipelineResult(
                dudt, np.zeros(n_el), np.zeros(n_el, dtype=bool), [] if collect else None
            )
        assert self.a_s is not None
        asu = u @ self.a_s.T
        m = self.ops.m_diag
        a, b, c = compute_abc(u, dudt, asu, dt, m)
        clamped = np.zeros(n_el, dtype=bool)
        reports: list[EpsilonReport] | None = [] if collect else None
        if mode is DissipationMode.FIXED:
            eps = np.full(n_el, self.config.epsilon)
            if reports is not None:
                for i in range(n_el):
                    disc = b[i] * b[i] - 4.0 * a[i] * c[i]
                    reports.append(
                        EpsilonReport(
                            i, a[i], b[i], c[i], disc, eps[i], math.nan, False
                        )
                    )
        else:
            eps = np.zeros(n_el)
            for i in range(n_el):
                e, e1, disc, cl = _solve_epsilon(a[i], b[i], c[i])
                eps[i] = e
                clamped[i] = cl
                if reports is not None:
                    reports.append(
                        EpsilonReport(i, a[i], b[i], c[i], disc, e, e1, cl)
                    )
        corrected = dudt - eps[:, None] * asu
        return PipelineResult(corrected, eps, clamped, reports)


def build_pipeline(config: DissipationConfig, ops: OperatorSet) -> DissipationPipeline:
    """Assemble the pipeline; the viscosity profile is a(x) = 1 - x^2."""
    if config.mode is DissipationMode.OFF:
        return DissipationPipeline(config, ops, None)
    a_mul = multiplication_operator(ops, (1.0, 0.0, -1.0))
    return DissipationPipeline(config, ops, dissipation_operator(ops, a_mul, config.order))
