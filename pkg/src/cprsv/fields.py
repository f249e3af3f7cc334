"""Periodic 1D meshes and element-local solution fields."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .legendre import gauss_rule, legendre_vandermonde
from .operators import Basis, OperatorSet, constant_coefficients, lagrange_row, projection_rule


@dataclass(frozen=True)
class Mesh1D:
    """Uniform periodic mesh on [x_min, x_max]."""

    x_min: float
    x_max: float
    n_elements: int

    def __post_init__(self) -> None:
        if not self.x_max > self.x_min:
            raise ValueError(f"empty domain [{self.x_min}, {self.x_max}]")
        if self.n_elements < 1:
            raise ValueError(f"need at least one element, got {self.n_elements}")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n_elements

    @property
    def jacobian(self) -> float:
        """Map factor dx/2 from the reference element [-1, 1]."""
        return 0.5 * self.dx

    @property
    def edges(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n_elements + 1)

    @property
    def centers(self) -> np.ndarray:
        return self.x_min + self.dx * (np.arange(self.n_elements) + 0.5)

    def physical_points(self, xi) -> np.ndarray:
        """Map reference points xi to all elements, shape (n_elements, len(xi))."""
        xi = np.atleast_1d(np.asarray(xi, dtype=np.float64))
        return self.centers[:, None] + self.jacobian * xi[None, :]


@dataclass(frozen=True)
class SolutionField:
    """Element-local coefficients, shape (n_elements, p + 1).

    Nodal bases store point values at the collocation nodes; the modal
    basis stores Legendre coefficients.  Fields are value-semantic: all
    operations return new instances.
    """

    mesh: Mesh1D
    basis: Basis
    p: int
    coeffs: np.ndarray

    def __post_init__(self) -> None:
        assert self.coeffs.shape == (self.mesh.n_elements, self.p + 1)

    def with_coeffs(self, coeffs: np.ndarray) -> "SolutionField":
        return replace(self, coeffs=coeffs)


def init_field(
    mesh: Mesh1D, ops: OperatorSet, fn: Callable[[np.ndarray], np.ndarray]
) -> SolutionField:
    """Sample (nodal) or L2-project (modal) *fn* onto the mesh.

    *fn* must accept ndarray arguments elementwise.
    """
    if ops.basis is Basis.MODAL:
        q = projection_rule(ops.p)
        vals = fn(mesh.physical_points(q.nodes))  # (N, nq)
        v = legendre_vandermonde(ops.p, q.nodes)  # (nq, n)
        coeffs = (vals * q.weights[None, :]) @ v
        coeffs *= ((2.0 * np.arange(ops.n) + 1.0) / 2.0)[None, :]
    else:
        assert ops.rule is not None
        coeffs = np.asarray(fn(mesh.physical_points(ops.rule.nodes)), dtype=np.float64)
    return SolutionField(mesh, ops.basis, ops.p, coeffs)


def element_energies(field: SolutionField, ops: OperatorSet) -> np.ndarray:
    """Per-element energies J u^T M u."""
    m = ops.m_diag
    return field.mesh.jacobian * np.einsum("ik,k,ik->i", field.coeffs, m, field.coeffs)


def energy(field: SolutionField, ops: OperatorSet) -> float:
    """Discrete energy sum_i J u_i^T M u_i."""
    return float(np.sum(element_energies(field, ops)))


def mass(field: SolutionField, ops: OperatorSet) -> float:
    """Discrete mass sum_i J 1^T M u_i."""
    wm = ops.m_diag * constant_coefficients(ops)
    return float(field.mesh.jacobian * np.sum(field.coeffs @ wm))


def evaluation_points(ops: OperatorSet) -> np.ndarray:
    """Reference points where a field is reported: its own nodes, or the
    degree-p Gauss nodes for the modal basis."""
    if ops.basis is Basis.MODAL:
        return gauss_rule(ops.p).nodes
    assert ops.rule is not None
    return ops.rule.nodes


def evaluate(field: SolutionField, ops: OperatorSet, xi) -> np.ndarray:
    """Evaluate the field at reference points xi in every element."""
    xi = np.atleast_1d(np.asarray(xi, dtype=np.float64))
    if ops.basis is Basis.MODAL:
        v = legendre_vandermonde(ops.p, xi)
        return field.coeffs @ v.T
    assert ops.rule is not None
    rows = np.vstack([lagrange_row(ops.rule.nodes, float(x)) for x in xi])
    return field.coeffs @ rows.T
