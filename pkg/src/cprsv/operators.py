"""SBP operator sets on the reference element for three Legendre-type bases.

Every basis carries a mass matrix M, a differentiation matrix D, a boundary
restriction R to the faces x = -1, +1 and the sign matrix B = diag(-1, 1)
satisfying the summation-by-parts identity

    M D + D^T M = R^T B R.

The correction matrix C = M^{-1} R^T B turns face flux differences into
volume contributions; together these are everything the semidiscretizations
and the dissipation operators need.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum, unique
from typing import Sequence

import numpy as np

from .legendre import (
    QuadratureRule,
    gauss_rule,
    legendre,
    legendre_vandermonde,
    lobatto_rule,
)


@unique
class Basis(Enum):
    GAUSS = "gauss"
    LOBATTO = "lobatto"
    MODAL = "modal"


@dataclass(frozen=True)
class OperatorSet:
    """Reference-element operators for one basis at degree p.

    M, D are (n, n) with n = p + 1, R is (2, n) with the face order
    (-1, +1), B = diag(-1, 1) and C = M^{-1} R^T B.  *rule* is the
    collocation rule for nodal bases and None for the modal basis.
    """

    basis: Basis
    p: int
    M: np.ndarray
    D: np.ndarray
    R: np.ndarray
    B: np.ndarray
    C: np.ndarray
    rule: QuadratureRule | None

    @property
    def n(self) -> int:
        return self.p + 1

    @property
    def m_diag(self) -> np.ndarray:
        return np.diagonal(self.M)


def _barycentric_weights(x: np.ndarray) -> np.ndarray:
    diff = x[:, None] - x[None, :]
    np.fill_diagonal(diff, 1.0)
    return 1.0 / np.prod(diff, axis=1)


def lagrange_row(nodes: np.ndarray, x: float, bw: np.ndarray | None = None) -> np.ndarray:
    """Row of Lagrange basis values ell_j(x) by the barycentric formula."""
    if bw is None:
        bw = _barycentric_weights(nodes)
    diff = x - nodes
    hit = np.nonzero(diff == 0.0)[0]
    if hit.size:
        row = np.zeros_like(nodes)
        row[hit[0]] = 1.0
        return row
    t = bw / diff
    return t / t.sum()


def _differentiation_matrix(x: np.ndarray, bw: np.ndarray) -> np.ndarray:
    dx = x[:, None] - x[None, :]
    np.fill_diagonal(dx, 1.0)
    d = (bw[None, :] / bw[:, None]) / dx
    np.fill_diagonal(d, 0.0)
    # diagonal from exact row-sum zero so constants differentiate to zero
    np.fill_diagonal(d, -d.sum(axis=1))
    return d


def _modal_differentiation_matrix(p: int) -> np.ndarray:
    d = np.zeros((p + 1, p + 1))
    for k in range(p + 1):
        d[k, k + 1 :: 2] = 2 * k + 1
    return d


def build_operators(basis: Basis, p: int) -> OperatorSet:
    """Construct the SBP operator set for *basis* at degree *p*."""
    b = np.diag([-1.0, 1.0])
    if basis is Basis.MODAL:
        n = p + 1
        m = 2.0 / (2.0 * np.arange(n) + 1.0)
        d = _modal_differentiation_matrix(p)
        r = np.vstack([(-1.0) ** np.arange(n), np.ones(n)])
        rule = None
    else:
        rule = gauss_rule(p) if basis is Basis.GAUSS else lobatto_rule(p)
        x = rule.nodes
        m = rule.weights
        bw = _barycentric_weights(x)
        d = _differentiation_matrix(x, bw)
        r = np.vstack([lagrange_row(x, -1.0, bw), lagrange_row(x, 1.0, bw)])
    c = (r.T * np.array([-1.0, 1.0])) / m[:, None]
    return OperatorSet(basis, p, np.diag(m), d, r, b, c, rule)


def check_sbp(ops: OperatorSet) -> float:
    """Max-norm residual of M D + D^T M - R^T B R."""
    res = ops.M @ ops.D + ops.D.T @ ops.M - ops.R.T @ ops.B @ ops.R
    return float(np.max(np.abs(res)))


def constant_coefficients(ops: OperatorSet, value: float = 1.0) -> np.ndarray:
    """Coefficient vector representing the constant *value*."""
    e = np.zeros(ops.n)
    if ops.basis is Basis.MODAL:
        e[0] = value
    else:
        e[:] = value
    return e


def basis_coefficients(ops: OperatorSet, n: int) -> np.ndarray:
    """Coefficient vector representing phi_n in this basis."""
    if not 0 <= n <= ops.p:
        raise ValueError(f"mode {n} outside 0..{ops.p}")
    if ops.basis is Basis.MODAL:
        e = np.zeros(ops.n)
        e[n] = 1.0
        return e
    assert ops.rule is not None
    return np.asarray(legendre(n, ops.rule.nodes))


@dataclass(frozen=True)
class MultiplicationOperator:
    """Matrix of multiplication by a polynomial coefficient a(x).

    *coefficients* are monomial coefficients of a, lowest power first.
    Nodal bases collocate; the modal basis applies the exact product
    followed by exact L2 projection back to degree p.
    """

    coefficients: tuple[float, ...]
    matrix: np.ndarray


def projection_rule(p: int) -> QuadratureRule:
    """Gauss rule used for modal products: ceil((3p + 3) / 2) nodes.

    Exactness 3p + 2 covers a(x) u phi with deg a <= 2 as well as the
    quadratic products of the split-form volume terms.
    """
    nq = -(-(3 * p + 3) // 2)
    return gauss_rule(nq - 1)


def _polyval(coeffs: Sequence[float], x: np.ndarray) -> np.ndarray:
    a = np.zeros_like(x)
    for c in reversed(tuple(coeffs)):
        a = a * x + c
    return a


def multiplication_operator(
    ops: OperatorSet, coefficients: Sequence[float]
) -> MultiplicationOperator:
    """Multiplication by the polynomial a(x) with the given monomial coefficients."""
    coeffs = tuple(float(c) for c in coefficients)
    if len(coeffs) == 0 or len(coeffs) > 3:
        raise ValueError(
            f"coefficient polynomial must have degree <= 2, got {len(coeffs)} coefficients"
        )
    if ops.basis is Basis.MODAL:
        q = projection_rule(ops.p)
        v = legendre_vandermonde(ops.p, q.nodes)  # (nq, n)
        a_vals = _polyval(coeffs, q.nodes)
        mat = np.einsum("q,qk,qn->kn", q.weights * a_vals, v, v)
        mat *= ((2.0 * np.arange(ops.n) + 1.0) / 2.0)[:, None]
    else:
        assert ops.rule is not None
        mat = np.diag(_polyval(coeffs, ops.rule.nodes))
    return MultiplicationOperator(coeffs, mat)


def m_adjoint(ops: OperatorSet, a: np.ndarray) -> np.ndarray:
    """Adjoint M^{-1} a^T M with respect to the M inner product.

    All built-in bases have diagonal M, so this is an elementwise rescale
    of the transpose.
    """
    m = ops.m_diag
    return a.T * (m[None, :] / m[:, None])


def dissipation_operator(
    ops: OperatorSet, a_mul: MultiplicationOperator, order: int
) -> np.ndarray:
    """Viscous operator (M^{-1} D^T M a(x) D)^s.

    The base operator is M-self-adjoint and M-positive-semidefinite, and
    1^T M A u = 0, so applying -eps A^s u dissipates energy without
    touching the total mass.
    """
    if order < 1:
        raise ValueError(f"order must be >= 1, got {order}")
    m = ops.m_diag
    core = ops.D.T @ (m[:, None] * (a_mul.matrix @ ops.D))
    a1 = core / m[:, None]
    return np.linalg.matrix_power(a1, order)


def naive_dissipation_operator(
    ops: OperatorSet, a_mul: MultiplicationOperator, order: int
) -> np.ndarray:
    """Diagnostic form (-1)^{s+1} (D a(x) D)^s.

    Kept only to demonstrate its defect: it is not conservative on bases
    whose mass matrix is not the collocation identity for D^T.
    """
    if order < 1:
        raise ValueError(f"order must be >= 1, got {order}")
    sign = (-1.0) ** (order + 1)
    return sign * np.linalg.matrix_power(ops.D @ a_mul.matrix @ ops.D, order)


def expected_eigenvalue(basis: Basis, p: int, n: int) -> float:
    """Predicted eigenvalue of -A for phi_n with a(x) = 1 - x^2, order 1.

    The spectrum matches the continuous operator's -n (n + 1) except for
    the Lobatto top mode: the interior Lobatto nodes are the zeros of
    phi_p' and the endpoints zero out a(x), so the collocated product
    a(x_i) (D phi_p)_i vanishes at every node and phi_p is annihilated.
    Its eigenvalue is exactly 0 -- the top mode receives no dissipation
    on a Lobatto basis.
    """
    if basis is Basis.LOBATTO and n == p:
        return 0.0
    return -float(n * (n + 1))


@dataclass(frozen=True)
class EigenResult:
    n: int
    value: float
    expected: float
    residual: float


def eigen_check(ops: OperatorSet, a_mul: MultiplicationOperator) -> list[EigenResult]:
    """Rayleigh quotients and eigen-residuals of -A on the Legendre modes.

    For each n the report holds the M-inner-product Rayleigh quotient of
    -A at phi_n, the predicted eigenvalue, and the relative M-norm of
    (-A - value I) phi_n.
    """
    a1 = dissipation_operator(ops, a_mul, 1)
    m = ops.m_diag
    out = []
    for n in range(ops.p + 1):
        v = basis_coefficients(ops, n)
        av = -(a1 @ v)
        vnorm2 = float(v @ (m * v))
        lam = float(v @ (m * av)) / vnorm2
        r = av - lam * v
        res = float(np.sqrt((r @ (m * r)) / vnorm2))
        out.append(EigenResult(n, lam, expected_eigenvalue(ops.basis, ops.p, n), res))
    return out
