"""Legendre polynomials and Gauss/Lobatto quadrature rules on [-1, 1]."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum, unique

import numpy as np

#: iteration cap for the Newton root search; hitting it signals a bug, not
#: an input problem, for any sane degree
MAX_NEWTON_ITER = 100
#: absolute tolerance on the Newton update
NEWTON_TOL = 1.0e-15


class ConvergenceError(RuntimeError):
    """Newton iteration for quadrature nodes did not converge."""


@unique
class QuadratureKind(Enum):
    GAUSS = "gauss"
    LOBATTO = "lobatto"


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and weights of a quadrature rule on the reference element [-1, 1].

    *degree* is the polynomial degree p of the associated basis, so the rule
    has p + 1 nodes; *exactness* is the highest polynomial degree integrated
    exactly.
    """

    kind: QuadratureKind
    degree: int
    nodes: np.ndarray
    weights: np.ndarray
    exactness: int

    def __post_init__(self) -> None:
        assert self.nodes.shape == (self.degree + 1,)
        assert self.weights.shape == self.nodes.shape
        assert np.all(np.diff(self.nodes) > 0.0)
        assert np.all(self.weights > 0.0)


def legendre(n: int, x):
    """Evaluate the Legendre polynomial phi_n by the three-term recurrence

        (k + 1) phi_{k+1}(x) = (2k + 1) x phi_k(x) - k phi_{k-1}(x).
    """
    if n < 0:
        raise ValueError(f"negative degree: {n}")
    x = np.asarray(x, dtype=np.float64)
    p_prev = np.ones_like(x)
    if n == 0:
        return p_prev
    p = x.copy()
    for k in range(1, n):
        p, p_prev = ((2 * k + 1) * x * p - k * p_prev) / (k + 1), p
    return p


def legendre_deriv(n: int, x):
    """Evaluate phi_n' by the derivative recurrence

        phi_k'(x) = (2k - 1) phi_{k-1}(x) + phi_{k-2}'(x).
    """
    if n < 0:
        raise ValueError(f"negative degree: {n}")
    x = np.asarray(x, dtype=np.float64)
    if n == 0:
        return np.zeros_like(x)
    p_prev = np.ones_like(x)  # phi_0
    p = x.copy()  # phi_1
    d_prev = np.zeros_like(x)  # phi_0'
    d = np.ones_like(x)  # phi_1'
    for k in range(2, n + 1):
        d, d_prev = (2 * k - 1) * p + d_prev, d
        p, p_prev = ((2 * k - 1) * x * p - (k - 1) * p_prev) / k, p
    return d


def legendre_vandermonde(p: int, x) -> np.ndarray:
    """Vandermonde matrix V[i, n] = phi_n(x_i) for n = 0 .. p."""
    if p < 0:
        raise ValueError(f"negative degree: {p}")
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    v = np.empty((x.size, p + 1))
    v[:, 0] = 1.0
    if p >= 1:
        v[:, 1] = x
    for k in range(1, p):
        v[:, k + 1] = ((2 * k + 1) * x * v[:, k] - k * v[:, k - 1]) / (k + 1)
    return v


def _newton(f, df, x0: np.ndarray, what: str) -> np.ndarray:
    x = np.array(x0, dtype=np.float64)
    for _ in range(MAX_NEWTON_ITER):
        dx = f(x) / df(x)
        x -= dx
        if np.max(np.abs(dx)) < NEWTON_TOL:
            return x
    raise ConvergenceError(
        f"Newton iteration for {what} stalled after {MAX_NEWTON_ITER} steps"
    )


def gauss_rule(p: int) -> QuadratureRule:
    """Gauss-Legendre rule with p + 1 nodes, exact through degree 2p + 1.

    Nodes are the roots of phi_{p+1}, found by Newton iteration from
    Chebyshev initial guesses; weights are 2 / ((1 - x^2) phi_{p+1}'(x)^2).
    """
    if p < 0:
        raise ValueError(f"negative degree: {p}")
    n = p + 1
    k = np.arange(n)
    x0 = -np.cos(np.pi * (4 * k + 3) / (4 * n + 2))
    x = _newton(
        lambda t: legendre(n, t), lambda t: legendre_deriv(n, t), x0, f"gauss_rule({p})"
    )
    # enforce the node symmetry exactly; odd rules get a bitwise-zero center
    x = 0.5 * (x - x[::-1])
    w = 2.0 / ((1.0 - x**2) * legendre_deriv(n, x) ** 2)
    return QuadratureRule(QuadratureKind.GAUSS, p, x, w, 2 * p + 1)


def _legendre_deriv2(n: int, x):
    # phi_n'' from the Legendre ODE; valid away from the endpoints
    return (2.0 * x * legendre_deriv(n, x) - n * (n + 1) * legendre(n, x)) / (
        1.0 - x**2
    )


def lobatto_rule(p: int) -> QuadratureRule:
    """Gauss-Lobatto rule with p + 1 nodes, exact through degree 2p - 1.

    Nodes are -1, +1 and the roots of phi_p'; weights are
    2 / (p (p + 1) phi_p(x)^2).
    """
    if p < 1:
        raise ValueError(f"Lobatto rule needs p >= 1, got {p}")
    if p == 1:
        x = np.array([-1.0, 1.0])
    else:
        k = np.arange(1, p)
        x0 = -np.cos(np.pi * k / p)
        xi = _newton(
            lambda t: legendre_deriv(p, t),
            lambda t: _legendre_deriv2(p, t),
            x0,
            f"lobatto_rule({p})",
        )
        x = np.concatenate(([-1.0], xi, [1.0]))
        x = 0.5 * (x - x[::-1])
    w = 2.0 / (p * (p + 1) * legendre(p, x) ** 2)
    return QuadratureRule(QuadratureKind.LOBATTO, p, x, w, 2 * p - 1)


def a_phi_deriv_expansion(p: int) -> tuple[float, float]:
    """Coefficients (c_lo, c_hi) of (1 - x^2) phi_p' = c_lo phi_{p-1} + c_hi phi_{p+1}.

    Both are p (p + 1) / (2p + 1) up to sign; the expansion is what makes
    phi_p an eigenvector of the viscous operator with a(x) = 1 - x^2.
    """
    if p < 1:
        raise ValueError(f"expansion needs p >= 1, got {p}")
    c = p * (p + 1) / (2 * p + 1)
    return c, -c
