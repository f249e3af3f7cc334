"""Legendre evaluation and quadrature against numpy.polynomial.legendre.

numpy's Legendre module is used here as an independent oracle; the
package itself never calls it.
"""

from __future__ import annotations

import numpy as np
import numpy.polynomial.legendre as npleg
import pytest

from cprsv import (
    ConvergenceError,
    QuadratureKind,
    a_phi_deriv_expansion,
    gauss_rule,
    legendre,
    legendre_deriv,
    legendre_vandermonde,
    lobatto_rule,
)
from cprsv.legendre import _newton


def _unit(n: int) -> np.ndarray:
    e = np.zeros(n + 1)
    e[n] = 1.0
    return e


@pytest.mark.parametrize("n", range(21))
def test_legendre_matches_numpy(n):
    rng = np.random.default_rng(704 + n)
    x = rng.uniform(-1.0, 1.0, size=64)
    np.testing.assert_allclose(legendre(n, x), npleg.legval(x, _unit(n)),
                               rtol=0.0, atol=1e-13)


@pytest.mark.parametrize("n", range(21))
def test_legendre_deriv_matches_numpy(n):
    rng = np.random.default_rng(1107 + n)
    x = rng.uniform(-1.0, 1.0, size=64)
    oracle = npleg.legval(x, npleg.legder(_unit(n)))
    np.testing.assert_allclose(legendre_deriv(n, x), oracle, rtol=0.0, atol=1e-11)


def test_legendre_hand_values():
    x = 0.3
    assert legendre(0, x) == 1.0
    assert legendre(1, x) == 0.3
    np.testing.assert_allclose(legendre(2, x), 0.5 * (3 * 0.09 - 1), rtol=1e-15)
    np.testing.assert_allclose(legendre_deriv(2, x), 3 * 0.3, rtol=1e-15)


def test_legendre_endpoint_values():
    n = np.arange(17)
    assert all(legendre(int(k), 1.0) == 1.0 for k in n)
    np.testing.assert_allclose([legendre(int(k), -1.0) for k in n], (-1.0) ** n,
                               rtol=0.0, atol=0.0)


def test_vandermonde_columns():
    x = np.linspace(-1, 1, 9)
    v = legendre_vandermonde(5, x)
    assert v.shape == (9, 6)
    for k in range(6):
        np.testing.assert_allclose(v[:, k], legendre(k, x), rtol=0.0, atol=1e-14)


@pytest.mark.parametrize("p", range(17))
def test_gauss_rule_matches_numpy(p):
    x, w = npleg.leggauss(p + 1)
    rule = gauss_rule(p)
    assert rule.kind is QuadratureKind.GAUSS
    assert rule.exactness == 2 * p + 1
    np.testing.assert_allclose(rule.nodes, x, rtol=0.0, atol=1e-14)
    np.testing.assert_allclose(rule.weights, w, rtol=1e-13)


@pytest.mark.parametrize("p", range(1, 17))
def test_lobatto_rule_structure(p):
    rule = lobatto_rule(p)
    assert rule.kind is QuadratureKind.LOBATTO
    assert rule.exactness == 2 * p - 1
    assert rule.nodes[0] == -1.0 and rule.nodes[-1] == 1.0
    assert np.all(np.diff(rule.nodes) > 0)
    np.testing.assert_allclose(rule.nodes, -rule.nodes[::-1], rtol=0.0, atol=1e-15)
    np.testing.assert_allclose(np.sum(rule.weights), 2.0, rtol=1e-14)


@pytest.mark.parametrize("make,p", [(gauss_rule, 4), (gauss_rule, 9),
                                    (lobatto_rule, 4), (lobatto_rule, 9)])
def test_rule_monomial_exactness(make, p):
    """Integrates x^k exactly for every k up to the declared exactness."""
    rule = make(p)
    for k in range(rule.exactness + 1):
        exact = 0.0 if k % 2 else 2.0 / (k + 1)
        got = float(np.sum(rule.weights * rule.nodes**k))
        np.testing.assert_allclose(got, exact, rtol=0.0, atol=1e-13)


def test_lobatto_rejects_degree_zero():
    with pytest.raises(ValueError):
        lobatto_rule(0)


def test_gauss_rejects_negative_degree():
    with pytest.raises(ValueError):
        gauss_rule(-1)


@pytest.mark.parametrize("p", range(1, 17))
def test_a_phi_deriv_expansion_identity(p):
    """(1 - x^2) phi_p'(x) = c (phi_{p-1}(x) - phi_{p+1}(x))."""
    lo, hi = a_phi_deriv_expansion(p)
    np.testing.assert_allclose(lo, p * (p + 1) / (2 * p + 1), rtol=1e-15)
    assert hi == -lo
    rng = np.random.default_rng(23 + p)
    x = rng.uniform(-1.0, 1.0, size=20)
    lhs = (1.0 - x**2) * npleg.legval(x, npleg.legder(_unit(p)))
    rhs = lo * npleg.legval(x, _unit(p - 1)) + hi * npleg.legval(x, _unit(p + 1))
    np.testing.assert_allclose(lhs, rhs, rtol=0.0, atol=1e-12)


def test_a_phi_deriv_expansion_hand_value():
    assert a_phi_deriv_expansion(1) == (2.0 / 3.0, -2.0 / 3.0)


def test_newton_reports_stall():
    # x^2 + 1 has no real root; |f| >= 1 forever
    with pytest.raises(ConvergenceError):
        _newton(lambda x: x * x + 1.0, lambda x: 2.0 * x, np.array([0.5]), "no root")
