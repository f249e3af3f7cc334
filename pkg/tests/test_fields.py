"""Meshes, solution fields, and the discrete energy/mass functionals."""

from __future__ import annotations

import numpy as np
import pytest

from cprsv import (
    Basis,
    Mesh1D,
    build_operators,
    energy,
    evaluate,
    init_field,
    mass,
)
from cprsv.fields import element_energies, evaluation_points

ALL_BASES = [Basis.GAUSS, Basis.LOBATTO, Basis.MODAL]


def test_mesh_geometry():
    mesh = Mesh1D(0.0, 2.0, 8)
    assert mesh.dx == 0.25
    assert mesh.jacobian == 0.125
    np.testing.assert_allclose(mesh.edges, np.linspace(0, 2, 9), atol=1e-15)
    np.testing.assert_allclose(mesh.centers, np.linspace(0.125, 1.875, 8), atol=1e-15)
    pts = mesh.physical_points(np.array([-1.0, 0.0, 1.0]))
    assert pts.shape == (8, 3)
    np.testing.assert_allclose(pts[0], [0.0, 0.125, 0.25], atol=1e-15)
    np.testing.assert_allclose(pts[-1], [1.75, 1.875, 2.0], atol=1e-15)


def test_mesh_validation():
    with pytest.raises(ValueError):
        Mesh1D(1.0, 1.0, 4)
    with pytest.raises(ValueError):
        Mesh1D(0.0, 1.0, 0)


@pytest.mark.parametrize("basis", ALL_BASES)
def test_constant_field_mass_and_energy(basis):
    mesh = Mesh1D(0.0, 2.0, 8)
    ops = build_operators(basis, 5)
    f = init_field(mesh, ops, lambda x: np.ones_like(x))
    np.testing.assert_allclose(mass(f, ops), 2.0, rtol=1e-14)
    np.testing.assert_allclose(energy(f, ops), 2.0, rtol=1e-14)
    np.testing.assert_allclose(np.sum(element_energies(f, ops)), energy(f, ops),
                               rtol=1e-15)


@pytest.mark.parametrize("basis", ALL_BASES)
def test_sine_field_functionals(basis):
    """int sin^2(pi x) over [0, 2] is 1; int sin(pi x) is 0."""
    mesh = Mesh1D(0.0, 2.0, 16)
    ops = build_operators(basis, 15)
    f = init_field(mesh, ops, lambda x: np.sin(np.pi * x))
    np.testing.assert_allclose(energy(f, ops), 1.0, rtol=1e-8)
    assert abs(mass(f, ops)) <= 1e-13


@pytest.mark.parametrize("basis", ALL_BASES)
def test_init_field_reproduces_polynomials(basis):
    """Degree <= p data is represented exactly (sampling or projection)."""
    mesh = Mesh1D(-1.0, 3.0, 4)
    ops = build_operators(basis, 4)
    poly = lambda x: 0.5 * x**3 - x + 0.25
    f = init_field(mesh, ops, poly)
    xi = np.linspace(-1.0, 1.0, 7)
    got = evaluate(f, ops, xi)
    expect = poly(mesh.physical_points(xi))
    np.testing.assert_allclose(got, expect, atol=1e-12)


def test_evaluation_points():
    gauss = build_operators(Basis.GAUSS, 3)
    np.testing.assert_allclose(evaluation_points(gauss), gauss.rule.nodes, atol=0)
    modal = build_operators(Basis.MODAL, 3)
    np.testing.assert_allclose(evaluation_points(modal), gauss.rule.nodes, atol=1e-15)


def test_with_coeffs_replaces_data():
    mesh = Mesh1D(0.0, 1.0, 2)
    ops = build_operators(Basis.GAUSS, 2)
    f = init_field(mesh, ops, np.cos)
    g = f.with_coeffs(np.zeros_like(f.coeffs))
    assert energy(g, ops) == 0.0
    assert f.mesh is g.mesh
