"""End-to-end acceptance checks.

Each test here states one quantitative promise of the package, at the
tolerance it is promised.  The one xfail is deliberate and documented on
the test: the closed-form value sometimes quoted for the Lobatto
top-mode eigenvalue is refuted by direct computation (the mode is
annihilated), and the library reports the true value 0.
"""

from __future__ import annotations

import dataclasses
import filecmp
import math
import time

import numpy as np
import numpy.polynomial.legendre as npleg
import pytest

from cprsv import (
    Basis,
    DissipationConfig,
    DissipationMode,
    FluxKind,
    Mesh1D,
    OutputConfig,
    ProblemKind,
    SinePlusIC,
    SolutionField,
    TimeGrid,
    build_operators,
    build_pipeline,
    check_sbp,
    eigen_check,
    format_config,
    init_field,
    legendre,
    legendre_deriv,
    legendre_vandermonde,
    lobatto_rule,
    make_rhs,
    multiplication_operator,
    naive_dissipation_operator,
    preset,
    run_simulation,
)
from cprsv.cli import EXIT_OK, main
from cprsv.config import ExperimentConfig, GaussianIC
from cprsv.operators import basis_coefficients
from cprsv.semidisc import advection_rhs

ALL_BASES = [Basis.GAUSS, Basis.LOBATTO, Basis.MODAL]
A_COEFFS = (1.0, 0.0, -1.0)


# --------------------------------------------------------------- operators


def test_sbp_identity_within_tolerance_under_one_second():
    """M D + D^T M = R^T B R to 1e-12 for every basis at p = 1..16,
    built from scratch in under a second."""
    t0 = time.monotonic()
    worst = 0.0
    for basis in ALL_BASES:
        for p in range(1, 17):
            worst = max(worst, check_sbp(build_operators(basis, p)))
    elapsed = time.monotonic() - t0
    assert worst <= 1e-12
    assert elapsed < 1.0


def test_viscous_spectrum_matches_prediction():
    """Rayleigh quotients of -A on the Legendre modes match the library's
    predicted eigenvalues to 1e-10 relative for p = 1..16: -n(n+1) for
    every exactly-integrated mode, and 0 for the annihilated Lobatto top
    mode."""
    for basis in ALL_BASES:
        for p in range(1, 17):
            ops = build_operators(basis, p)
            mul = multiplication_operator(ops, A_COEFFS)
            for r in eigen_check(ops, mul):
                if r.expected == 0.0:
                    assert abs(r.value) <= 1e-10, (basis, p, r.n)
                else:
                    assert abs(r.value - r.expected) <= 1e-10 * abs(r.expected), (
                        basis,
                        p,
                        r.n,
                    )


@pytest.mark.xfail(
    strict=True,
    reason=(
        "the closed form -p(p^2-1)/(2p+1) for the Lobatto top-mode eigenvalue "
        "is refuted by direct computation: the interior Lobatto nodes are the "
        "zeros of phi_p' and the endpoints zero a(x) = 1 - x^2, so A phi_p = 0 "
        "identically and the eigenvalue is exactly 0 for every p"
    ),
)
def test_lobatto_top_mode_closed_form_value():
    for p in range(2, 17):
        ops = build_operators(Basis.LOBATTO, p)
        mul = multiplication_operator(ops, A_COEFFS)
        top = eigen_check(ops, mul)[p]
        predicted = -p * (p * p - 1) / (2 * p + 1)
        assert abs(top.value - predicted) <= 1e-10 * abs(predicted), p


def test_legendre_norm_and_expansion_identities():
    """Closed forms used by the spectrum analysis, checked to 1e-12 over
    20 degrees: the Lobatto quadrature norm of phi_p is 2/p (not the exact
    2/(2p+1)); phi_{p-1} is integrated exactly to 2/(2p-1); the expansion
    (1-x^2) phi_p' = c (phi_{p-1} - phi_{p+1}) with c = p(p+1)/(2p+1); and
    the leading coefficient of phi_n is (2n)! / (2^n (n!)^2)."""
    rng = np.random.default_rng(1234)
    for p in range(1, 21):
        rule = lobatto_rule(p)
        q_phi_p = float(np.sum(rule.weights * legendre(p, rule.nodes) ** 2))
        np.testing.assert_allclose(q_phi_p, 2.0 / p, rtol=1e-12)
        q_phi_pm1 = float(np.sum(rule.weights * legendre(p - 1, rule.nodes) ** 2))
        np.testing.assert_allclose(q_phi_pm1, 2.0 / (2.0 * p - 1.0), rtol=1e-12)

        c = p * (p + 1) / (2.0 * p + 1.0)
        x = rng.uniform(-1.0, 1.0, size=20)
        lhs = (1.0 - x**2) * legendre_deriv(p, x)
        rhs = c * (legendre(p - 1, x) - legendre(p + 1, x))
        np.testing.assert_allclose(lhs, rhs, rtol=0, atol=1e-12)

        lead = math.factorial(2 * p) / (2.0**p * math.factorial(p) ** 2)
        e = np.zeros(p + 1)
        e[p] = 1.0
        np.testing.assert_allclose(npleg.leg2poly(e)[-1], lead, rtol=1e-12)


# ------------------------------------------------------------ conservation


def _mass_scale(cfg, m0, e0):
    return max(abs(m0), math.sqrt(e0 * (cfg.x_max - cfg.x_min)), 1e-30)


def _conservation_case(problem):
    if problem is ProblemKind.ADVECTION:
        return ExperimentConfig(
            problem=ProblemKind.ADVECTION,
            basis=Basis.GAUSS,
            p=7,
            n_elements=8,
            x_min=0.0,
            x_max=2.0,
            initial=GaussianIC(1.0, 20.0),
            flux=FluxKind.CENTRAL,
            time=TimeGrid(1.0, 10_000),
            output=OutputConfig(snapshot_times=()),
        )
    return ExperimentConfig(
        problem=ProblemKind.BURGERS,
        basis=Basis.GAUSS,
        p=15,
        n_elements=16,
        x_min=0.0,
        x_max=2.0,
        initial=SinePlusIC(0.01),
        flux=FluxKind.LLF,
        time=TimeGrid(2.0, 10_000),
        output=OutputConfig(snapshot_times=()),
    )


@pytest.mark.parametrize("problem", [ProblemKind.ADVECTION, ProblemKind.BURGERS])
@pytest.mark.parametrize("mode", [DissipationMode.OFF, DissipationMode.FIXED,
                                  DissipationMode.ADAPTIVE])
def test_mass_conserved_per_step_and_over_long_runs(problem, mode):
    """Total mass moves by <= 1e-12 (relative) per step and drifts by
    <= 1e-10 (relative) over 10^4 steps, for every dissipation mode."""
    cfg = _conservation_case(problem)
    if mode is not DissipationMode.OFF:
        eps = 5e-3 if mode is DissipationMode.FIXED else 0.0
        cfg = dataclasses.replace(cfg, dissipation=DissipationConfig(mode, 1, eps))
    res = run_simulation(cfg, write_outputs=False)
    masses = np.array([r.mass for r in res.records])
    scale = _mass_scale(cfg, masses[0], res.records[0].energy)
    assert np.max(np.abs(np.diff(masses))) <= 1e-12 * scale
    assert abs(masses[-1] - masses[0]) <= 1e-10 * scale


# ---------------------------------------------------------- energy identity


@pytest.mark.parametrize("problem,flux", [(ProblemKind.ADVECTION, FluxKind.CENTRAL),
                                          (ProblemKind.BURGERS, FluxKind.LLF)])
@pytest.mark.parametrize("order", [1, 2, 3])
def test_energy_identity_restored_per_element(problem, flux, order):
    """With the adaptive strength, one Euler step satisfies the per-element
    energy identity |u+|^2 - |u|^2 = 2 dt <u, du/dt>_M to 1e-11 |u|^2
    wherever the selector is not clamped."""
    mesh = Mesh1D(0.0, 2.0, 8)
    ops = build_operators(Basis.GAUSS, 7)
    rng = np.random.default_rng(900 + order)
    f = init_field(mesh, ops, lambda x: np.sin(np.pi * x) + 0.1)
    f = f.with_coeffs(f.coeffs + 0.05 * rng.standard_normal(f.coeffs.shape))
    pipe = build_pipeline(DissipationConfig(DissipationMode.ADAPTIVE, order), ops)
    dudt = make_rhs(problem, ops, flux)(f).coeffs
    dt = 1e-4
    res = pipe.apply(f.coeffs, dudt, dt)
    m = ops.m_diag
    u_new = f.coeffs + dt * res.corrected
    gain = np.einsum("ik,k,ik->i", u_new, m, u_new) - np.einsum(
        "ik,k,ik->i", f.coeffs, m, f.coeffs
    )
    target = 2.0 * dt * np.einsum("ik,k,ik->i", f.coeffs, m, dudt)
    norms = np.einsum("ik,k,ik->i", f.coeffs, m, f.coeffs)
    checked = 0
    for i in range(f.coeffs.shape[0]):
        if not res.clamped[i]:
            assert abs(gain[i] - target[i]) <= 1e-11 * norms[i]
            checked += 1
    assert checked > 0


# ------------------------------------------------------- long-run stability


def _advection_energy_case(mode, order):
    diss = (
        DissipationConfig(DissipationMode.ADAPTIVE, order)
        if mode is DissipationMode.ADAPTIVE
        else DissipationConfig()
    )
    return ExperimentConfig(
        problem=ProblemKind.ADVECTION,
        basis=Basis.GAUSS,
        p=7,
        n_elements=8,
        x_min=0.0,
        x_max=2.0,
        initial=GaussianIC(1.0, 20.0),
        flux=FluxKind.CENTRAL,
        time=TimeGrid(1.0, 12_000),
        dissipation=diss,
        output=OutputConfig(snapshot_times=()),
    )


def test_adaptive_strength_prevents_advection_energy_growth():
    """Central-flux advection under plain Euler grows energy; with the
    adaptive strength at orders 1, 2, 3 the final energy stays within
    1 + 1e-9 of the initial energy.  The four 12000-step runs finish in
    under two minutes."""
    t0 = time.monotonic()
    off = run_simulation(_advection_energy_case(DissipationMode.OFF, 1),
                         write_outputs=False)
    e0 = off.records[0].energy
    assert off.records[-1].energy > e0

    for order in (1, 2, 3):
        res = run_simulation(
            _advection_energy_case(DissipationMode.ADAPTIVE, order),
            write_outputs=False,
        )
        assert res.records[0].energy == pytest.approx(e0, rel=1e-15)
        assert res.records[-1].energy <= e0 * (1.0 + 1e-9), order
    assert time.monotonic() - t0 < 120.0


def _burgers_shock_case(diss):
    return ExperimentConfig(
        problem=ProblemKind.BURGERS,
        basis=Basis.GAUSS,
        p=15,
        n_elements=16,
        x_min=0.0,
        x_max=1.0,
        initial=SinePlusIC(0.01),
        flux=FluxKind.LLF,
        time=TimeGrid(0.5, 5_000),
        dissipation=diss,
        output=OutputConfig(snapshot_times=()),
    )


def test_adaptive_strength_survives_burgers_shock():
    """sin(pi x) + 0.01 on [0, 1] steepens into a shock at t* = 1/pi.  All
    three dissipation modes complete 5000 Euler steps through the
    formation.  Without dissipation the energy peaks at formation and
    shows a clear net decrease afterwards (per-step monotonicity is not
    attainable for plain Euler, whose anti-dissipation briefly outpaces
    the interface dissipation while the shock crosses element faces).
    The stabilized runs end no higher than the unstabilized one."""
    off = run_simulation(_burgers_shock_case(DissipationConfig()),
                         write_outputs=False)
    energies = np.array([r.energy for r in off.records])
    assert len(energies) == 5_001  # completed
    k_peak = int(np.argmax(energies))
    t_peak = off.records[k_peak].time
    assert 0.25 < t_peak < 0.40  # peak sits at shock formation
    assert energies[-1] <= 0.999 * energies[k_peak]  # net post-formation decrease

    fixed = run_simulation(
        _burgers_shock_case(DissipationConfig(DissipationMode.FIXED, 1, 5e-3)),
        write_outputs=False,
    )
    assert len(fixed.records) == 5_001
    assert fixed.records[-1].energy <= energies[-1] + 1e-8

    adaptive = run_simulation(
        _burgers_shock_case(DissipationConfig(DissipationMode.ADAPTIVE, 1)),
        write_outputs=False,
    )
    assert len(adaptive.records) == 5_001
    assert adaptive.records[-1].energy <= energies[-1] + 1e-8


# ------------------------------------------------------------- naive form


def test_naive_viscous_form_defect():
    """-(D a D) conserves mass on Lobatto nodes (defect <= 1e-12 for
    p = 1..16) but loses mass on Gauss nodes: at p = 4 the defect on
    phi_4 exceeds 1e-6."""
    for p in range(1, 17):
        ops = build_operators(Basis.LOBATTO, p)
        mul = multiplication_operator(ops, A_COEFFS)
        a_naive = naive_dissipation_operator(ops, mul, 1)
        m = ops.m_diag
        for n in range(p + 1):
            u = basis_coefficients(ops, n)
            assert abs(float(np.ones(p + 1) @ (m * (a_naive @ u)))) <= 1e-12

    ops = build_operators(Basis.GAUSS, 4)
    mul = multiplication_operator(ops, A_COEFFS)
    a_naive = naive_dissipation_operator(ops, mul, 1)
    u = basis_coefficients(ops, 4)
    defect = abs(float(np.ones(5) @ (ops.m_diag * (a_naive @ u))))
    assert defect > 1e-6


# ------------------------------------------------------- modal equivalence


@pytest.mark.parametrize("p", range(1, 11))
def test_modal_nodal_rhs_equivalence(p):
    """The Gauss-nodal advection rhs equals the modal rhs conjugated by the
    Vandermonde transform, to 1e-11, for p = 1..10."""
    mesh = Mesh1D(0.0, 2.0, 4)
    nodal = build_operators(Basis.GAUSS, p)
    modal = build_operators(Basis.MODAL, p)
    v = legendre_vandermonde(p, nodal.rule.nodes)
    rng = np.random.default_rng(7000 + p)
    modal_coeffs = rng.standard_normal((4, p + 1)) / (1.0 + np.arange(p + 1))
    fm = SolutionField(mesh, Basis.MODAL, p, modal_coeffs)
    fn = SolutionField(mesh, Basis.GAUSS, p, modal_coeffs @ v.T)
    for flux in (FluxKind.CENTRAL, FluxKind.UPWIND):
        rm = advection_rhs(fm, modal, flux).coeffs @ v.T
        rn = advection_rhs(fn, nodal, flux).coeffs
        scale = float(np.max(np.abs(rn))) + 1.0
        np.testing.assert_allclose(rn, rm, rtol=0, atol=1e-11 * scale)


# ------------------------------------------------------------- determinism


# dt-preserving truncations: same time step as the production preset, a
# shorter horizon, and snapshot times inside it (shrinking only the step
# count would inflate dt past the stable range of the unstabilized runs)
_TRUNCATED = {
    "advection-smooth": (1.0, 12_000, (0.0, 1.0)),
    "advection-step": (0.8, 10_000, (0.0, 0.8)),
    "burgers-sine": (0.6, 3_000, (0.0, 0.31, 0.6)),
}


@pytest.mark.parametrize("name", sorted(_TRUNCATED))
def test_csv_outputs_deterministic(name, tmp_path):
    """Two CLI runs of the same preset configuration produce byte-identical
    CSV files (energy history and snapshots)."""
    t_final, steps, snaps = _TRUNCATED[name]
    base = preset(name)
    assert base.time.dt == pytest.approx(t_final / steps, rel=1e-12)
    dirs = []
    for tag in ("a", "b"):
        outdir = tmp_path / tag
        cfg = dataclasses.replace(
            base,
            time=TimeGrid(t_final, steps),
            output=dataclasses.replace(
                base.output, directory=str(outdir), snapshot_times=snaps
            ),
        )
        cfgfile = tmp_path / f"{name}-{tag}.cfg"
        cfgfile.write_text(format_config(cfg), encoding="utf-8")
        assert main(["run", "--config", str(cfgfile)]) == EXIT_OK
        dirs.append(outdir)

    files_a = sorted(f.name for f in dirs[0].iterdir())
    files_b = sorted(f.name for f in dirs[1].iterdir())
    assert files_a == files_b and len(files_a) == 1 + len(snaps)
    for fname in files_a:
        assert filecmp.cmp(dirs[0] / fname, dirs[1] / fname, shallow=False), fname
