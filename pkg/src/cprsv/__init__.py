"""Correction-procedure (flux reconstruction) discretizations in SBP form
for 1D scalar conservation laws, with energy-stabilizing adaptive
spectral viscosity for explicit Euler time stepping."""

from ._backend import HAVE_COMPILED
from .config import (
    ConfigError,
    ExperimentConfig,
    GaussianIC,
    OutputConfig,
    SinePlusIC,
    StepIC,
    apply_overrides,
    format_config,
    ic_function,
    parse_config,
    preset,
    preset_names,
    validate_config,
)
from .dissipation import (
    DissipationConfig,
    DissipationMode,
    DissipationPipeline,
    EpsilonReport,
    adaptive_epsilon,
    apply_dissipation,
    build_pipeline,
    compute_abc,
    max_stable_dt,
)
from .driver import SimulationResult, run_simulation, select_backend
from .fields import (
    Mesh1D,
    SolutionField,
    energy,
    evaluate,
    init_field,
    mass,
)
from .legendre import (
    ConvergenceError,
    QuadratureKind,
    QuadratureRule,
    a_phi_deriv_expansion,
    gauss_rule,
    legendre,
    legendre_deriv,
    legendre_vandermonde,
    lobatto_rule,
)
from .operators import (
    Basis,
    EigenResult,
    MultiplicationOperator,
    OperatorSet,
    basis_coefficients,
    build_operators,
    check_sbp,
    constant_coefficients,
    dissipation_operator,
    eigen_check,
    expected_eigenvalue,
    m_adjoint,
    multiplication_operator,
    naive_dissipation_operator,
)
from .semidisc import (
    FluxKind,
    ProblemKind,
    advection_rhs,
    burgers_rhs,
    interface_states,
    make_rhs,
    numerical_flux,
)
from .stepping import (
    BlowUpError,
    Integrator,
    StepRecord,
    TimeGrid,
    euler_step,
    ssprk33_step,
)

__version__ = "0.1.0"
