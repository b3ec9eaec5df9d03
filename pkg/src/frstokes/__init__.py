"""Spectral solvers for the Rayleigh-Stokes equation with Caputo time memory."""

from .kernel import (
    BoundConstants,
    KernelParams,
    QuadratureConfig,
    bound_constants,
    density_A,
    density_B,
    eval_A,
    eval_A_grid,
    eval_B,
    eval_B_grid,
    eval_dA_dt,
    eval_dB_dt,
    laplace_A_closed_form,
    laplace_B_closed_form,
    laplace_transform_numeric,
    lower_bound_A,
    lower_bound_B,
)
from .oracle import (
    L1Grid,
    caputo_l1,
    caputo_l1_trace,
    l1_weights,
    richardson_extrapolate,
    solve_scalar,
)
from .quadrature import QuadratureNonconvergence, integrate_semiinfinite
from .solvers import (
    ConstantSource,
    GridTooCoarseError,
    KernelAccuracyError,
    PerModeSource,
    ProblemSpec,
    SampledSource,
    SeparableSource,
    SolutionTrace,
    SolverError,
    ZeroSource,
    coercivity_report,
    convolve_B,
    manufactured_quadratic_source,
    residual,
    solve_auxiliary_W,
    solve_backward,
    solve_forward,
    solve_nonlocal,
    uniform_grid,
)
from .spectral import (
    AliasingWarning,
    CoefficientField,
    SpectralOperator,
    apply_A,
    basis_field,
    dirichlet_laplacian_1d,
    explicit_spectrum,
    field_from_coefficients,
    load_field_csv,
    norm_tau,
    project,
    synthesize,
    tail_indicator,
)

__version__ = "0.1.0"
