"""Symbolic-numeric toolkit for twisting type N Einstein spaces.

The pipeline runs from exact rational series solutions of the reduced
nonlinear ODEs, through Puiseux expansions and weak Painleve analysis, to
numeric integration, Cartan CR invariants, and metric reconstruction.
"""

from .exact_series import (
    g_coefficients,
    g_coefficients_symbolic,
    check_common_factor,
    verify_theorem4,
    j_taylor,
    K_at_origin,
    residual_g,
)
from .puiseux import (
    puiseux_coefficients,
    puiseux_expand,
    regular_chart,
    chart_to_puiseux,
    special_case_closed_form,
)
from .odeform import parse_ode, NAMED_ODES, PEQ_TEXT, JEQ_TEXT, ABEL_TEXT
from .painleve import weak_painleve_verdict, dominant_balances, fuchs_indices
from .numeric_ode import (
    integrate_g,
    sandwich_report,
    asymptotic_fit,
    reparametrize_P_to_J,
    abel_rhs,
    abel_special_solution,
    abel_transform,
    FlatFamilyParams,
    flat_family,
    K_of_solution,
    PhysicalityError,
)
from .cr_invariants import (
    z_jet_of_J,
    c_jet,
    cartan_invariants,
    alpha_sq_flat_formula,
    invariant_profile,
    pde_residuals,
    leroy_nurowski_solution,
    flat_tag_solution,
    series_solution,
    SolutionSpec,
)
from .metric import parse_grid, reconstruct_metric, metric_csv, MetricSample
from .acceptance import run_acceptance, CRITERIA
from .cli import cli_dispatch, main

__version__ = "0.1.0"
