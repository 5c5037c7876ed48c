"""uncertlab: spectral + symbolic verification lab for 3D time/energy operators."""

from .backend import backend_name, use
from .grids import GridSpec, build_grid
from .states import (
    ComplianceReport,
    StateSpec,
    WaveFunction,
    domain_compliance,
    inner_product,
    synthesize_state,
    transform,
)
from .operators import (
    AbsPPow,
    Compose,
    DiagMomentum,
    DiagPosition,
    Energy,
    FreeHamiltonian,
    Momentum,
    OpSum,
    Position,
    Scale,
    Time,
    apply,
    build,
    commutator_apply,
    compose,
    op_sum,
)
from .ncalg import (
    Coefficient,
    NCMonomial,
    NCPoly,
    build_paper_ops,
    commutator,
    hbar_over_i,
    nc_mul,
    sum_over_axes,
)
from .dsl import ParseError, compile_ast, format_ast, lower, parse, poly_to_ast, render_poly
from .stats import (
    ExpectationResult,
    ResidualCheck,
    UncertaintyResult,
    expectation,
    residual,
    uncertainty_check,
)
from .evolution import (
    AsymptoticsRow,
    ScanResult,
    asymptotic_scan,
    closed_form_velocity,
    energy_sq_expectation,
    energy_sq_residual,
    propagate_free,
    velocity_residual,
)
from .harness import CheckReport, ConfigError, RunConfig, run_suite

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
