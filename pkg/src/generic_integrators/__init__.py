"""Structure-preserving integrators for linearly damped GENERIC systems."""

from .core import (
    Cosine,
    Harmonic,
    Potential,
    State,
    SystemParams,
    energy_gradient,
    entropy_gradient,
    friction_factor,
    friction_matrix,
    generic_rhs,
    hamiltonian,
    modified_energy,
    modified_energy_gradient,
    modified_factor,
    modified_friction_factor,
    modified_friction_matrix,
    modified_generic_rhs,
    poisson_matrix,
    total_energy,
)
from .diagnostics import (
    StructureReport,
    SweepResult,
    adg_decay_rate,
    convergence_order,
    dissipation_rate_series,
    dissipation_slope,
    expected_decay_rate,
    fit_slope,
    modified_decay_rate,
    one_step_jacobian,
    poisson_conditions,
    rmse,
    structure_report,
    two_form_decay_residual,
)
from .errors import (
    DegenerateFitError,
    GridMismatchError,
    LengthMismatchError,
    NonFiniteError,
    NotApplicableError,
    OverdampedError,
    TooFewExtremaError,
)
from .integrators import (
    STEPPERS,
    Stepper,
    Trajectory,
    adg_step,
    get_stepper,
    integrate,
    irreversible_flow_exact,
    irreversible_flow_modified,
    mybaby_step,
    rk3_map,
    rk3_step,
    verlet_step,
    ybaby_step,
)
from .reference import (
    NONLINEAR_REFERENCE_H,
    HarmonicAnalytic,
    dho_exact,
    dho_exact_states,
    dho_exact_trajectory,
    nonlinear_reference,
)

__version__ = "0.1.0"
