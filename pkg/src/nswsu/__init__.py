"""1D compressible Navier-Stokes with degenerate viscosity: u- and v-formulation
solvers and a numerical weak-strong stability certificate."""

__version__ = "0.1.0"

from .core import (
    Boundary,
    FluidParams,
    Formulation,
    Grid1D,
    StateU,
    StateV,
    TimeControls,
    Trajectory,
    discrete_norm,
    make_grid,
    total_mass,
)
from .diagnostics import (
    EnergyReport,
    StabilityReport,
    dissipation,
    energy_u,
    energy_v,
    gronwall_rate,
    rel_entropy_F,
    rel_entropy_total,
    wsu_check,
)
from .errors import (
    BudgetError,
    ConfigError,
    DomainError,
    InvalidArgumentError,
    NumericalFailure,
    StepFailure,
    UnsupportedRegimeError,
)
from .scenarios import (
    AdmissibilityReport,
    check_admissibility,
    fine_grid_oracle,
    make_scenario,
    mms_convergence,
    mms_fields,
    mms_sources,
)
from .solver import Scenario, simulate, stable_dt, step_u, step_v
from .transform import phi, pressure, to_effective, to_primitive, viscosity
