"""Torsional stability of a fish-bone suspension-bridge model.

Finite-mode Galerkin dynamics of a hinged beam with rotating cross
sections, energy-conserving integration, Hill/Floquet stability of
vertical modes, high-mode negligibility bounds, and instability-onset
experiments, with a CLI front end for reproducible CSV/SVG reports.
"""

from .model import (
    CouplingTable,
    EnergyBreakdown,
    ModalState,
    ModelSpec,
    TorsionVariant,
    coupling_coefficient,
    coupling_table,
    rescale_gamma,
    restoring_force,
    total_energy,
)
from .galerkin import LinearizedTorsion, OdeSystem, build_system, linearize_about_vertical_mode
from .integrator import (
    IntegratorConfig,
    Trajectory,
    TrajectoryStatus,
    integrate,
    max_component_amplitude,
)
from .hill import (
    HillProblem,
    StabilityVerdict,
    VerdictKind,
    VerticalMode,
    amplitude_of,
    floquet_verdict,
    hill_problem,
    lambda_pm,
    mode_energy,
    period,
    period_bounds,
    theoretical_threshold,
    vertical_mode,
    zhukovskii_verdict,
)
from .negligibility import (
    NegligibilityQuery,
    Via,
    gagliardo_check,
    is_negligible,
    max_negligible_energy,
    maxcalc_constants,
    min_negligible_mode,
)
from .experiments import (
    GrowthCriterion,
    InstabilityOutcome,
    ThresholdResult,
    amplitude_scan,
    instability_run,
    scaling_experiment,
    sign_change_census,
    threshold_bisection,
    trig_error_report,
)

__version__ = "0.1.0"
