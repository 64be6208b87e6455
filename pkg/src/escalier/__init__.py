"""Globally optimal step-function (escalier) fits in L2 on a finite interval."""

from .brute import BudgetExceeded, brute_force_fit, brute_force_fit_parallel
from .critical import (
    CriticalZone,
    criticality,
    full_recurrence_residuals,
    lipschitz_skip,
    scan_critical_zones,
    terminal_residual,
)
from .functions import (
    Interval,
    TargetFunction,
    from_callable,
    mean_value,
    quadrature_mean,
    random_step_function,
    zoo_lookup,
)
from .linear import (
    FitResult,
    Partition,
    SinglePairGram,
    ess_quadratic_form,
    evaluate_escalier,
    fit_fixed_knots,
    gram_build,
)
from .solver import SolverConfig, build_ess, escalier_fit, escalier_fit_parallel, get_tail

__version__ = "0.1.0"
