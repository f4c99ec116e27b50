"""Two-population mean-field Ising model: pressure, critical points and finite-size checks."""

from .critical import (
    Branch,
    CaseLabel,
    CriticalPoint,
    Family,
    Kind,
    classify_case,
    classify_point,
    critical_points,
    enumerate_symmetric,
    find_critical_points_generic,
)
from .errors import (
    CurieWeissDegenerationError,
    DegenerateModelError,
    DomainError,
    ModelError,
    NoPositiveRootError,
    NotCriticalPointError,
    RegimeError,
    ResourceError,
    SolverFailure,
    UnclassifiableDegenerateError,
    UnsupportedCaseError,
)
from .finite import (
    FiniteModel,
    Lemma1Report,
    SectorCount,
    check_lemma1_bounds,
    check_lemma1_range,
    convergence_study,
    exact_pressure,
    sector_counts,
    smallest_lemma1_constant,
)
from .model import (
    Magnetization,
    ModelParams,
    ReducedParams,
    entropy,
    f_gradient,
    f_hessian,
    f_value,
    g_value,
    rescale,
)
from .roots import solve_t_check, solve_x_hat, solve_x_tilde
from .thermo import (
    FieldSelectionReport,
    PressureResult,
    compare_maxima,
    dense_grid_maximum,
    field_selection,
    limit_pressure,
)

__all__ = [
    "solve_t_check",
    "solve_x_hat",
    "solve_x_tilde",
    "Branch",
    "CaseLabel",
    "CriticalPoint",
    "Family",
    "Kind",
    "classify_case",
    "classify_point",
    "critical_points",
    "enumerate_symmetric",
    "find_critical_points_generic",
    "CurieWeissDegenerationError",
    "DegenerateModelError",
    "DomainError",
    "ModelError",
    "NoPositiveRootError",
    "NotCriticalPointError",
    "RegimeError",
    "ResourceError",
    "SolverFailure",
    "UnclassifiableDegenerateError",
    "UnsupportedCaseError",
    "FiniteModel",
    "Lemma1Report",
    "SectorCount",
    "check_lemma1_bounds",
    "check_lemma1_range",
    "convergence_study",
    "exact_pressure",
    "sector_counts",
    "smallest_lemma1_constant",
    "Magnetization",
    "ModelParams",
    "ReducedParams",
    "entropy",
    "f_gradient",
    "f_hessian",
    "f_value",
    "g_value",
    "rescale",
    "FieldSelectionReport",
    "PressureResult",
    "compare_maxima",
    "dense_grid_maximum",
    "field_selection",
    "limit_pressure",
]
