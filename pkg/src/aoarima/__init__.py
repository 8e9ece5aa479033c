"""ARIMA modeling with iterative additive-outlier detection and correction."""

from .diagnostics import (
    ComparisonTable,
    TestResult,
    boxplot_fences,
    chi_square_sf,
    comparison_table,
    ks_normal,
    ljung_box,
)
from .errors import (
    AoArimaError,
    ArityError,
    ConvergenceError,
    CriticalValueWarning,
    DegenerateError,
    DomainError,
    EmptyScanError,
    LengthError,
    NonInvertibleWarning,
    NonStationaryWarning,
    ParseError,
    RankError,
    SingularError,
    StabilityError,
)
from .estimation import (
    ArimaFit,
    ArimaOrder,
    OlsResult,
    PiWeights,
    filter_residuals,
    fit_ar_ols,
    fit_arima,
    fit_arma_css,
    ols,
    pi_weights,
    sigma_hat,
    yule_walker,
)
from .outliers import (
    DetectionConfig,
    DetectionResult,
    OutlierRecord,
    adjust_residuals,
    correct_series,
    detect_iterative,
    joint_refit,
    lambda_stat,
    omega_hat,
    scan,
    tau_squared,
)
from .series import (
    BoxCoxParam,
    TimeSeries,
    acf,
    box_cox,
    difference,
    integrate,
    pacf,
    select_box_cox,
)
from .simulate import DEMO_SEED, InjectionPlan, SimSpec, demo_dataset, inject, simulate

__version__ = "0.1.0"

__all__ = [
    "TimeSeries",
    "BoxCoxParam",
    "difference",
    "integrate",
    "box_cox",
    "select_box_cox",
    "acf",
    "pacf",
    "ArimaOrder",
    "ArimaFit",
    "PiWeights",
    "OlsResult",
    "ols",
    "fit_ar_ols",
    "fit_arma_css",
    "fit_arima",
    "yule_walker",
    "pi_weights",
    "filter_residuals",
    "sigma_hat",
    "DetectionConfig",
    "OutlierRecord",
    "DetectionResult",
    "tau_squared",
    "omega_hat",
    "lambda_stat",
    "scan",
    "adjust_residuals",
    "detect_iterative",
    "correct_series",
    "joint_refit",
    "TestResult",
    "ComparisonTable",
    "ljung_box",
    "ks_normal",
    "boxplot_fences",
    "chi_square_sf",
    "comparison_table",
    "SimSpec",
    "InjectionPlan",
    "simulate",
    "inject",
    "demo_dataset",
    "DEMO_SEED",
    "AoArimaError",
    "LengthError",
    "ArityError",
    "DomainError",
    "DegenerateError",
    "SingularError",
    "RankError",
    "ConvergenceError",
    "StabilityError",
    "EmptyScanError",
    "ParseError",
    "NonStationaryWarning",
    "NonInvertibleWarning",
    "CriticalValueWarning",
]
