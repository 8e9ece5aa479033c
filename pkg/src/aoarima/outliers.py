"""Additive-outlier magnitude estimation, testing, and iterative correction.

An additive outlier perturbs a single observation: the observed value at
time T is the clean value plus an unknown magnitude. After filtering the
series through the model's autoregressive representation, that single
bump leaves a known signature in the residuals: +1 at T followed by
-pi_1, -pi_2, ... at the later positions. Every operation in this module
is least-squares algebra against that signature column:

* ``omega_hat``   -- magnitude estimate: signature-weighted residual sum
                     divided by the squared signature norm,
* ``tau_squared`` -- the squared signature norm itself,
* ``lambda_stat`` -- the standardized test statistic tau * omega / sigma,
* ``scan``        -- position with the largest absolute statistic,
* ``adjust_residuals`` -- removes a detected signature from the residuals,
* ``detect_iterative`` -- the scan/test/adjust loop with audit trail,
* ``correct_series``   -- subtracts detected magnitudes from the data,
* ``joint_refit``      -- re-estimates AR coefficients and magnitudes in
                          one regression with indicator columns.

Positions handed to the low-level operations (``T`` in ``tau_squared``,
``omega_hat``, ``adjust_residuals``, the scan result) are 1-based
positions within the residual series. ``detect_iterative`` converts scan
positions to index labels of the input series, so the records it returns
use the same labels as the data (with the default start index of 1 and
no differencing the two coincide).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np

from .errors import CriticalValueWarning, DomainError, EmptyScanError, RankError
from .estimation import (
    ArimaFit,
    OlsResult,
    PiWeights,
    fit_arima,
    filter_residuals,
    ols,
    pi_weights,
)
from .series import TimeSeries

__all__ = [
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
]


@dataclass(frozen=True)
class DetectionConfig:
    """Knobs of the iterative detection loop.

    ``critical_value`` is the threshold on the absolute standardized
    statistic; values outside the customary [2, 6] band are accepted but
    draw a warning. ``scan_margin`` positions are excluded at the start
    of the scan window (defaults to the AR order when left as None); the
    window always extends to the final observation, where detections are
    reported as low-confidence edge hits rather than suppressed.
    """

    critical_value: float = 3.0
    max_outliers: int = 10
    max_iterations: int = 20
    refit_each_iteration: bool = False
    scan_margin: int | None = None

    def __post_init__(self):
        if not (self.critical_value > 0.0) or not math.isfinite(self.critical_value):
            raise ValueError("critical_value must be a positive finite number")
        if not 2.0 <= self.critical_value <= 6.0:
            warnings.warn(
                f"critical value {self.critical_value} is outside the customary [2, 6] range",
                CriticalValueWarning,
                stacklevel=2,
            )
        if self.max_outliers < 1 or self.max_iterations < 1:
            raise ValueError("max_outliers and max_iterations must be positive")
        if self.scan_margin is not None and self.scan_margin < 0:
            raise ValueError("scan_margin must be non-negative")


@dataclass(frozen=True)
class OutlierRecord:
    """One detected additive outlier.

    ``T`` is the index label in the input series; ``omega_hat`` the
    estimated magnitude in series units; ``lambda_hat`` the standardized
    statistic at acceptance; ``iteration`` the loop pass that first found
    this position; ``tau2`` the squared signature norm there. When a
    position is re-detected on later passes the magnitudes are summed
    into the existing record (the adjustment is linear) and the other
    fields keep their first-detection values.
    """

    T: int
    omega_hat: float
    lambda_hat: float
    iteration: int
    tau2: float


@dataclass(frozen=True)
class DetectionResult:
    """Audit trail of one detection run."""

    outliers: tuple
    sigma_trail: tuple
    mse_trail: tuple
    corrected_series: TimeSeries
    final_fit: ArimaFit | OlsResult
    iterations_run: int
    terminated_by: str  # no_candidate | max_outliers | max_iterations


def _signature_kernel(pi: PiWeights) -> np.ndarray:
    """[1, -pi_1, ..., -pi_K] with exact trailing zeros dropped."""
    w = pi.weights
    nz = np.flatnonzero(w)
    k = int(nz[-1]) + 1 if nz.size else 0
    return np.concatenate([[1.0], -w[:k]])


def _stats_all_positions(e: np.ndarray, pi: PiWeights) -> tuple[np.ndarray, np.ndarray]:
    """Numerators and squared norms of the signature regression at every position.

    Returns (num, tau2) arrays of length n where, for 0-based position s,
    num[s] = e[s] - sum_j pi_j e[s+j] and tau2[s] = 1 + sum_j pi_j^2,
    both truncated at min(n - s - 1, m) trailing terms.
    """
    n = e.size
    kern = _signature_kernel(pi)
    k = kern.size - 1
    if k > 0:
        padded = np.concatenate([e, np.zeros(k)])
        num = np.correlate(padded, kern, mode="valid")[:n]
    else:
        num = e.copy()
    w = pi.weights
    cum = np.concatenate([[0.0], np.cumsum(w * w)])
    qlen = np.minimum(n - 1 - np.arange(n), pi.m)
    tau2 = 1.0 + cum[qlen]
    return num, tau2


def tau_squared(pi: PiWeights, n: int, T: int) -> float:
    """Squared norm of the outlier signature at position T of an n-long series."""
    if T < 1 or T > n:
        raise IndexError(f"position {T} outside [1, {n}]")
    upto = min(n - T, pi.m)
    w = pi.weights[:upto]
    return 1.0 + float(w @ w)


def omega_hat(e: TimeSeries, pi: PiWeights, T: int) -> float:
    """Least-squares magnitude of an additive outlier at position T.

    Equals the coefficient of regressing the residuals on the signature
    column (+1 at T, -pi_j at T+j): the signature-weighted sum of the
    residuals divided by the squared signature norm.
    """
    n = e.n
    if T < 1 or T > n:
        raise IndexError(f"position {T} outside [1, {n}]")
    v = e.values
    upto = min(n - T, pi.m)
    w = pi.weights[:upto]
    num = float(v[T - 1]) - float(w @ v[T:T + upto])
    return num / (1.0 + float(w @ w))


def lambda_stat(omega: float, tau2: float, sigma: float) -> float:
    """Standardized statistic tau * omega / sigma; ~N(0,1) under no outlier."""
    if sigma <= 0.0:
        raise DomainError("sigma must be positive")
    if tau2 < 1.0:
        raise DomainError("tau2 cannot be below 1 (the signature includes a unit spike)")
    return math.sqrt(tau2) * omega / sigma


def scan(e: TimeSeries, pi: PiWeights, sigma: float, margin: int = 0,
         end_margin: int | None = None) -> tuple[int, float, float]:
    """Position with the largest absolute standardized statistic.

    Scans positions ``1 + margin .. n - end_margin`` (``end_margin``
    defaults to ``margin``); ties break toward the smallest position.
    Returns ``(T, omega, lambda)``.
    """
    if sigma <= 0.0:
        raise DomainError("sigma must be positive")
    if end_margin is None:
        end_margin = margin
    if margin < 0 or end_margin < 0:
        raise ValueError("margins must be non-negative")
    n = e.n
    lo = margin  # 0-based first scannable
    hi = n - end_margin  # 0-based exclusive end
    if hi - lo < 3:
        raise EmptyScanError(
            f"scan window [{lo + 1}, {hi}] has {max(hi - lo, 0)} positions; need at least 3"
        )
    num, tau2 = _stats_all_positions(e.values, pi)
    lam = num / (np.sqrt(tau2) * sigma)
    window = np.abs(lam[lo:hi])
    s = lo + int(np.argmax(window))
    return s + 1, float(num[s] / tau2[s]), float(lam[s])


def adjust_residuals(e: TimeSeries, omega: float, pi: PiWeights, T: int) -> TimeSeries:
    """Remove an outlier signature of the given magnitude from the residuals.

    Subtracts omega at T and adds omega * pi_j at T + j; positions before
    T are untouched. Afterwards the magnitude estimate at T is exactly
    zero (the residual of its own projection).
    """
    n = e.n
    if T < 1 or T > n:
        raise IndexError(f"position {T} outside [1, {n}]")
    kern = _signature_kernel(pi)
    out = e.values.copy()
    avail = min(kern.size, n - T + 1)
    out[T - 1:T - 1 + avail] -= omega * kern[:avail]
    return TimeSeries(out, start_index=e.start_index)


def correct_series(series: TimeSeries, outliers) -> TimeSeries:
    """Subtract each detected magnitude at its index label."""
    out = series.values.copy()
    for rec in outliers:
        out[series.position_of(rec.T)] -= rec.omega_hat
    return TimeSeries(out, start_index=series.start_index)


def joint_refit(series: TimeSeries, outlier_times, p: int, with_intercept: bool = True) -> OlsResult:
    """One regression of the series on its own lags plus outlier indicators.

    Indicator j is 1 only at index label ``outlier_times[j]``, so the
    final ``len(outlier_times)`` coefficients are refined magnitude
    estimates. Coincident indicator times are rejected.
    """
    times = list(outlier_times)
    if len(set(times)) != len(times):
        raise RankError(f"indicator times must be distinct, got {sorted(times)}")
    x = series.values
    n = series.n
    rows = n - p
    cols = []
    if with_intercept:
        cols.append(np.ones(rows))
    for i in range(1, p + 1):
        cols.append(x[p - i:n - i])
    row_labels = np.arange(series.start_index + p, series.start_index + n)
    for t in times:
        cols.append((row_labels == t).astype(float))
    X = np.column_stack(cols)
    return ols(X, x[p:])


def detect_iterative(series: TimeSeries, fit: ArimaFit, config: DetectionConfig | None = None) -> DetectionResult:
    """Iteratively detect, test, and remove additive outliers.

    Each pass estimates the innovation scale from the current residuals,
    scans for the position with the largest absolute statistic, and, if
    it clears the critical value, records it and strips its signature
    from the residuals. The filter weights stay fixed at the initial
    fit's values unless ``refit_each_iteration`` asks for a re-estimated
    model after every hit (a departure from the fixed-weight scheme,
    provided for convenience). The loop stops when no candidate clears
    the threshold or a configured limit is reached.

    Afterwards the corrected series is produced and a final model is
    estimated: for pure AR models without differencing, a joint
    lags-plus-indicators regression (whose mean squared errors across
    0..k indicators form ``mse_trail``); otherwise a fresh fit on the
    corrected series (``mse_trail`` then holds the before/after pair).

    The intercept convention of ``fit`` is carried through: a zero
    intercept is treated as an intercept-free model.
    """
    if config is None:
        config = DetectionConfig()
    n = series.n
    cap = max(1, n // 5)
    if config.max_outliers > cap:
        raise DomainError(
            f"max_outliers {config.max_outliers} exceeds n/5 = {cap}; lower it to avoid overfitting"
        )
    with_intercept = fit.intercept != 0.0
    current_fit = fit
    d = fit.order.d
    n_e = n - d
    if n_e < 4:
        raise EmptyScanError("series too short to scan after differencing")
    margin = config.scan_margin if config.scan_margin is not None else fit.order.p
    label_offset = series.start_index - 1 + d  # scan position -> index label

    pi = pi_weights(current_fit, n_e - 1)
    e = filter_residuals(series, current_fit)

    records: list[OutlierRecord] = []
    by_label: dict[int, int] = {}
    sigma_trail: list[float] = []
    terminated = None
    iterations = 0

    while iterations < config.max_iterations:
        sig2 = float(e.values @ e.values) / e.n
        if sig2 <= 0.0:
            terminated = "no_candidate"
            break
        iterations += 1
        sigma = math.sqrt(sig2)
        sigma_trail.append(sigma)
        pos, omega, lam = scan(e, pi, sigma, margin=margin, end_margin=0)
        if abs(lam) <= config.critical_value:
            terminated = "no_candidate"
            break
        label = pos + label_offset
        if label in by_label:
            idx = by_label[label]
            records[idx] = replace(records[idx], omega_hat=records[idx].omega_hat + omega)
        else:
            by_label[label] = len(records)
            records.append(
                OutlierRecord(
                    T=label,
                    omega_hat=omega,
                    lambda_hat=lam,
                    iteration=iterations,
                    tau2=tau_squared(pi, e.n, pos),
                )
            )
        if config.refit_each_iteration:
            corrected_now = correct_series(series, records)
            current_fit = fit_arima(corrected_now, fit.order, with_intercept)
            pi = pi_weights(current_fit, n_e - 1)
            e = filter_residuals(series, current_fit)
            for rec in records:
                e = adjust_residuals(e, rec.omega_hat, pi, rec.T - label_offset)
        else:
            e = adjust_residuals(e, omega, pi, pos)
        if len(records) >= config.max_outliers:
            terminated = "max_outliers"
            break
    if terminated is None:
        terminated = "max_iterations"

    corrected = correct_series(series, records)
    if fit.order.q == 0 and fit.order.d == 0:
        labels = [rec.T for rec in records]
        trail = []
        final: ArimaFit | OlsResult | None = None
        for j in range(len(labels) + 1):
            final = joint_refit(series, labels[:j], fit.order.p, with_intercept)
            trail.append(final.mse)
        mse_trail = tuple(trail)
        final_fit = final
    else:
        final_fit = fit_arima(corrected, fit.order, with_intercept)
        mse_trail = (fit.mse, final_fit.mse)

    return DetectionResult(
        outliers=tuple(records),
        sigma_trail=tuple(sigma_trail),
        mse_trail=mse_trail,
        corrected_series=corrected,
        final_fit=final_fit,
        iterations_run=iterations,
        terminated_by=terminated,
    )
