"""ARIMA parameter estimation and the filtering machinery built on it.

AR models are estimated by ordinary least squares on lagged regressors;
mixed ARMA models by minimizing the conditional sum of squares with a
derivative-free simplex search. Both report two variance estimates that
must not be conflated:

* ``sigma2`` -- mean squared residual with denominator equal to the
  residual count (the innovation-variance convention used by the outlier
  test statistic), and
* ``mse`` -- the usual degree-of-freedom adjusted regression mean square.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np
from scipy import optimize, signal

from .errors import (
    ConvergenceError,
    DegenerateError,
    DomainError,
    LengthError,
    NonInvertibleWarning,
    NonStationaryWarning,
    RankError,
    SingularError,
)
from .series import TimeSeries, acf, difference

__all__ = [
    "ArimaOrder",
    "ArimaFit",
    "PiWeights",
    "OlsResult",
    "ols",
    "fit_ar_ols",
    "yule_walker",
    "fit_arma_css",
    "fit_arima",
    "pi_weights",
    "filter_residuals",
    "sigma_hat",
    "min_ar_root_modulus",
    "min_ma_root_modulus",
]

_ROOT_TOL = 1e-8
_RANK_TOL = 1e-10


@dataclass(frozen=True)
class ArimaOrder:
    """(p, d, q) orders. Differencing beyond d = 2 is rejected."""

    p: int
    d: int = 0
    q: int = 0

    def __post_init__(self):
        if self.p < 0 or self.d < 0 or self.q < 0:
            raise ValueError("orders must be non-negative")
        if self.d > 2:
            raise ValueError("differencing order d > 2 is not supported")


@dataclass(frozen=True)
class OlsResult:
    """Least-squares solution with the usual accounting."""

    coefficients: tuple
    sse: float
    mse: float
    std_errors: tuple
    fitted: np.ndarray
    residuals: np.ndarray
    df_residual: int


@dataclass(frozen=True)
class ArimaFit:
    """A fitted ARIMA model.

    ``phi`` and ``theta`` use the sign convention of the lag polynomials
    1 - phi_1 B - ... and 1 - theta_1 B - ...; ``intercept`` is the
    regression constant (0 when suppressed). ``residuals`` are aligned so
    their start index names the first observation they correspond to.
    """

    order: ArimaOrder
    phi: tuple
    theta: tuple
    intercept: float
    sigma2: float
    residuals: TimeSeries
    coefficient_std_errors: tuple
    sse: float
    mse: float

    @property
    def process_mean(self) -> float:
        """Implied stationary mean intercept / (1 - sum(phi))."""
        denom = 1.0 - sum(self.phi)
        if self.intercept == 0.0:
            return 0.0
        if abs(denom) < 1e-10:
            raise DomainError("process mean undefined: AR coefficients sum to 1")
        return self.intercept / denom


@dataclass(frozen=True)
class PiWeights:
    """Truncated weights of the autoregressive (infinite-order) representation.

    ``weights[j-1]`` is pi_j in pi(B) = 1 - pi_1 B - pi_2 B^2 - ...; the
    implicit pi_0 is 1.
    """

    weights: np.ndarray
    m: int

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.size != self.m:
            raise ValueError("weight count must equal the truncation length m")
        w = w.copy()
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)


def _poly_min_root_modulus(coeffs) -> float:
    """Smallest root modulus of 1 - c_1 z - ... - c_k z^k (inf if degree 0)."""
    c = np.asarray(coeffs, dtype=float)
    # degrees with negligible weight put roots far beyond any unit-circle
    # question and can overflow the companion eigensolve; drop them
    while c.size and abs(c[-1]) < 1e-280:
        c = c[:-1]
    if c.size == 0:
        return math.inf
    poly = np.concatenate([[1.0], -c])  # ascending powers
    roots = np.roots(poly[::-1])
    if roots.size == 0:
        return math.inf
    return float(np.min(np.abs(roots)))


def min_ar_root_modulus(phi) -> float:
    return _poly_min_root_modulus(phi)


def min_ma_root_modulus(theta) -> float:
    return _poly_min_root_modulus(theta)


def _warn_on_roots(phi, theta) -> None:
    if min_ar_root_modulus(phi) <= 1.0 + _ROOT_TOL:
        warnings.warn(
            "AR polynomial has a root on or inside the unit circle; "
            "estimates are at the stationarity boundary",
            NonStationaryWarning,
            stacklevel=3,
        )
    if min_ma_root_modulus(theta) <= 1.0 + _ROOT_TOL:
        warnings.warn(
            "MA polynomial has a root on or inside the unit circle; "
            "estimates are at the invertibility boundary",
            NonInvertibleWarning,
            stacklevel=3,
        )


def ols(X: np.ndarray, y) -> OlsResult:
    """Least squares fit of y on the columns of X.

    Raises :class:`RankError` when the system is underdetermined or the
    design is rank deficient (pivot ratio below 1e-10).
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2:
        raise ValueError("X must be a 2-d matrix")
    rows, cols = X.shape
    if y.shape != (rows,):
        raise ValueError("y length must match the row count of X")
    if rows <= cols:
        raise RankError(f"underdetermined system: {rows} rows for {cols} coefficients")
    q, r = np.linalg.qr(X)
    pivots = np.abs(np.diag(r))
    if pivots.size == 0 or pivots.min() < _RANK_TOL * pivots.max() or pivots.max() == 0.0:
        raise RankError("design matrix is rank deficient")
    beta = np.linalg.solve(r, q.T @ y)
    fitted = X @ beta
    resid = y - fitted
    sse = float(resid @ resid)
    df = rows - cols
    mse = sse / df
    rinv = np.linalg.solve(r, np.eye(cols))
    xtx_inv_diag = np.sum(rinv * rinv, axis=1)
    std = np.sqrt(mse * xtx_inv_diag)
    return OlsResult(
        coefficients=tuple(float(b) for b in beta),
        sse=sse,
        mse=mse,
        std_errors=tuple(float(s) for s in std),
        fitted=fitted,
        residuals=resid,
        df_residual=df,
    )


def _lagged_design(x: np.ndarray, p: int, with_intercept: bool) -> tuple[np.ndarray, np.ndarray]:
    n = x.size
    cols = []
    if with_intercept:
        cols.append(np.ones(n - p))
    for i in range(1, p + 1):
        cols.append(x[p - i:n - i])
    return np.column_stack(cols), x[p:]


def fit_ar_ols(series: TimeSeries, p: int, with_intercept: bool = True) -> ArimaFit:
    """Fit an AR(p) by regressing each value on its p predecessors."""
    if p < 1:
        raise ValueError("p must be at least 1")
    if series.n <= 2 * p + 2:
        raise LengthError(f"need more than {2 * p + 2} observations to fit AR({p})")
    X, y = _lagged_design(series.values, p, with_intercept)
    res = ols(X, y)
    k = 1 if with_intercept else 0
    intercept = res.coefficients[0] if with_intercept else 0.0
    phi = tuple(res.coefficients[k:])
    residuals = TimeSeries(res.residuals, start_index=series.start_index + p)
    sigma2 = res.sse / residuals.n
    _warn_on_roots(phi, ())
    return ArimaFit(
        order=ArimaOrder(p, 0, 0),
        phi=phi,
        theta=(),
        intercept=float(intercept),
        sigma2=float(sigma2),
        residuals=residuals,
        coefficient_std_errors=res.std_errors,
        sse=res.sse,
        mse=res.mse,
    )


def yule_walker(series: TimeSeries, p: int) -> np.ndarray:
    """Order-p Yule-Walker AR coefficients from sample autocorrelations.

    Solved by the Levinson recursion; raises :class:`SingularError` when
    the recursion breaks down.
    """
    if p < 1:
        raise ValueError("p must be at least 1")
    if p >= series.n:
        raise ValueError("p must be smaller than the series length")
    rho = acf(series, p)
    phi = np.array([rho[1]])
    v = 1.0 - rho[1] ** 2
    for k in range(2, p + 1):
        if not np.isfinite(v) or abs(v) < 1e-300:
            raise SingularError(f"Yule-Walker recursion broke down at order {k}")
        num = rho[k] - float(np.dot(phi, rho[k - 1:0:-1]))
        phi_kk = num / v
        nxt = np.empty(k)
        nxt[:-1] = phi - phi_kk * phi[::-1]
        nxt[-1] = phi_kk
        v *= 1.0 - phi_kk ** 2
        phi = nxt
    if not np.all(np.isfinite(phi)):
        raise SingularError("Yule-Walker solution is not finite")
    return phi


def _css_residuals(w: np.ndarray, mean: float, phi: np.ndarray, theta: np.ndarray) -> np.ndarray:
    """Conditional residuals of an ARMA recursion.

    Conditions on the first p observations and sets pre-sample shocks to
    zero, so the output has length len(w) - p.
    """
    p = phi.size
    q = theta.size
    wt = w - mean
    u = wt[p:].copy()
    for i in range(1, p + 1):
        u -= phi[i - 1] * wt[p - i:wt.size - i]
    if q == 0:
        return u
    # a_t = u_t + theta_1 a_{t-1} + ... + theta_q a_{t-q}, zero initial state
    return signal.lfilter([1.0], np.concatenate([[1.0], -theta]), u)


def _css_residuals_from_packed(params: np.ndarray, w: np.ndarray, p: int, q: int,
                               with_intercept: bool) -> np.ndarray:
    k = 1 if with_intercept else 0
    mean = params[0] if with_intercept else 0.0
    phi = params[k:k + p]
    theta = params[k + p:]
    return _css_residuals(w, mean, phi, theta)


def _css_objective(params: np.ndarray, w: np.ndarray, p: int, q: int, with_intercept: bool) -> float:
    a = _css_residuals_from_packed(params, w, p, q, with_intercept)
    sse = float(a @ a)
    return sse if math.isfinite(sse) else math.inf


def _perturbed(start: np.ndarray, r: int) -> np.ndarray:
    """Deterministic +/-10% (or +/-0.05 for zeros) restart perturbation."""
    out = start.copy()
    for i in range(out.size):
        sign = 1.0 if (i + r) % 2 == 0 else -1.0
        if out[i] == 0.0:
            out[i] = sign * 0.05
        else:
            out[i] *= 1.0 + sign * 0.10
    return out


def fit_arma_css(series: TimeSeries, order: ArimaOrder, with_intercept: bool = True) -> ArimaFit:
    """Fit an ARIMA(p, d, q) by conditional sum of squares.

    The d-fold difference is taken first. The objective sums squared
    shocks reconstructed recursively with zero pre-sample shocks,
    conditioning on the first p differenced observations. Minimization
    uses a Nelder-Mead simplex from a Yule-Walker start (zeros for the MA
    part) plus three deterministically perturbed restarts; the best end
    point, or the best start if no run improved on it, is returned.
    """
    p, d, q = order.p, order.d, order.q
    if p + q < 1:
        raise ValueError("need p + q >= 1 to fit a model")
    if series.n <= 3 * (p + q) + 5 + d:
        raise LengthError(f"need more than {3 * (p + q) + 5 + d} observations for this order")
    w = difference(series, d)
    wv = w.values
    mean0 = float(wv.mean()) if with_intercept else 0.0
    if p > 0:
        try:
            phi0 = yule_walker(w, p)
        except (SingularError, DegenerateError):
            phi0 = np.zeros(p)
        if min_ar_root_modulus(phi0) <= 1.0 + 1e-6:
            phi0 = phi0 * 0.95 / np.max(np.abs(phi0))
    else:
        phi0 = np.zeros(0)
    start = np.concatenate([[mean0] if with_intercept else [], phi0, np.zeros(q)])

    args = (wv, p, q, with_intercept)
    maxfev = 500 * (p + q)
    f_start = _css_objective(start, *args)
    f_scale = f_start if math.isfinite(f_start) else 1.0
    candidates = [(f_start, start)]
    for r in range(4):  # base run plus 3 perturbed restarts
        x0 = start if r == 0 else _perturbed(start, r)
        res = optimize.minimize(
            _css_objective,
            x0,
            args=args,
            method="Nelder-Mead",
            options={
                "maxfev": maxfev,
                "xatol": 1e-9,
                "fatol": 1e-10 * max(1.0, f_scale),
            },
        )
        candidates.append((float(res.fun), np.asarray(res.x, dtype=float)))
    best_f, best_x = min(candidates, key=lambda c: c[0])
    if not math.isfinite(best_f):
        raise ConvergenceError("conditional sum of squares did not attain a finite value")

    a = _css_residuals_from_packed(best_x, *args)
    sse = float(a @ a)
    n_res = a.size
    n_par = best_x.size
    if n_res <= n_par:
        raise LengthError("too few residuals for the parameter count")
    mse = sse / (n_res - n_par)
    sigma2 = sse / n_res

    k = 1 if with_intercept else 0
    phi = tuple(float(v) for v in best_x[k:k + p])
    theta = tuple(float(v) for v in best_x[k + p:])
    mean = float(best_x[0]) if with_intercept else 0.0
    intercept = mean * (1.0 - sum(phi)) if with_intercept else 0.0

    std = _css_std_errors(best_x, a, mse, *args)
    residuals = TimeSeries(a, start_index=w.start_index + p)
    _warn_on_roots(phi, theta)
    return ArimaFit(
        order=order,
        phi=phi,
        theta=theta,
        intercept=float(intercept),
        sigma2=float(sigma2),
        residuals=residuals,
        coefficient_std_errors=std,
        sse=sse,
        mse=float(mse),
    )


def _css_std_errors(best_x: np.ndarray, a: np.ndarray, mse: float, wv: np.ndarray,
                    p: int, q: int, with_intercept: bool) -> tuple:
    """Numerical-Jacobian standard errors in the (intercept, phi, theta) space."""
    k = 1 if with_intercept else 0
    phi_sum = float(np.sum(best_x[k:k + p]))

    def residuals_at(coef: np.ndarray) -> np.ndarray:
        packed = coef.copy()
        if with_intercept:
            denom = 1.0 - float(np.sum(coef[k:k + p]))
            packed[0] = coef[0] / denom if abs(denom) > 1e-12 else 0.0
        return _css_residuals_from_packed(packed, wv, p, q, with_intercept)

    coef0 = best_x.copy()
    if with_intercept:
        coef0[0] = best_x[0] * (1.0 - phi_sum)  # report in intercept form
    h = 1e-5
    cols = []
    for j in range(coef0.size):
        cp = coef0.copy()
        cp[j] += h
        cols.append((residuals_at(cp) - a) / h)
    J = np.column_stack(cols)
    try:
        cov = mse * np.linalg.inv(J.T @ J)
        diag = np.clip(np.diag(cov), 0.0, None)
        return tuple(float(s) for s in np.sqrt(diag))
    except np.linalg.LinAlgError:
        return tuple(float("nan") for _ in range(coef0.size))


def fit_arima(series: TimeSeries, order: ArimaOrder, with_intercept: bool = True) -> ArimaFit:
    """Dispatch to the OLS fitter for pure AR orders, otherwise to CSS."""
    if order.q == 0:
        if order.p < 1:
            raise ValueError("need p >= 1 when q = 0")
        w = difference(series, order.d)
        fit = fit_ar_ols(w, order.p, with_intercept)
        return replace(fit, order=order)
    return fit_arma_css(series, order, with_intercept)


def pi_weights(fit: ArimaFit, m: int) -> PiWeights:
    """First m weights of the autoregressive representation of the model.

    Includes the differencing operator: the weights expand
    phi(B) (1-B)^d / theta(B). Computed by the convolution recursion
    pi_k = phistar_k - theta_k + sum_{i<k} theta_i pi_{k-i}, where
    phistar collects the coefficients of phi(B) (1-B)^d.
    """
    if m < 1:
        raise ValueError("m must be at least 1")
    p, d, q = fit.order.p, fit.order.d, fit.order.q
    if q > 0 and min_ma_root_modulus(fit.theta) <= 1.0 + _ROOT_TOL:
        warnings.warn(
            "MA polynomial is not invertible; the weight expansion may diverge",
            NonInvertibleWarning,
            stacklevel=2,
        )
    poly = np.array([1.0] + [-c for c in fit.phi])
    for _ in range(d):
        poly = np.convolve(poly, [1.0, -1.0])
    # poly holds 1 - phistar_1 B - ... - phistar_{p+d} B^{p+d}
    phistar = np.zeros(m + 1)
    upto = min(p + d, m)
    phistar[1:upto + 1] = -poly[1:upto + 1]
    theta = np.zeros(m + 1)
    theta[1:min(q, m) + 1] = fit.theta[:min(q, m)]
    w = np.zeros(m + 1)
    for k in range(1, m + 1):
        acc = phistar[k] - theta[k]
        for i in range(1, min(k - 1, q) + 1):
            acc += theta[i] * w[k - i]
        w[k] = acc
    return PiWeights(weights=w[1:], m=m)


def filter_residuals(series: TimeSeries, fit: ArimaFit) -> TimeSeries:
    """Filter a series into one residual per (differenced) observation.

    The series is differenced per the fitted order, centered at the
    implied process mean, and passed through the truncated autoregressive
    filter of the ARMA part. Early positions t <= p are warm-up values
    computed from the lags available so far; downstream consumers should
    treat them as conditioning values rather than genuine one-step errors.
    """
    w = difference(series, fit.order.d)
    wt = w.values - fit.process_mean
    m = w.n - 1
    if m == 0:
        return TimeSeries(wt, start_index=w.start_index)
    arma_only = replace(fit, order=ArimaOrder(fit.order.p, 0, fit.order.q))
    taps = np.concatenate([[1.0], -pi_weights(arma_only, m).weights])
    e = signal.lfilter(taps, [1.0], wt)
    return TimeSeries(e, start_index=w.start_index)


def sigma_hat(residuals: TimeSeries) -> float:
    """Innovation-variance estimate: mean of squared residuals (denominator n)."""
    v = residuals.values
    return float(v @ v) / v.size
