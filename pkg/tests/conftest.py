"""Shared helpers: synthetic fits and independent oracles.

The solvers here are deliberately written from scratch (no numpy.linalg)
so tests can cross-check the library's linear algebra against an
unrelated code path.
"""

import numpy as np
import pytest
from hypothesis import settings

from aoarima import ArimaFit, ArimaOrder, TimeSeries

# keep property tests reproducible run to run
settings.register_profile("repo", derandomize=True)
settings.load_profile("repo")


def make_fit(phi=(), theta=(), d=0, intercept=0.0, sigma2=1.0):
    """An ArimaFit carrying given coefficients, for weight and filter tests."""
    return ArimaFit(
        order=ArimaOrder(len(phi), d, len(theta)),
        phi=tuple(phi),
        theta=tuple(theta),
        intercept=intercept,
        sigma2=sigma2,
        residuals=TimeSeries([0.0]),
        coefficient_std_errors=(),
        sse=0.0,
        mse=sigma2,
    )


def gauss_solve(A, b):
    """Gaussian elimination with partial pivoting, written independently."""
    A = [list(map(float, row)) for row in A]
    b = list(map(float, b))
    n = len(A)
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(A[r][col]))
        if abs(A[piv][col]) == 0.0:
            raise ZeroDivisionError("singular system")
        A[col], A[piv] = A[piv], A[col]
        b[col], b[piv] = b[piv], b[col]
        for r in range(col + 1, n):
            f = A[r][col] / A[col][col]
            for c in range(col, n):
                A[r][c] -= f * A[col][c]
            b[r] -= f * b[col]
    x = [0.0] * n
    for r in range(n - 1, -1, -1):
        s = b[r] - sum(A[r][c] * x[c] for c in range(r + 1, n))
        x[r] = s / A[r][r]
    return np.asarray(x)


def normal_equations_ols(X, y):
    """Brute-force least squares through the normal equations and gauss_solve."""
    X = np.asarray(X, float)
    y = np.asarray(y, float)
    return gauss_solve(X.T @ X, X.T @ y)


@pytest.fixture
def rng():
    return np.random.default_rng(20180967)
