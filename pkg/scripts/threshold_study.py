#!/usr/bin/env python3
"""Calibration study: detection power and false alarms across thresholds.

For each critical value this measures, over seeded replicates at n = 200
with the demo AR(2) coefficients:

* exact-set rate -- runs recovering exactly the three planted positions
  (98, 162, 180 at magnitudes +8, -8, +6) with no extras,
* family-wise false-alarm rate -- clean runs reporting any outlier,
* per-position exceedance of the standardized statistic under pure
  unit-variance noise with known scale (theory: 2 * (1 - Phi(c))).

At n = 200 the scan tests roughly 196 near-standard-normal positions per
series, so a threshold of 3.0 fires spuriously on about 40% of clean
series; the conventional formula-based choice near 3.5-4 restores the
expected behavior. Run this to reproduce those numbers.
"""

import argparse
import math
import time

from aoarima import (
    ArimaOrder,
    DetectionConfig,
    InjectionPlan,
    SimSpec,
    detect_iterative,
    fit_ar_ols,
    inject,
    pi_weights,
    simulate,
)
from aoarima.estimation import ArimaFit
from aoarima.outliers import _stats_all_positions
from aoarima.rng import normals
from aoarima.series import TimeSeries

import numpy as np

PHI = (0.2237, 0.4282)
PLAN = ((98, 8.0), (162, -8.0), (180, 6.0))


def _known_fit() -> ArimaFit:
    return ArimaFit(
        order=ArimaOrder(2, 0, 0), phi=PHI, theta=(), intercept=0.0, sigma2=1.0,
        residuals=TimeSeries([0.0]), coefficient_std_errors=(), sse=0.0, mse=1.0,
    )


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seeds", type=int, default=200, help="replicates per cell")
    parser.add_argument(
        "--critical", type=float, nargs="+", default=[3.0, 3.3, 3.5, 3.7, 4.0]
    )
    args = parser.parse_args()

    n = 200
    target = {t for t, _ in PLAN}
    print(f"n = {n}, {args.seeds} seeds per cell, planted at {sorted(target)}")

    # per-position exceedance under pure noise, known scale
    pi = pi_weights(_known_fit(), n - 1)
    reps = max(500, args.seeds)
    counts = {c: 0 for c in args.critical}
    for r in range(reps):
        e = normals(70000 + r, n)
        num, tau2 = _stats_all_positions(e, pi)
        lam = np.abs(num / np.sqrt(tau2))
        for c in args.critical:
            counts[c] += int(np.count_nonzero(lam > c))

    print(f"\n{'c':>5}  {'exact-set':>10}  {'family-wise':>12}  {'per-position':>13}  {'theory':>9}")
    for c in args.critical:
        t0 = time.time()
        cfg = DetectionConfig(critical_value=c)
        exact = 0
        fw = 0
        for s in range(args.seeds):
            z = simulate(SimSpec(order=ArimaOrder(2, 0, 0), n=n, seed=1000 + s, phi=PHI))
            y = inject(z, InjectionPlan(points=PLAN))
            res = detect_iterative(y, fit_ar_ols(y, 2, True), cfg)
            exact += {rec.T for rec in res.outliers} == target
            clean = simulate(SimSpec(order=ArimaOrder(2, 0, 0), n=n, seed=5000 + s, phi=PHI))
            rc = detect_iterative(clean, fit_ar_ols(clean, 2, True), cfg)
            fw += bool(rc.outliers)
        per_pos = counts[c] / (reps * n)
        theory = 2.0 * (1.0 - 0.5 * (1.0 + math.erf(c / math.sqrt(2.0))))
        print(
            f"{c:>5.2f}  {exact / args.seeds:>10.3f}  {fw / args.seeds:>12.3f}  "
            f"{per_pos:>13.5f}  {theory:>9.5f}   ({time.time() - t0:.1f}s)"
        )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
