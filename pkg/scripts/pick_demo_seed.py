#!/usr/bin/env python3
"""How the frozen demo seed was chosen, and a verifier for it.

The demo series must make the standard walkthrough land cleanly:
detection at the default threshold recovers exactly the three planted
positions in narrative order (98 first), the mean-squared-error ladder
decreases strictly with at least 44% total improvement, and the
normality test rejects before correction but not after. Roughly half of
all seeds satisfy this; the first sufficiently good one found was frozen
as ``aoarima.simulate.DEMO_SEED`` and the resulting observations were
checked in as ``data/demo_series.csv``. Re-running this script verifies
the frozen seed still satisfies every condition.
"""

import argparse

import numpy as np

from aoarima import (
    ArimaOrder,
    DEMO_SEED,
    DetectionConfig,
    InjectionPlan,
    SimSpec,
    TimeSeries,
    detect_iterative,
    fit_ar_ols,
    inject,
    ks_normal,
    simulate,
)

PHI = (0.2237, 0.4282)
PLAN = ((98, 8.0), (162, -8.0), (180, 6.0))


def evaluate(seed: int) -> dict | None:
    spec = SimSpec(order=ArimaOrder(2, 0, 0), n=200, seed=seed, phi=PHI)
    y = inject(simulate(spec), InjectionPlan(points=PLAN))
    fit = fit_ar_ols(y, 2, with_intercept=True)
    res = detect_iterative(y, fit, DetectionConfig())
    if [r.T for r in res.outliers] != [98, 162, 180]:
        return None
    if res.terminated_by != "no_candidate":
        return None
    trail = res.mse_trail
    if not all(b < a for a, b in zip(trail, trail[1:])):
        return None
    improvement = 100.0 * (trail[0] - trail[-1]) / trail[0]
    if improvement < 44.0:
        return None
    p_before = ks_normal(fit.residuals).p_value
    p_after = ks_normal(TimeSeries(np.asarray(res.final_fit.residuals))).p_value
    if not (p_before < 0.05 <= p_after):
        return None
    return {"seed": seed, "improvement": improvement, "p_before": p_before, "p_after": p_after}


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--search", type=int, default=0,
                        help="also scan this many seeds above the frozen one")
    args = parser.parse_args()

    frozen = evaluate(DEMO_SEED)
    if frozen is None:
        print(f"FROZEN SEED {DEMO_SEED} NO LONGER SATISFIES THE CONDITIONS")
        return 1
    print(
        f"frozen seed {frozen['seed']}: improvement {frozen['improvement']:.2f}%, "
        f"normality p {frozen['p_before']:.4f} -> {frozen['p_after']:.4f}"
    )
    for seed in range(DEMO_SEED + 1, DEMO_SEED + 1 + args.search):
        hit = evaluate(seed)
        if hit:
            print(
                f"candidate {hit['seed']}: improvement {hit['improvement']:.2f}%, "
                f"normality p {hit['p_before']:.4f} -> {hit['p_after']:.4f}"
            )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
