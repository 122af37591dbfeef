"""Empirical convergence order of the fractional predictor-corrector.

Integrates the scalar test problem D^alpha x = -lambda x against its exact
solution x0 * E_alpha(-lambda t^alpha) on a sequence of halved step sizes
and prints the observed error ratios.  The product-trapezoid corrector is
order min(1 + alpha, 2) away from the origin; the max-norm rate is limited
to ~2*alpha by the t^alpha solution singularity at t = 0, which is what
this table measures.

    python scripts/convergence_study.py
"""

import math
import time

from fpnni import fode, mlf

LAM = 0.5
T_FINAL = 5.0


def max_rel_error(traj, alpha):
    worst = 0.0
    for i in range(1, len(traj.times), 20):
        t = float(traj.times[i])
        exact = mlf.mittag_leffler(alpha, -LAM * t**alpha)
        worst = max(worst, abs(traj.left[i, 0] - exact) / abs(exact))
    return worst


def main() -> int:
    for alpha in (0.5, 0.7, 0.9):
        print(f"alpha = {alpha}  (max-norm order limited to ~ {2 * alpha:.1f} "
              "by the t^alpha singularity)")
        print(f"{'steps/unit':>10} {'nodes':>7} {'max rel err':>12} "
              f"{'ratio':>7} {'order':>6} {'secs':>6}")
        previous = None
        for steps in (50, 100, 200, 400, 800):
            t0 = time.perf_counter()
            traj = fode.integrate(
                lambda t, x: -LAM * x, alpha, [1.0], T_FINAL,
                config=fode.SolverConfig(steps_per_unit_time=steps),
            )
            elapsed = time.perf_counter() - t0
            err = max_rel_error(traj, alpha)
            if previous is None:
                ratio_s, order_s = "-", "-"
            else:
                ratio = previous / err
                ratio_s, order_s = f"{ratio:7.2f}", f"{math.log2(ratio):6.2f}"
            print(f"{steps:>10} {len(traj.times):>7} {err:>12.3e} "
                  f"{ratio_s:>7} {order_s:>6} {elapsed:>6.2f}")
            previous = err
        print()
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
