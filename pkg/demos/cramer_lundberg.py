"""Walkthrough for the insurance-risk model: drift minus compound Poisson.

Two parameter sets, one per regime.  With a light claim load the rule
waits for a genuine overshoot (smooth fit at the threshold); with a heavy
drift the atom of the infimum law at zero is so large that stopping the
first moment the path is at or above zero is already optimal, and the
value function keeps a kink there.

    python3 demos/cramer_lundberg.py
"""

import numpy as np

from lastzero import (
    CramerLundberg,
    McConfig,
    Regime,
    V_at,
    V_prime_at,
    estimate_mean_abs_error_grid,
    solve,
)


def describe(model):
    ev, rule = solve(model)
    prof = ev.profile
    print("model:", model.params_dict())
    print(f"  atom of infimum law F(0) : {prof.f0:.4f}  (squared: {prof.f0**2:.4f})")
    print(f"  threshold a*             : {rule.a_star:.6f}")
    print(f"  regime                   : {rule.regime.value}")
    print(f"  V(0)                     : {V_at(ev, rule, 0.0):+.6f}")
    if rule.regime is Regime.SMOOTH_FIT:
        eps = 1e-7
        print(f"  slope at a*- (smooth fit): {V_prime_at(ev, rule, rule.a_star - eps):+.2e}")
    else:
        print(f"  slope at 0- (kink)       : {V_prime_at(ev, rule, -1e-12):+.6f}")
    print()
    return ev, rule


def main():
    light = CramerLundberg(mu=2.0, lam=1.0, rho=1.0)
    heavy = CramerLundberg(mu=4.0, lam=1.0, rho=1.0)

    ev, rule = describe(light)
    describe(heavy)

    # empirical check that a* minimises the mean error, one shared path set
    grid = rule.a_star * np.linspace(0.0, 2.0, 11)
    cfg = McConfig(n_paths=40000, base_seed=7)
    reports = estimate_mean_abs_error_grid(light, cfg, list(grid))
    print("mean |g - tau_a| across thresholds (light-load model):")
    best = min(reports, key=lambda r: r.estimate)
    for rep in reports:
        mark = "  <-- best" if rep is best else ""
        print(f"  a = {rep.a:6.4f}: {rep.estimate:.4f} (se {rep.std_error:.4f}){mark}")
    print(f"analytic threshold: {rule.a_star:.4f}")


if __name__ == "__main__":
    main()
