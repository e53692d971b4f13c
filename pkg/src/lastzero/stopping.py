"""Optimal stopping rule for predicting the last time below zero.

The problem: stop as close as possible in L1 to g = sup{t : X_t <= 0},
over stopping times with finite mean.  The optimal rule is the first
passage above a fixed threshold a*, and a* is the median of H, the
self-convolution of the infimum law:

    a* = inf{ x >= 0 : H(x) >= 1/2 }.

Writing p for psi'(0+), the value of stopping at the first passage above
a (relative to the best possible mean error) is, for x <= a,

    V_a(x) = (2/p) * int_max(x,0)^a H(y) dy - (a - max(x,0))/p + min(x,0)/p,

and V_a(x) = 0 for x >= a.  V = V_{a*} is nonpositive, nondecreasing, and
flat at 0 beyond a*.  Two regimes exist:

* smooth fit (V'(a*-) = 0): always when paths have infinite variation,
  and for finite variation when F(0)^2 < 1/2;
* continuous fit only: finite variation with F(0)^2 >= 1/2, where a* = 0
  and V(x) = x/p for x <= 0 with a kink V'(0-) = 1/p.

``expected_g`` and ``laplace_g_brownian`` give the mean and the Laplace
transform of g itself, used to translate V into the absolute mean error
E|g - tau| = V(0) + E(g) and to cross-check the Monte Carlo engine.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .convolution import (
    DEFAULT_QUAD_TOL,
    ConvolutionTable,
    build_table,
    conv_cdf,
    exp_mixture_params,
)
from .models import BetaFamily, BrownianDrift, LevyModel, Variation
from .scale import ScaleEvaluator

__all__ = [
    "Regime",
    "OptimalRule",
    "ValueCurve",
    "solve_a_star",
    "solve",
    "V_a_at",
    "V_at",
    "V_prime_at",
    "expected_g",
    "expected_tau_plus",
    "laplace_g_brownian",
    "build_value_curve",
]

DEFAULT_ROOT_TOL = 1e-10


class Regime(enum.Enum):
    SMOOTH_FIT = "smooth-fit"
    CONTINUOUS_FIT_ONLY = "continuous-fit-only"


@dataclass(frozen=True)
class OptimalRule:
    """Solved stopping rule: threshold, regime, and supporting data.

    ``table`` is None exactly in the continuous-fit regime (a* = 0), where
    the value function is linear and needs no tabulated H.
    """

    a_star: float
    x0: float
    regime: Regime
    expected_g0: float
    table: ConvolutionTable | None


def solve_a_star(
    ev: ScaleEvaluator,
    table: ConvolutionTable | None = None,
    tol: float = DEFAULT_ROOT_TOL,
) -> OptimalRule:
    """Locate the optimal threshold as the median of H.

    In the smooth-fit regime the root of H = 1/2 is bracketed from the
    table and refined with a safeguarded bracketing solver evaluated on H
    directly (closed form or quadrature, not the interpolant), to an
    interval of width <= tol.
    """
    prof = ev.profile
    eg0 = prof.psi_double_prime0 / prof.psi_prime0**2
    if prof.variation is Variation.FINITE and prof.f0**2 >= 0.5:
        return OptimalRule(
            a_star=0.0,
            x0=ev.x0(),
            regime=Regime.CONTINUOUS_FIT_ONLY,
            expected_g0=eg0,
            table=table,
        )
    if table is None:
        table = build_table(ev)
    if table.values[-1] <= 0.5:
        raise ArithmeticError(
            f"H({table.grid[-1]:g}) = {table.values[-1]:.6f} <= 1/2: "
            "table too short to bracket the median"
        )

    def h_direct(x):
        return conv_cdf(ev, x, table.quad_tol) - 0.5

    idx = int(np.searchsorted(table.values, 0.5, side="left"))
    lo = float(table.grid[max(idx - 1, 0)])
    hi = float(table.grid[min(idx, table.grid.size - 1)])
    cell = float(table.grid[1] - table.grid[0])
    # the interpolated bracket can be off by a cell relative to direct H
    while lo > 0.0 and h_direct(lo) > 0.0:
        lo = max(0.0, lo - cell)
    while h_direct(hi) < 0.0:
        hi = hi + cell
        if hi > table.grid[-1] + 1.0:
            raise ArithmeticError("failed to bracket the median of H")
    a = optimize.brentq(h_direct, lo, hi, xtol=tol, rtol=8.9e-16)
    return OptimalRule(
        a_star=float(a),
        x0=ev.x0(),
        regime=Regime.SMOOTH_FIT,
        expected_g0=eg0,
        table=table,
    )


def solve(
    model: LevyModel,
    tol: float = DEFAULT_ROOT_TOL,
    quad_tol: float = DEFAULT_QUAD_TOL,
    x_max: float | None = None,
    n_points: int | None = None,
) -> tuple[ScaleEvaluator, OptimalRule]:
    """One-call convenience: evaluator, H table (when needed), solved rule."""
    ev = ScaleEvaluator(model)
    prof = ev.profile
    if prof.variation is Variation.FINITE and prof.f0**2 >= 0.5:
        return ev, solve_a_star(ev, table=None, tol=tol)
    table = build_table(ev, x_max=x_max, n_points=n_points, quad_tol=quad_tol)
    return ev, solve_a_star(ev, table=table, tol=tol)


def _int_h(ev: ScaleEvaluator, table: ConvolutionTable | None, lo: float, hi: float) -> float:
    """integral_lo^hi H(y) dy for 0 <= lo <= hi.

    Exponential-mixture families use the closed antiderivative of H; the
    Beta family integrates the tabulated interpolant exactly.
    """
    try:
        r, k = exp_mixture_params(ev)
    except ValueError:
        if table is None:
            raise ValueError("a convolution table is required to integrate H here")
        return table.cum_integral(hi) - table.cum_integral(lo)

    def anti(y):
        e = math.exp(-k * y)
        return (
            (1.0 - r) ** 2 * y
            + 2.0 * r * (1.0 - r) * (y - (1.0 - e) / k)
            + r**2 * (y + y * e + (2.0 / k) * (e - 1.0))
        )

    return anti(hi) - anti(lo)


def V_a_at(
    ev: ScaleEvaluator,
    table: ConvolutionTable | None,
    a: float,
    x: float,
) -> float:
    """Value of the first-passage rule with threshold a, started at x."""
    if not (np.isfinite(a) and a >= 0.0):
        raise ValueError(f"threshold must be finite and >= 0, got {a!r}")
    if x >= a:
        return 0.0
    p = ev.profile.psi_prime0
    base = max(x, 0.0)
    val = (2.0 / p) * _int_h(ev, table, base, a) - (a - base) / p
    if x < 0.0:
        val += x / p
    return val


def V_at(ev: ScaleEvaluator, rule: OptimalRule, x: float) -> float:
    """Optimal value V(x) = V_{a*}(x).

    In the continuous-fit regime this is exactly x/psi'(0+) below zero and
    0 above, with no quadrature involved.
    """
    if rule.regime is Regime.CONTINUOUS_FIT_ONLY:
        return min(x, 0.0) / ev.profile.psi_prime0
    return V_a_at(ev, rule.table, rule.a_star, x)


def V_prime_at(ev: ScaleEvaluator, rule: OptimalRule, x: float) -> float:
    """dV/dx; equals (1 - 2H(x))/psi'(0+) below a*, 0 above.

    At x = a* the derivative is 0 under smooth fit; in the continuous-fit
    regime the two one-sided slopes differ (kink), so x = a* is rejected.
    """
    if x > rule.a_star:
        return 0.0
    if x == rule.a_star:
        if rule.regime is Regime.SMOOTH_FIT:
            return 0.0
        raise ValueError("V has a kink at the threshold in this regime")
    quad_tol = rule.table.quad_tol if rule.table is not None else DEFAULT_QUAD_TOL
    h = conv_cdf(ev, x, quad_tol) if x > 0.0 else 0.0
    return (1.0 - 2.0 * h) / ev.profile.psi_prime0


def expected_g(model: LevyModel, x: float = 0.0) -> float:
    """E_x(g), the mean of the last time below zero started from x.

    From the Laplace transform of g: for x <= 0 the scale terms vanish and
    E_x(g) = psi''(0+)/psi'(0+)^2 - x/psi'(0+) for every model; for x > 0
    a closed form exists for BrownianDrift only,
    E_x(g) = exp(-2 mu x/sigma^2) (x/mu + sigma^2/mu^2).
    """
    p1, p2 = model.psi_derivatives()
    if x <= 0.0:
        return p2 / p1**2 - x / p1
    if isinstance(model, BrownianDrift):
        c = 2.0 * model.mu / model.sigma**2
        return math.exp(-c * x) * (x / model.mu + model.sigma**2 / model.mu**2)
    raise ValueError(
        "expected_g at x > 0 requires the q-scale function in closed form; "
        "only BrownianDrift is supported"
    )


def expected_tau_plus(model: LevyModel, a: float) -> float:
    """Mean first-passage time above level a from 0: a/psi'(0+) for a >= 0."""
    if a <= 0.0:
        return 0.0
    return a / model.psi_derivatives()[0]


def laplace_g_brownian(model: BrownianDrift, q: float, x: float = 0.0) -> float:
    """E_x(exp(-q g)) for Brownian motion with drift.

    E_x(e^{-q g}) = e^{phi(q) x} phi'(q) psi'(0+)
                    + psi'(0+) (W(x) - W_q(x)),
    with phi(q) = (sqrt(mu^2 + 2 q sigma^2) - mu)/sigma^2 analytic.  For
    x < 0 the scale terms vanish.  Equals 1 at q = 0 for every x.
    """
    if not isinstance(model, BrownianDrift):
        raise ValueError("laplace_g_brownian requires a BrownianDrift model")
    if q < 0.0:
        raise ValueError(f"q must be >= 0, got {q!r}")
    mu, sig = model.mu, model.sigma
    d = math.sqrt(mu**2 + 2.0 * q * sig**2)
    phi_q = (d - mu) / sig**2
    ev = ScaleEvaluator(model)
    return math.exp(phi_q * x) * mu / d + mu * (ev.w(x) - ev.w_q_brownian(x, q))


@dataclass(frozen=True)
class ValueCurve:
    """Sampled curves along one x grid: infimum law, gain, H, and V_a."""

    x: np.ndarray
    inf_cdf: np.ndarray
    gain: np.ndarray
    conv: np.ndarray
    thresholds: tuple[float, ...]
    values: np.ndarray  # shape (len(thresholds), len(x))


def build_value_curve(
    ev: ScaleEvaluator,
    table: ConvolutionTable | None,
    xs,
    thresholds,
) -> ValueCurve:
    xs = np.asarray(xs, float)
    thresholds = tuple(float(a) for a in thresholds)
    conv = (
        np.asarray([conv_cdf(ev, float(x)) if x > 0 else 0.0 for x in xs])
        if table is None
        else table(xs)
    )
    values = np.empty((len(thresholds), xs.size))
    for i, a in enumerate(thresholds):
        values[i] = [V_a_at(ev, table, a, float(x)) for x in xs]
    return ValueCurve(
        x=xs,
        inf_cdf=np.asarray(ev.inf_cdf(xs)),
        gain=np.asarray(ev.gain(xs)),
        conv=conv,
        thresholds=thresholds,
        values=values,
    )
