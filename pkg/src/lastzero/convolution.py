"""Self-convolution of the infimum law.

With F = inf_cdf, the optimal threshold of the stopping rule is the median
of the distribution

    H(x) = integral_[0,x] F(x - y) dF(y),

the law of the sum of two independent infimum depths.  Two evaluation
routes are provided and cross-checked in the tests:

* closed forms for the Brownian and Cramer-Lundberg families (both reduce
  to a mixture of an atom, one exponential and a Gamma(2) tail), and
* numeric quadrature of the scale-function identity
      H(x) = psi'(0+)^2 * ( W(x) W(0) + int_0^x W(x-t) W'(t) dt ),
  which is the only route for the Beta family.

For the Beta family the integrand has an endpoint singularity
W'(t) ~ (beta-1) t^(beta-2) at t = 0 when beta < 2; substituting
u = W(t) absorbs it exactly, leaving a bounded integrand on (0, W(x)).

``build_table`` tabulates H on a uniform grid for interpolation and for
integrating H when no antiderivative is available.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .models import BetaFamily, BrownianDrift, CramerLundberg
from .scale import ScaleEvaluator

__all__ = [
    "HMethod",
    "ConvolutionTable",
    "conv_analytic",
    "conv_numeric",
    "conv_cdf",
    "exp_mixture_params",
    "build_table",
]

DEFAULT_QUAD_TOL = 1e-9


class HMethod(enum.Enum):
    ANALYTIC_BM = "analytic-bm"
    ANALYTIC_CL = "analytic-cl"
    NUMERIC_QUADRATURE = "numeric-quadrature"


def exp_mixture_params(ev: ScaleEvaluator) -> tuple[float, float]:
    """(ratio, rate) such that inf_cdf(x) = 1 - ratio * exp(-rate * x).

    Holds exactly for BrownianDrift (ratio = 1) and CramerLundberg
    (ratio = lam/(mu rho) < 1); raises for the Beta family.
    """
    m = ev.model
    if isinstance(m, BrownianDrift):
        return 1.0, ev.decay_rate()
    if isinstance(m, CramerLundberg):
        return m.lam / (m.mu * m.rho), ev.decay_rate()
    raise ValueError("no exponential-mixture form for this model")


def conv_analytic(ev: ScaleEvaluator, x):
    """Closed-form H for the exponential-mixture families.

    With F(y) = 1 - r e^{-k y} (atom 1-r at 0), the sum of two draws has
    H(x) = (1-r)^2 + 2 r (1-r) (1 - e^{-kx}) + r^2 (1 - k x e^{-kx} - e^{-kx}).
    """
    r, k = exp_mixture_params(ev)
    xa = np.asarray(x, float)
    neg = xa < 0.0
    xp = np.where(neg, 0.0, xa)
    e = np.exp(-k * xp)
    vals = (1.0 - r) ** 2 + 2.0 * r * (1.0 - r) * (1.0 - e) + r**2 * (
        1.0 - k * xp * e - e
    )
    out = np.where(neg, 0.0, vals)
    return float(out) if np.ndim(x) == 0 else out


def conv_numeric(ev: ScaleEvaluator, x: float, quad_tol: float = DEFAULT_QUAD_TOL) -> float:
    """H(x) by quadrature of the scale-function identity; any model."""
    if x < 0.0:
        return 0.0
    p1 = ev.profile.psi_prime0
    atom = p1**2 * ev.w(x) * ev.w(0.0)
    if x == 0.0:
        return atom
    m = ev.model
    if isinstance(m, BetaFamily):
        # u = W(t):  int_0^x W(x-t) W'(t) dt = int_0^W(x) W(x - t(u)) du
        # with t(u) = -log1p(-u^(1/(beta-1))); the integrand is bounded.
        bm1 = m.beta - 1.0

        def integrand(u):
            t = -np.log1p(-u ** (1.0 / bm1))
            return ev.w(x - t)

        upper = ev.w(x)
        val, _ = integrate.quad(
            integrand, 0.0, upper, epsabs=quad_tol, epsrel=1e-10, limit=200
        )
    else:

        def integrand(t):
            return ev.w(x - t) * ev.w_prime(t)

        val, _ = integrate.quad(
            integrand, 0.0, x, epsabs=quad_tol, epsrel=1e-10, limit=200
        )
    return atom + p1**2 * val


def conv_cdf(ev: ScaleEvaluator, x: float, quad_tol: float = DEFAULT_QUAD_TOL) -> float:
    """H(x) by the best available route (closed form, else quadrature)."""
    if isinstance(ev.model, BetaFamily):
        return conv_numeric(ev, x, quad_tol)
    return conv_analytic(ev, x)


@dataclass
class ConvolutionTable:
    """Monotone tabulation of H on a uniform grid starting at 0.

    Evaluation interpolates piecewise-linearly (0 below the grid, flat at
    the last value beyond it); ``cum_integral`` integrates the interpolant
    exactly, which is how V is assembled when H has no antiderivative.
    """

    grid: np.ndarray
    values: np.ndarray
    method: HMethod
    quad_tol: float
    _cum: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        g, v = self.grid, self.values
        if g.ndim != 1 or g.shape != v.shape or g.size < 2:
            raise ValueError("table needs matching 1-d grid/values with >= 2 points")
        if g[0] != 0.0:
            raise ValueError("table grid must start at 0")
        seg = 0.5 * (v[1:] + v[:-1]) * np.diff(g)
        self._cum = np.concatenate([[0.0], np.cumsum(seg)])

    def __call__(self, x):
        xa = np.asarray(x, float)
        out = np.interp(xa, self.grid, self.values, left=0.0)
        out = np.where(xa < 0.0, 0.0, out)
        return float(out) if np.ndim(x) == 0 else out

    def cum_integral(self, x: float) -> float:
        """integral_0^x of the interpolant; x must lie within the grid."""
        if x < 0.0:
            return 0.0
        g = self.grid
        if x > g[-1] + 1e-12:
            raise ValueError(f"integral endpoint {x} beyond table end {g[-1]}")
        x = min(x, g[-1])
        i = int(np.searchsorted(g, x, side="right")) - 1
        if i >= g.size - 1:
            return float(self._cum[-1])
        frac = x - g[i]
        v_x = self.values[i] + (self.values[i + 1] - self.values[i]) * (
            frac / (g[i + 1] - g[i])
        )
        return float(self._cum[i] + 0.5 * (self.values[i] + v_x) * frac)


def build_table(
    ev: ScaleEvaluator,
    x_max: float | None = None,
    n_points: int | None = None,
    quad_tol: float = DEFAULT_QUAD_TOL,
) -> ConvolutionTable:
    """Tabulate H on [0, x_max].

    The default x_max is twice the 99.5% quantile of the infimum law plus
    one, which guarantees H(x_max) >= 0.99^2 > 1/2 so the median is always
    bracketed.  Values are clamped to a nondecreasing sequence in [0, 1];
    a decrease beyond quadrature noise raises.
    """
    if x_max is None:
        x_max = 2.0 * ev.inf_cdf_quantile(0.995) + 1.0
    if x_max <= 0.0:
        raise ValueError(f"x_max must be positive, got {x_max!r}")
    if n_points is None:
        n_points = int(min(4001, max(801, round(x_max / 0.005) + 1)))
    if n_points < 2:
        raise ValueError(f"n_points must be >= 2, got {n_points!r}")
    grid = np.linspace(0.0, x_max, n_points)
    if isinstance(ev.model, BetaFamily):
        method = HMethod.NUMERIC_QUADRATURE
        values = np.array([conv_numeric(ev, float(x), quad_tol) for x in grid])
    else:
        method = (
            HMethod.ANALYTIC_BM
            if isinstance(ev.model, BrownianDrift)
            else HMethod.ANALYTIC_CL
        )
        values = conv_analytic(ev, grid)
    clamped = np.maximum.accumulate(np.clip(values, 0.0, 1.0))
    if np.max(clamped - values) > 50.0 * quad_tol:
        raise ArithmeticError("convolution table is not monotone beyond tolerance")
    return ConvolutionTable(grid=grid, values=clamped, method=method, quad_tol=quad_tol)
