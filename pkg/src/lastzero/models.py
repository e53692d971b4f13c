"""Spectrally negative Levy models with positive mean drift.

Three parametric families, each drifting to +infinity so that the all-time
infimum is finite and the last zero of the path is a proper random time:

* ``BrownianDrift(mu, sigma)``: X_t = mu*t + sigma*B_t with mu > 0.
  Laplace exponent psi(theta) = sigma^2 theta^2 / 2 + mu theta.
* ``CramerLundberg(mu, lam, rho)``: premium drift mu minus a compound
  Poisson sum of Exp(rho) claims arriving at rate lam.  The net profit
  condition lam / (rho * mu) < 1 is required.
  psi(theta) = mu theta - lam theta / (rho + theta).
* ``BetaFamily(beta)``: the pure-jump process with
  psi(theta) = Gamma(theta + beta) / (Gamma(theta) Gamma(beta)),
  beta in (1, 2].  At beta = 2 this is exactly BrownianDrift(1, sqrt(2)).

Downstream code consumes models through a small surface: ``psi`` and its
first two derivatives at 0+, the right inverse ``phi`` of psi, the pair of
derivatives of phi at 0+, and a static ``profile`` of model facts (drift,
variation class, mass of the infimum law at zero).
"""

from __future__ import annotations

import enum
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np
from scipy import special

__all__ = [
    "Variation",
    "ModelProfile",
    "LevyModel",
    "BrownianDrift",
    "CramerLundberg",
    "BetaFamily",
    "model_from_dict",
]

_PHI_MAX_ITER = 200


class Variation(enum.Enum):
    """Path variation class of the jump part plus Gaussian part."""

    FINITE = "finite"
    INFINITE = "infinite"


@dataclass(frozen=True)
class ModelProfile:
    """Static facts about a model used by the solver and the simulators.

    ``f0`` is the probability that the all-time infimum (started at 0) is
    exactly 0, i.e. psi'(0+) * W(0).  It is positive only for finite
    variation paths, where ``drift`` holds the linear drift coefficient.
    """

    psi_prime0: float
    psi_double_prime0: float
    variation: Variation
    drift: float | None
    f0: float


class LevyModel(ABC):
    """Common interface for the supported spectrally negative models."""

    kind: str

    @abstractmethod
    def psi(self, theta):
        """Laplace exponent, vectorized over theta >= 0."""

    @abstractmethod
    def psi_prime(self, theta):
        """First derivative of psi, vectorized over theta >= 0."""

    @abstractmethod
    def psi_derivatives(self) -> tuple[float, float]:
        """(psi'(0+), psi''(0+))."""

    @abstractmethod
    def profile(self) -> ModelProfile:
        """Static model facts; cheap to call repeatedly."""

    @abstractmethod
    def params_dict(self) -> dict:
        """JSON-friendly parameter echo, including the ``kind`` tag."""

    def phi(self, q: float, tol: float = 1e-12) -> float:
        """Right inverse of psi: the largest root of psi(theta) = q.

        psi is strictly increasing and convex on [0, inf) for every model
        here (psi'(0+) > 0), so the root is unique.  Solved by bracket
        doubling followed by Newton steps safeguarded with bisection; the
        returned value satisfies |psi(phi(q)) - q| <= tol.
        """
        if not np.isfinite(q) or q < 0:
            raise ValueError(f"phi requires q >= 0, got {q!r}")
        if q == 0.0:
            return 0.0
        lo, hi = 0.0, 1.0
        for _ in range(_PHI_MAX_ITER):
            if self.psi(hi) >= q:
                break
            lo, hi = hi, 2.0 * hi
        else:
            raise ArithmeticError(f"failed to bracket phi({q})")
        x = 0.5 * (lo + hi)
        for _ in range(_PHI_MAX_ITER):
            res = self.psi(x) - q
            if abs(res) <= tol:
                return float(x)
            if res > 0.0:
                hi = x
            else:
                lo = x
            slope = self.psi_prime(x)
            x_new = 0.5 * (lo + hi)
            if slope > 0.0 and np.isfinite(slope):
                newton = x - res / slope
                if lo < newton < hi:
                    x_new = newton
            x = x_new
        raise ArithmeticError(f"phi({q}) did not converge to residual {tol}")

    def phi_derivs0(self) -> tuple[float, float]:
        """(phi'(0+), phi''(0+)) from the derivatives of psi at 0+.

        Differentiating psi(phi(q)) = q twice at q = 0 gives
        phi'(0) = 1/psi'(0+) and phi''(0) = -psi''(0+)/psi'(0+)^3.
        """
        p1, p2 = self.psi_derivatives()
        return 1.0 / p1, -p2 / p1**3


@dataclass(frozen=True)
class BrownianDrift(LevyModel):
    """Brownian motion with positive drift: X_t = mu*t + sigma*B_t."""

    mu: float
    sigma: float
    kind = "bm"

    def __post_init__(self):
        if not (np.isfinite(self.mu) and self.mu > 0):
            raise ValueError(f"BrownianDrift requires mu > 0, got {self.mu!r}")
        if not (np.isfinite(self.sigma) and self.sigma > 0):
            raise ValueError(f"BrownianDrift requires sigma > 0, got {self.sigma!r}")

    def psi(self, theta):
        theta = np.asarray(theta, float)
        out = 0.5 * self.sigma**2 * theta**2 + self.mu * theta
        return out if out.ndim else float(out)

    def psi_prime(self, theta):
        theta = np.asarray(theta, float)
        out = self.sigma**2 * theta + self.mu
        return out if out.ndim else float(out)

    def psi_derivatives(self):
        return self.mu, self.sigma**2

    def profile(self):
        return ModelProfile(
            psi_prime0=self.mu,
            psi_double_prime0=self.sigma**2,
            variation=Variation.INFINITE,
            drift=None,
            f0=0.0,
        )

    def params_dict(self):
        return {"kind": self.kind, "mu": self.mu, "sigma": self.sigma}


@dataclass(frozen=True)
class CramerLundberg(LevyModel):
    """Drift mu minus compound Poisson(lam) claims with Exp(rho) sizes."""

    mu: float
    lam: float
    rho: float
    kind = "cl"

    def __post_init__(self):
        for name in ("mu", "lam", "rho"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0):
                raise ValueError(f"CramerLundberg requires {name} > 0, got {v!r}")
        load = self.lam / (self.rho * self.mu)
        if load >= 1.0:
            raise ValueError(
                f"CramerLundberg requires lam/(rho*mu) < 1, got {load:.6g}"
            )

    def psi(self, theta):
        theta = np.asarray(theta, float)
        out = self.mu * theta - self.lam * theta / (self.rho + theta)
        return out if out.ndim else float(out)

    def psi_prime(self, theta):
        theta = np.asarray(theta, float)
        out = self.mu - self.lam * self.rho / (self.rho + theta) ** 2
        return out if out.ndim else float(out)

    def psi_derivatives(self):
        # psi''(theta) = 2 lam rho / (rho + theta)^3, so psi''(0+) = 2 lam / rho^2
        return self.mu - self.lam / self.rho, 2.0 * self.lam / self.rho**2

    def profile(self):
        return ModelProfile(
            psi_prime0=self.mu - self.lam / self.rho,
            psi_double_prime0=2.0 * self.lam / self.rho**2,
            variation=Variation.FINITE,
            drift=self.mu,
            f0=1.0 - self.lam / (self.mu * self.rho),
        )

    def params_dict(self):
        return {"kind": self.kind, "mu": self.mu, "lam": self.lam, "rho": self.rho}


@dataclass(frozen=True)
class BetaFamily(LevyModel):
    """Pure-jump family with psi(theta) = Gamma(theta+beta)/(Gamma(theta)Gamma(beta)).

    The Gamma-ratio is evaluated as theta * exp(L(theta)) with
    L(theta) = lgamma(theta+beta) - lgamma(theta+1) - lgamma(beta),
    which is finite at theta = 0 and stable for large theta.
    """

    beta: float
    kind = "beta"

    def __post_init__(self):
        if not (np.isfinite(self.beta) and 1.0 < self.beta <= 2.0):
            raise ValueError(f"BetaFamily requires beta in (1, 2], got {self.beta!r}")

    def _log_ratio(self, theta):
        return (
            special.gammaln(theta + self.beta)
            - special.gammaln(theta + 1.0)
            - special.gammaln(self.beta)
        )

    def psi(self, theta):
        theta = np.asarray(theta, float)
        out = theta * np.exp(self._log_ratio(theta))
        return out if out.ndim else float(out)

    def psi_prime(self, theta):
        theta = np.asarray(theta, float)
        lp = special.digamma(theta + self.beta) - special.digamma(theta + 1.0)
        out = np.exp(self._log_ratio(theta)) * (1.0 + theta * lp)
        return out if out.ndim else float(out)

    def psi_derivatives(self):
        # psi(theta) = theta * exp(L(theta)) with L(0) = 0 gives
        # psi'(0+) = 1 and psi''(0+) = 2 L'(0) = 2(digamma(beta) - digamma(1)).
        p2 = 2.0 * (special.digamma(self.beta) - special.digamma(1.0))
        return 1.0, float(p2)

    def profile(self):
        p1, p2 = self.psi_derivatives()
        return ModelProfile(
            psi_prime0=p1,
            psi_double_prime0=p2,
            variation=Variation.INFINITE,
            drift=None,
            f0=0.0,
        )

    def params_dict(self):
        return {"kind": self.kind, "beta": self.beta}

    def brownian_equivalent(self) -> BrownianDrift | None:
        """At beta = 2, psi(theta) = theta^2 + theta: BrownianDrift(1, sqrt(2))."""
        if self.beta == 2.0:
            return BrownianDrift(mu=1.0, sigma=math.sqrt(2.0))
        return None


def model_from_dict(d: dict) -> LevyModel:
    """Rebuild a model from its ``params_dict`` echo (used by the CLI)."""
    kind = d.get("kind")
    if kind == "bm":
        return BrownianDrift(mu=float(d["mu"]), sigma=float(d["sigma"]))
    if kind == "cl":
        return CramerLundberg(mu=float(d["mu"]), lam=float(d["lam"]), rho=float(d["rho"]))
    if kind == "beta":
        return BetaFamily(beta=float(d["beta"]))
    raise ValueError(f"unknown model kind {kind!r}")
