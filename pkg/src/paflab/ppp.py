"""The limiting Poisson point process and its degree functionals.

The rescaled fitness landscape {(i/n, F_i/u_n)} converges to a Poisson
point process Pi on (0,1) x (0,inf) with intensity dt x (alpha-1) x^-alpha dx.
This module samples Pi truncated at a fitness floor delta (the restriction
has finite intensity delta^-(alpha-1)), and evaluates:

* T(eps)   -- the inverse-cumulative-mass integral
              int_eps^1 (sum of f over points with t <= s)^-1 ds,
              optionally compensating the discarded sub-delta mass by its
              expectation (alpha-1) delta^(2-alpha) / (2-alpha) per unit time;
* the strong-disorder maximum  sup f (t^(-1/theta) - 1), whose law is
  exactly Frechet-type: P(sup <= x) = exp(-g(0,1) x^-(alpha-1));
* the extreme-disorder maximum  m * sup_t>=eps f * T(t);
* g(a,b) = int_a^b (t^(-1/theta) - 1)^(alpha-1) dt by adaptive quadrature,
  with the Beta-function identity g(0,1) = theta B(theta-alpha+1, alpha)
  available separately as an independent cross-check;
* the location law P(I <= t) = g(0,t)/g(0,1) of the maximizer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np
from scipy import integrate
from scipy.special import betainc, betaln

__all__ = [
    "PointSample",
    "sample_ppp",
    "functional_T",
    "StrongSup",
    "strong_sup",
    "strong_sup_batch",
    "ExtremeSup",
    "extreme_sup",
    "extreme_sup_batch",
    "restrict",
    "small_mass_rate",
    "g_integral",
    "g_beta_identity",
    "frechet_cdf",
    "law_of_I_cdf",
]


def small_mass_rate(alpha: float, delta: float) -> float:
    """Expected discarded fitness mass per unit time below the floor delta.

    int_0^delta x (alpha-1) x^-alpha dx, finite exactly when alpha < 2.
    """
    if alpha >= 2.0:
        return 0.0
    return (alpha - 1.0) * delta ** (2.0 - alpha) / (2.0 - alpha)


@dataclass
class PointSample:
    """Realization of Pi restricted to (0,1) x (delta, inf).

    ``t`` and ``f`` are parallel arrays; the point count is Poisson with
    mean delta^-(alpha-1).  ``small_mass_per_unit_time`` carries the
    first-order compensation for the discarded points.
    """

    alpha: float
    delta: float
    t: np.ndarray
    f: np.ndarray
    small_mass_per_unit_time: float

    @property
    def n_points(self) -> int:
        return len(self.t)

    def points(self):
        return list(zip(self.t.tolist(), self.f.tolist()))


def sample_ppp(alpha: float, delta: float, rng: np.random.Generator) -> PointSample:
    """Draw Pi restricted to fitness > delta.

    N ~ Poisson(delta^-(alpha-1)); times are uniform on (0,1) and each
    fitness is delta * U^(-1/(alpha-1)), the exact normalized restriction
    of the intensity.
    """
    if not (alpha > 1.0 and delta > 0.0):
        raise ValueError("need alpha > 1 and delta > 0")
    mean_count = delta ** (-(alpha - 1.0))
    n = int(rng.poisson(mean_count))
    t = rng.random(n)
    f = delta * rng.random(n) ** (-1.0 / (alpha - 1.0))
    return PointSample(alpha=alpha, delta=delta, t=t, f=f,
                       small_mass_per_unit_time=small_mass_rate(alpha, delta))


def restrict(sample: PointSample, delta_new: float) -> PointSample:
    """Raise the fitness floor (drop points with f <= delta_new)."""
    if delta_new < sample.delta:
        raise ValueError("can only raise the floor")
    keep = sample.f > delta_new
    return PointSample(alpha=sample.alpha, delta=delta_new,
                       t=sample.t[keep], f=sample.f[keep],
                       small_mass_per_unit_time=small_mass_rate(sample.alpha, delta_new))


def functional_T(sample: PointSample, eps: float,
                 compensate_small: bool = False) -> Optional[float]:
    """T(eps) = int_eps^1 (mass of f over points with t <= s)^-1 ds.

    Returns None (undefined) when no point sits at or before eps, since
    the integrand then diverges on an interval.  The integral is exact:
    piecewise constant denominators without compensation, logarithmic
    closed form per block with the linear-in-s compensation.
    """
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must be in (0, 1)")
    if sample.n_points == 0 or float(np.min(sample.t)) > eps:
        return None
    order = np.argsort(sample.t, kind="stable")
    t = sample.t[order]
    f = sample.f[order]
    cum = np.cumsum(f)
    kappa = sample.small_mass_per_unit_time if compensate_small else 0.0

    starts = np.maximum(t, eps)
    ends = np.concatenate([t[1:], [1.0]])
    total = 0.0
    for a, b, mass in zip(starts, ends, cum):
        if b <= a:
            continue
        if kappa > 0.0:
            total += (math.log(mass + kappa * b) - math.log(mass + kappa * a)) / kappa
        else:
            total += (b - a) / mass
    return total


class StrongSup(NamedTuple):
    """Strong-disorder maximum with its truncation diagnostic."""

    value: float
    argmax_t: float
    empty: bool
    truncation_bias_bound: float


def strong_sup(sample: PointSample, theta: float) -> StrongSup:
    """sup over points of f * (t^(-1/theta) - 1).

    Needs theta > alpha - 1.  The bound reported alongside is the
    probability that a discarded point (f <= delta) would have beaten the
    returned value, computed from the intensity of the sub-delta field.
    """
    alpha = sample.alpha
    if not theta > alpha - 1.0:
        raise ValueError("strong-disorder functional needs theta > alpha - 1")
    if sample.n_points == 0:
        return StrongSup(0.0, math.nan, True, 1.0)
    vals = sample.f * (sample.t ** (-1.0 / theta) - 1.0)
    j = int(np.argmax(vals))
    value = float(vals[j])
    bias = _truncation_exceedance(alpha, theta, sample.delta, value)
    return StrongSup(value, float(sample.t[j]), False, bias)


def _truncation_exceedance(alpha: float, theta: float, delta: float, x: float) -> float:
    """P(some point with f <= delta has f (t^(-1/theta)-1) > x)."""
    if x <= 0.0:
        return 1.0
    t_star = (1.0 + x / delta) ** (-theta)
    lam = x ** (-(alpha - 1.0)) * g_beta_identity(theta, alpha, 0.0, t_star) \
        - t_star * delta ** (-(alpha - 1.0))
    lam = max(lam, 0.0)
    return 1.0 - math.exp(-lam)


def strong_sup_batch(alpha: float, delta: float, theta: float, n_samples: int,
                     rng: np.random.Generator):
    """(sup values, argmax times, point counts) over independent samples."""
    values = np.empty(n_samples)
    argmax_t = np.empty(n_samples)
    counts = np.empty(n_samples, dtype=np.int64)
    for s in range(n_samples):
        smp = sample_ppp(alpha, delta, rng)
        res = strong_sup(smp, theta)
        values[s] = res.value
        argmax_t[s] = res.argmax_t
        counts[s] = smp.n_points
    return values, argmax_t, counts


class ExtremeSup(NamedTuple):
    """Extreme-disorder maximum m * sup f T(t) over points with t >= eps."""

    value: float
    argmax_t: float
    empty: bool
    n_candidates: int


def extreme_sup(sample: PointSample, m: int, eps_floor: float,
                compensate_small: bool = True) -> ExtremeSup:
    """m * max over stored points with t >= eps_floor of f * T(t).

    Every candidate's own point anchors its denominator, so individual
    terms are always defined; candidates below eps_floor are skipped (the
    small-t contribution vanishes in the limit and is examined by the
    refinement sweep in the verification suite).
    """
    if sample.n_points == 0:
        return ExtremeSup(0.0, math.nan, True, 0)
    order = np.argsort(sample.t, kind="stable")
    t = sample.t[order]
    f = sample.f[order]
    cum = np.cumsum(f)
    kappa = sample.small_mass_per_unit_time if compensate_small else 0.0

    # suffix pass: T_i = T(t_i) accumulated from the right over the blocks
    # [t_j, t_{j+1}) with denominator cum[j] (+ kappa * s when compensating)
    p = len(t)
    ends = np.concatenate([t[1:], [1.0]])
    if kappa > 0.0:
        blocks = (np.log(cum + kappa * ends) - np.log(cum + kappa * t)) / kappa
    else:
        blocks = (ends - t) / cum
    T = np.cumsum(blocks[::-1])[::-1]

    mask = t >= eps_floor
    if not mask.any():
        return ExtremeSup(0.0, math.nan, True, 0)
    vals = np.where(mask, f * T, -np.inf)
    j = int(np.argmax(vals))
    return ExtremeSup(m * float(vals[j]), float(t[j]), False, int(mask.sum()))


def extreme_sup_batch(alpha: float, delta: float, m: int, eps_floor: float,
                      n_samples: int, rng: np.random.Generator,
                      compensate_small: bool = True) -> np.ndarray:
    out = np.empty(n_samples)
    for s in range(n_samples):
        smp = sample_ppp(alpha, delta, rng)
        out[s] = extreme_sup(smp, m, eps_floor, compensate_small).value
    return out


# -----------------------------------------------------------------------------
# The g-integral, the Frechet limit, and the maximizer's location law
# -----------------------------------------------------------------------------

def g_integral(theta: float, alpha: float, a: float, b: float,
               rel_tol: float = 1e-12) -> float:
    """g(a,b) = int_a^b (t^(-1/theta) - 1)^(alpha-1) dt by adaptive quadrature.

    The substitution t = v^theta tames the integrable singularity at t = 0;
    finiteness requires alpha < 1 + theta.
    """
    if not (0.0 <= a <= b <= 1.0):
        raise ValueError("need 0 <= a <= b <= 1")
    if not alpha < 1.0 + theta:
        raise RuntimeError("g(a,b) diverges unless alpha < 1 + theta")
    if a == b:
        return 0.0
    lo, hi = a ** (1.0 / theta), b ** (1.0 / theta)
    integrand = lambda v: theta * v ** (theta - alpha) * (1.0 - v) ** (alpha - 1.0)
    val, _ = integrate.quad(integrand, lo, hi, epsabs=1e-14, epsrel=rel_tol, limit=200)
    return val


def g_beta_identity(theta: float, alpha: float, a: float = 0.0, b: float = 1.0) -> float:
    """Closed form of g via the incomplete Beta function (cross-check route).

    g(0,1) = theta * B(theta - alpha + 1, alpha); general (a,b) via the
    regularized incomplete Beta at the substituted endpoints.
    """
    if not alpha < 1.0 + theta:
        raise RuntimeError("g(a,b) diverges unless alpha < 1 + theta")
    p, q = theta - alpha + 1.0, alpha
    scale = theta * math.exp(betaln(p, q))
    return scale * float(betainc(p, q, b ** (1.0 / theta)) - betainc(p, q, a ** (1.0 / theta)))


def frechet_cdf(g: float, alpha: float, x):
    """exp(-g * x^-(alpha-1)) for x > 0, else 0."""
    if g <= 0:
        raise ValueError("need g > 0")
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(x > 0.0, np.exp(-g * x ** (-(alpha - 1.0))), 0.0)
    return out[()]


def law_of_I_cdf(theta: float, alpha: float, t):
    """Location of the strong-disorder maximizer: P(I <= t) = g(0,t)/g(0,1)."""
    g01 = g_integral(theta, alpha, 0.0, 1.0)
    if np.ndim(t) == 0:
        tt = min(max(float(t), 0.0), 1.0)
        return g_integral(theta, alpha, 0.0, tt) / g01
    t = np.clip(np.asarray(t, dtype=float), 0.0, 1.0)
    return np.array([g_integral(theta, alpha, 0.0, ti) for ti in t]) / g01
