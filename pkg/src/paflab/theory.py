"""Closed-form limit objects for the fitness-biased attachment dynamics.

Evaluates, for a fitness law mu and out-degree m with theta_m = 1 + E[F]/m:

* the limiting degree distribution
      p(k) = integral of  theta/(x+theta) * prod_{l=1}^k (l-1+x)/(l+x+theta)
  against mu, together with its per-degree fitness measures Gamma^(k) and
  the size-biased measure Gamma(dx) = x/(theta-1) mu(dx);
* the weak-disorder tail constant
      C = theta * integral of Gamma(x+theta)/Gamma(x) dmu
  governing p(k) ~ C k^-(1+theta);
* the normalization sequences c_n^k (per-half-edge product) and the
  power-of-m variant, computed in log space from a fitness sample's prefix
  sums, plus the normalized-binomial martingale values and the exact
  fitness-conditional expected degree they induce;
* the predicted tail exponent of p(k) per disorder regime.

All Gamma-function ratios go through ``gammaln``; direct products would
overflow past k of a few dozen.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

import numpy as np
from scipy import integrate
from scipy.special import gammaln

from .fitness import Deterministic, FitnessSpec, Regime, classify_regime, theta as theta_of
from .graph_engine import PAFFD, ModelKind

__all__ = [
    "TheoryContext",
    "QuadratureSettings",
    "QuadratureError",
    "RegimeError",
    "TailPrediction",
    "limit_pk",
    "limit_gamma_k",
    "limit_gamma_mass",
    "weak_tail_constant",
    "c_sequence",
    "c_sequence_path",
    "martingale_value",
    "log_gen_binom",
    "conditional_mean_degree",
    "tail_exponent_prediction",
    "ell_star",
]


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to reach the requested tolerance."""

    def __init__(self, message: str, achieved: float):
        super().__init__(f"{message} (achieved abs error ~ {achieved:.3e})")
        self.achieved = achieved


class RegimeError(RuntimeError):
    """Asked for a quantity outside its disorder regime."""


@dataclass(frozen=True)
class QuadratureSettings:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-13
    max_subdivisions: int = 200
    # accept results whose reported error is within this factor of the target
    slack: float = 100.0


@dataclass(frozen=True)
class TheoryContext:
    """Fitness law, out-degree and quadrature policy for the limit formulas."""

    spec: FitnessSpec
    m: int = 1
    quadrature: QuadratureSettings = field(default_factory=QuadratureSettings)

    @property
    def theta(self) -> float:
        return theta_of(self.spec, self.m)

    @property
    def regime(self) -> Regime:
        return classify_regime(self.spec, self.m)

    def require_finite_theta(self) -> float:
        th = self.theta
        if math.isinf(th):
            raise RegimeError("theta_m is infinite (fitness mean diverges)")
        return th


def _integrate_mu(spec: FitnessSpec, func, settings: QuadratureSettings,
                  lo: float = 0.0, hi: float = math.inf,
                  breakpoints: Sequence[float] = ()) -> float:
    """Integral of ``func`` against mu restricted to the half-open (lo, hi]."""
    total = 0.0
    err = 0.0
    atom = spec.atom()
    if atom is not None:
        loc, mass = atom
        if lo < loc <= hi:
            total += mass * float(func(loc))
    a, b = spec.support()
    a = max(a, lo)
    b = min(b, hi)
    if a < b:
        pts = sorted(p for p in set(breakpoints) if a < p < b)
        segments = [a, *pts, b]
        integrand = lambda x: float(func(x)) * float(spec.pdf(x))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            for left, right in zip(segments[:-1], segments[1:]):
                val, e = integrate.quad(
                    integrand, left, right,
                    epsabs=settings.abs_tol, epsrel=settings.rel_tol,
                    limit=settings.max_subdivisions,
                )
                total += val
                err += e
    target = max(settings.abs_tol, settings.rel_tol * abs(total)) * settings.slack
    if err > max(target, 1e-30):
        raise QuadratureError("mu-integral did not converge", achieved=err)
    return total


def _pk_integrand(x, k: float, th: float):
    """theta/(x+theta) * prod_{l=1}^k (l-1+x)/(l+x+theta), via log-Gamma."""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        val = th * np.exp(gammaln(x + th) - gammaln(x) + gammaln(k + x) - gammaln(k + x + 1 + th))
    return np.where(x > 0, val, 0.0)[()]


def limit_pk(ctx: TheoryContext, k: int) -> float:
    """Limiting degree probability p(k)."""
    if k < 0:
        raise ValueError("k must be >= 0")
    th = ctx.require_finite_theta()
    if isinstance(ctx.spec, Deterministic):
        return float(_pk_integrand(ctx.spec.c, k, th))
    bumps = (1.0, float(k) + th + 1.0, 10.0 * (k + 1.0))
    return _integrate_mu(ctx.spec, lambda x: _pk_integrand(x, k, th),
                         ctx.quadrature, breakpoints=bumps)


def limit_gamma_k(ctx: TheoryContext, k: int, bin: tuple[float, float]) -> float:
    """Mass of Gamma^(k) on the half-open fitness bin (f, f']."""
    f_lo, f_hi = bin
    if not f_lo < f_hi:
        raise ValueError("need f < f' for the bin")
    th = ctx.require_finite_theta()
    if isinstance(ctx.spec, Deterministic):
        c = ctx.spec.c
        return float(_pk_integrand(c, k, th)) if f_lo < c <= f_hi else 0.0
    bumps = (1.0, float(k) + th + 1.0)
    return _integrate_mu(ctx.spec, lambda x: _pk_integrand(x, k, th),
                         ctx.quadrature, lo=f_lo, hi=f_hi, breakpoints=bumps)


def limit_gamma_mass(ctx: TheoryContext, bin: tuple[float, float]) -> float:
    """Mass of the size-biased limit Gamma(dx) = x/(theta-1) mu(dx) on (f, f']."""
    f_lo, f_hi = bin
    if not f_lo < f_hi:
        raise ValueError("need f < f' for the bin")
    th = ctx.require_finite_theta()
    if th <= 1.0:
        raise RegimeError("size-biased measure needs theta > 1")
    if isinstance(ctx.spec, Deterministic):
        c = ctx.spec.c
        return c / (th - 1.0) if f_lo < c <= f_hi else 0.0
    return _integrate_mu(ctx.spec, lambda x: x / (th - 1.0), ctx.quadrature,
                         lo=f_lo, hi=f_hi)


def weak_tail_constant(ctx: TheoryContext) -> float:
    """C = theta * E[Gamma(F+theta)/Gamma(F)]; requires E[F**theta] < inf."""
    th = ctx.require_finite_theta()
    if not ctx.spec.moment_is_finite(th):
        raise RegimeError("weak-disorder constant needs E[F**theta_m] < infinity")
    func = lambda x: np.exp(gammaln(x + th) - gammaln(x))
    if isinstance(ctx.spec, Deterministic):
        return th * float(func(ctx.spec.c))
    return th * _integrate_mu(ctx.spec, func, ctx.quadrature, breakpoints=(1.0, 100.0))


# -----------------------------------------------------------------------------
# Normalization sequences and martingales
# -----------------------------------------------------------------------------

def c_sequence_path(prefix_sums, k: float, m: int, n0: int, m0: int):
    """Log of the normalization sequences along the whole trajectory.

    ``prefix_sums[j-1]`` must equal S_j = F_1 + ... + F_j; entry t of each
    returned array is log c^k_{n0+t} (so t = 0 is the empty product).
    Returns (log_c, log_c_tilde) for n = n0 .. len(prefix_sums)+1.
    """
    S = np.asarray(prefix_sums, dtype=float)[n0 - 1:]
    j = np.arange(n0, n0 + len(S), dtype=float)
    base = m0 + m * (j - n0) + k + S
    if np.any(base + (m - 1) <= 0) or np.any(base <= 0):
        raise ValueError("nonpositive denominator: k outside the valid domain")
    logs = np.zeros(len(S))
    for ell in range(m):
        d = base + ell
        factor = 1.0 - k / d
        if np.any(factor <= 0):
            raise ValueError("nonpositive factor: k outside the valid domain")
        logs += np.log1p(-k / d)
    log_ct = m * np.log1p(-k / base)
    log_c = np.concatenate([[0.0], np.cumsum(logs)])
    log_ct = np.concatenate([[0.0], np.cumsum(log_ct)])
    return log_c, log_ct


def c_sequence(prefix_sums, k: float, m: int, n0: int, m0: int, n: int):
    """(c_n^k, c_tilde_n^k) for a single n, from the fitness prefix sums."""
    if n < n0:
        raise ValueError("n must be >= n0")
    if k == 0:
        return 1.0, 1.0
    if n - 1 > len(prefix_sums):
        raise ValueError("prefix_sums too short: need S_j up to j = n-1")
    log_c, log_ct = c_sequence_path(prefix_sums[: n - 1], k, m, n0, m0)
    t = n - n0
    return float(np.exp(log_c[t])), float(np.exp(log_ct[t]))


def log_gen_binom(a: float, b: float) -> float:
    """log of the generalized binomial Gamma(a+1)/(Gamma(b+1)Gamma(a-b+1))."""
    if a <= -1 or b <= -1 or a - b <= -1:
        raise ValueError("generalized binomial needs a, b, a-b > -1")
    return float(gammaln(a + 1.0) - gammaln(b + 1.0) - gammaln(a - b + 1.0))


def martingale_value(state, i: int, k: float, model: Optional[ModelKind] = None) -> float:
    """M^k_n(i) = c^k_n * binom(Z_n(i) + F_i + k - 1, k).

    PAFFD uses the power-of-m normalization (supermartingale) except at
    k = 1, where the per-half-edge product makes the value an exact
    martingale; PAFRO/PAFUD always use the per-half-edge product.
    """
    model = model or state.model
    if k == 0:
        return 1.0
    fit = np.asarray([float(f) for f in state.fitness[: state.n]])
    f_i = fit[i - 1]
    if not k > -min(f_i, 1.0):
        raise ValueError(f"k={k} outside the domain k > -min(F_i, 1)")
    prefix = np.cumsum(fit)
    log_c, log_ct = c_sequence_path(prefix, float(k), model.m, state.n0, state.m0)
    use_tilde = model.family == PAFFD and k != 1
    log_norm = (log_ct if use_tilde else log_c)[state.n - state.n0]
    x = float(state.indeg[i - 1]) + f_i
    return float(np.exp(log_norm + log_gen_binom(x + k - 1.0, k)))


def conditional_mean_degree(fitness, seed_indeg, i: int, n: int, m: int) -> float:
    """Fitness-conditional expected in-degree E_F[Z_n(i)].

    Exact for all three dynamics via the level-one martingale:
    (c^1_{i v n0}/c^1_n) Z_{i v n0}(i) + F_i (c^1_{i v n0}/c^1_n - 1),
    with Z_{i v n0}(i) = 0 for i > n0 and the seed in-degree otherwise.
    """
    n0 = len(seed_indeg)
    m0 = int(sum(seed_indeg))
    fit = np.asarray([float(f) for f in fitness], dtype=float)
    if len(fit) < max(n - 1, n0):
        raise ValueError("need fitness for vertices 1..n-1 at least")
    if not 1 <= i <= n:
        raise ValueError("need 1 <= i <= n")
    prefix = np.cumsum(fit)
    log_c, _ = c_sequence_path(prefix, 1.0, m, n0, m0)
    start = max(i, n0)
    ratio = float(np.exp(log_c[start - n0] - log_c[n - n0]))
    z_start = float(seed_indeg[i - 1]) if i <= n0 else 0.0
    return ratio * z_start + float(fit[i - 1]) * (ratio - 1.0)


class TailPrediction(NamedTuple):
    """Predicted decay exponent of p(k), with the slowly-varying caveat."""

    exponent: float
    log_correction: bool
    regime: Regime


def tail_exponent_prediction(ctx: TheoryContext) -> TailPrediction:
    """Exponent tau with p(k) ~ k**(-tau): 1+theta_m (weak), alpha (strong).

    At the strong/weak boundary alpha = 1 + theta_m the power is 1+theta_m
    times the diverging slowly-varying factor ell*(k), flagged here.
    Extreme disorder has no stationary p(k) claim.
    """
    regime = ctx.regime
    if regime == Regime.WEAK:
        return TailPrediction(1.0 + ctx.require_finite_theta(), False, regime)
    if regime == Regime.STRONG_BOUNDARY:
        return TailPrediction(1.0 + ctx.require_finite_theta(), True, regime)
    if regime == Regime.STRONG:
        return TailPrediction(float(ctx.spec.alpha), False, regime)
    raise RegimeError(f"no tail-exponent prediction in regime {regime.value}")


def ell_star(spec: FitnessSpec, k: float,
             settings: QuadratureSettings = QuadratureSettings()) -> float:
    """ell*(k) = integral_1^k ell(x)/x dx for the power-law families."""
    if k <= 1:
        return 0.0
    from .fitness import LogPareto, ParetoTail
    if isinstance(spec, ParetoTail):
        return spec.c * math.log(k)
    if isinstance(spec, LogPareto):
        val, _ = integrate.quad(
            lambda x: spec.c * math.log(math.e + x) ** spec.gamma / x, 1.0, k,
            epsabs=settings.abs_tol, epsrel=settings.rel_tol, limit=settings.max_subdivisions)
        return val
    raise ValueError("ell* is defined for the power-law fitness families")
