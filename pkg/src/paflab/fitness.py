"""Fitness distributions for preferential attachment with additive fitness.

A fitness law ``mu`` lives on (0, inf).  The heavy-tailed families carry a
regularly-varying tail  P(F >= x) = ell(x) * x**(-beta)  with ``beta`` the
tail index (``alpha = beta + 1`` in the degree-distribution phase diagram)
and ``ell`` restricted to the two implemented shapes: a constant, and
``c * log(e + x)**gamma``.

Conventions
-----------
* ``tail_prob`` returns P(F >= x) with the closed convention at atoms:
  the tail equals 1 for every x at or below the essential infimum.  In
  particular ``Deterministic(c).tail_prob(c) == 1``.
* Sampling is by inverse transform on the tail: a uniform draw ``u`` maps
  to the largest x with P(F >= x) >= u.  A fixed uniform stream therefore
  yields bit-identical fitness values on every platform.
* ``quantile_u(spec, n)`` is the extreme-value normalization
  u_n = inf{t : P(F >= t) <= 1/n}, clamped at the essential infimum.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy import integrate, optimize

__all__ = [
    "FitnessSpec",
    "Deterministic",
    "ParetoTail",
    "LogPareto",
    "Uniform",
    "Exponential",
    "Regime",
    "sample_fitness",
    "tail_prob",
    "quantile_u",
    "theta",
    "classify_regime",
    "spec_from_dict",
]

ArrayLike = Union[float, np.ndarray]


class Regime(enum.Enum):
    """Disorder regime of a fitness law relative to theta_m."""

    WEAK = "Weak"
    STRONG = "Strong"
    STRONG_BOUNDARY = "StrongBoundary"
    EXTREME = "Extreme"
    UNCLASSIFIED = "Unclassified"


@dataclass(frozen=True)
class FitnessSpec:
    """Base class; concrete laws override the tail, quantile and moments."""

    kind = "abstract"

    # -- tail / quantile ---------------------------------------------------
    def tail_prob(self, x: ArrayLike) -> ArrayLike:
        raise NotImplementedError

    def quantile(self, u: ArrayLike) -> ArrayLike:
        """Inverse tail: largest x with P(F >= x) >= u, for u in (0, 1]."""
        raise NotImplementedError

    def sample(self, rng: np.random.Generator, size=None) -> ArrayLike:
        return self.quantile(rng.random(size))

    # -- moments -----------------------------------------------------------
    def mean(self) -> float:
        raise NotImplementedError

    def moment_is_finite(self, s: float) -> bool:
        """Whether E[F**s] < infinity."""
        raise NotImplementedError

    # -- structure used by quadrature ---------------------------------------
    @property
    def alpha(self):
        """Tail exponent alpha = beta + 1 for power-law families, else None."""
        return None

    def support(self) -> tuple[float, float]:
        """Interval carrying the continuous part of mu."""
        raise NotImplementedError

    def atom(self):
        """(location, mass) of the point mass, or None."""
        return None

    def pdf(self, x: ArrayLike) -> ArrayLike:
        """Density of the continuous part of mu."""
        raise NotImplementedError

    def essential_infimum(self) -> float:
        return self.support()[0]

    # -- serialization -------------------------------------------------------
    def to_dict(self) -> dict:
        d = {"kind": self.kind}
        d.update({k: float(v) for k, v in self.__dict__.items()})
        return d

    def label(self) -> str:
        params = ",".join(f"{k}={v:g}" for k, v in self.__dict__.items())
        return f"{self.kind}({params})"


@dataclass(frozen=True)
class Deterministic(FitnessSpec):
    """Point mass at c > 0."""

    c: float
    kind = "Deterministic"

    def __post_init__(self):
        if not self.c > 0:
            raise ValueError("Deterministic fitness requires c > 0")

    def tail_prob(self, x):
        return np.where(np.asarray(x) <= self.c, 1.0, 0.0)[()]

    def quantile(self, u):
        return np.full_like(np.asarray(u, dtype=float), self.c)[()]

    def mean(self):
        return self.c

    def moment_is_finite(self, s):
        return True

    def support(self):
        return (self.c, self.c)

    def atom(self):
        return (self.c, 1.0)

    def pdf(self, x):
        return np.zeros_like(np.asarray(x, dtype=float))[()]


@dataclass(frozen=True)
class ParetoTail(FitnessSpec):
    """Pure power tail: P(F >= x) = c * x**(-beta) for x > xmin.

    When c * xmin**(-beta) < 1 the remaining mass sits as an atom at xmin.
    """

    beta: float
    xmin: float = 1.0
    c: float = 1.0
    kind = "ParetoTail"

    def __post_init__(self):
        if not (self.beta > 0 and self.xmin > 0 and self.c > 0):
            raise ValueError("ParetoTail requires beta, xmin, c > 0")
        if self.c * self.xmin ** (-self.beta) > 1.0 + 1e-12:
            raise ValueError("ParetoTail tail exceeds 1 at xmin; need c*xmin**-beta <= 1")

    @property
    def _q0(self) -> float:
        return min(1.0, self.c * self.xmin ** (-self.beta))

    def tail_prob(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore"):
            t = np.where(x <= self.xmin, 1.0, self.c * x ** (-self.beta))
        return t[()]

    def quantile(self, u):
        u = np.asarray(u, dtype=float)
        x = (self.c / u) ** (1.0 / self.beta)
        return np.maximum(x, self.xmin)[()]

    def mean(self):
        if self.beta <= 1:
            return math.inf
        # E[F] = integral of the tail = xmin + c*xmin**(1-beta)/(beta-1)
        return self.xmin + self.c * self.xmin ** (1.0 - self.beta) / (self.beta - 1.0)

    def moment_is_finite(self, s):
        return s < self.beta

    @property
    def alpha(self):
        return self.beta + 1.0

    def support(self):
        return (self.xmin, math.inf)

    def atom(self):
        mass = 1.0 - self._q0
        return (self.xmin, mass) if mass > 0 else None

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        d = np.where(x >= self.xmin, self.beta * self.c * x ** (-self.beta - 1.0), 0.0)
        return d[()]


@dataclass(frozen=True)
class LogPareto(FitnessSpec):
    """Power tail with logarithmic slowly-varying factor.

    P(F >= x) = c * log(e + x)**gamma * x**(-beta) where that is <= 1;
    the tail is clamped at 1 below the crossing point x0 >= xmin.
    """

    beta: float
    xmin: float = 1.0
    gamma: float = 1.0
    c: float = 1.0
    kind = "LogPareto"

    def __post_init__(self):
        if not (self.beta > 0 and self.xmin > 0 and self.gamma > 0 and self.c > 0):
            raise ValueError("LogPareto requires beta, xmin, gamma, c > 0")
        # h must be nonincreasing on [xmin, inf):  gamma*x <= beta*(e+x)*log(e+x)
        res = optimize.minimize_scalar(
            lambda x: self.beta * (math.e + x) * math.log(math.e + x) / x,
            bounds=(self.xmin, max(100.0, 10 * self.xmin)),
            method="bounded",
        )
        if self.gamma > res.fun + 1e-12:
            raise ValueError("LogPareto tail not monotone: gamma too large for beta")
        object.__setattr__(self, "_x0", self._solve_x0())

    def _h(self, x):
        return self.c * np.log(math.e + x) ** self.gamma * x ** (-self.beta)

    def _solve_x0(self) -> float:
        if self._h(self.xmin) <= 1.0:
            return self.xmin
        hi = self.xmin
        while self._h(hi) > 1.0:
            hi *= 2.0
        return optimize.brentq(lambda x: self._h(x) - 1.0, self.xmin, hi, xtol=1e-14)

    def tail_prob(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x <= self._x0, 1.0, np.minimum(1.0, self._h(x)))[()]

    def quantile(self, u):
        scalar = np.ndim(u) == 0
        u = np.atleast_1d(np.asarray(u, dtype=float))
        lo = np.full(u.shape, self._x0)
        hi = np.full(u.shape, self._x0)
        # bracket then bisect componentwise on the monotone tail
        need = self._h(hi) > u
        while need.any():
            hi = np.where(need, hi * 2.0, hi)
            need = self._h(hi) > u
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            above = self._h(mid) >= u
            lo = np.where(above, mid, lo)
            hi = np.where(above, hi, mid)
        out = np.where(u >= self._h(self._x0), self._x0, lo)
        return float(out[0]) if scalar else out

    def mean(self):
        if self.beta <= 1:
            return math.inf
        tail_int, _ = integrate.quad(self._h, self._x0, np.inf, limit=200)
        return self._x0 + tail_int

    def moment_is_finite(self, s):
        return s < self.beta  # gamma > 0 makes the boundary moment infinite

    @property
    def alpha(self):
        return self.beta + 1.0

    def support(self):
        return (self._x0, math.inf)

    def atom(self):
        mass = 1.0 - float(self._h(self._x0))
        return (self._x0, mass) if mass > 1e-15 else None

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        lg = np.log(math.e + x)
        d = self.c * lg ** (self.gamma - 1.0) * x ** (-self.beta - 1.0) * (
            self.beta * lg - self.gamma * x / (math.e + x)
        )
        return np.where(x >= self._x0, d, 0.0)[()]

    def to_dict(self):
        return {"kind": self.kind, "beta": self.beta, "xmin": self.xmin,
                "gamma": self.gamma, "c": self.c}

    def label(self):
        return f"LogPareto(beta={self.beta:g},xmin={self.xmin:g},gamma={self.gamma:g},c={self.c:g})"


@dataclass(frozen=True)
class Uniform(FitnessSpec):
    """Uniform on (a, b) with 0 < a < b (a = 0 allowed as open endpoint)."""

    a: float
    b: float
    kind = "Uniform"

    def __post_init__(self):
        if not (self.a >= 0 and self.a < self.b):
            raise ValueError("Uniform requires 0 <= a < b")

    def tail_prob(self, x):
        x = np.asarray(x, dtype=float)
        return np.clip((self.b - x) / (self.b - self.a), 0.0, 1.0)[()]

    def quantile(self, u):
        u = np.asarray(u, dtype=float)
        return (self.b - u * (self.b - self.a))[()]

    def mean(self):
        return 0.5 * (self.a + self.b)

    def moment_is_finite(self, s):
        return True

    def support(self):
        return (self.a, self.b)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        inside = (x >= self.a) & (x <= self.b)
        return np.where(inside, 1.0 / (self.b - self.a), 0.0)[()]


@dataclass(frozen=True)
class Exponential(FitnessSpec):
    """Exponential with rate lambda > 0."""

    rate: float
    kind = "Exponential"

    def __post_init__(self):
        if not self.rate > 0:
            raise ValueError("Exponential requires rate > 0")

    def tail_prob(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x <= 0, 1.0, np.exp(-self.rate * x))[()]

    def quantile(self, u):
        u = np.asarray(u, dtype=float)
        return (-np.log(u) / self.rate)[()]

    def mean(self):
        return 1.0 / self.rate

    def moment_is_finite(self, s):
        return True

    def support(self):
        return (0.0, math.inf)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x >= 0, self.rate * np.exp(-self.rate * x), 0.0)[()]


_KINDS = {cls.kind: cls for cls in (Deterministic, ParetoTail, LogPareto, Uniform, Exponential)}


def spec_from_dict(d: dict) -> FitnessSpec:
    """Build a spec from its JSON form, e.g. {"kind": "ParetoTail", "beta": 1.5, ...}."""
    d = dict(d)
    kind = d.pop("kind")
    try:
        cls = _KINDS[kind]
    except KeyError:
        raise ValueError(f"unknown fitness kind {kind!r}") from None
    return cls(**d)


# ---------------------------------------------------------------------------
# Operations (free-function form mirrors the rest of the package)
# ---------------------------------------------------------------------------

def sample_fitness(spec: FitnessSpec, rng: np.random.Generator, size=None):
    """Draw from mu by inverse transform on the tail; reproducible per stream."""
    return spec.sample(rng, size)


def tail_prob(spec: FitnessSpec, x):
    return spec.tail_prob(x)


def quantile_u(spec: FitnessSpec, n: int) -> float:
    """Extreme value normalization u_n = inf{t : P(F >= t) <= 1/n}.

    Clamped at the essential infimum so that u_1 is finite; for a pure
    Pareto tail with c = 1 this is n**(1/beta).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    u = 1.0 / n
    lo = spec.essential_infimum()
    if isinstance(spec, Deterministic):
        return spec.c
    if isinstance(spec, ParetoTail):
        return max(lo, (spec.c * n) ** (1.0 / spec.beta))
    if isinstance(spec, Uniform):
        return max(lo, spec.b - (spec.b - spec.a) * u)
    if isinstance(spec, Exponential):
        return math.log(n) / spec.rate
    # LogPareto: bisection on the monotone tail
    return float(max(lo, np.asarray(spec.quantile(u))))


def theta(spec: FitnessSpec, m: int) -> float:
    """theta_m = 1 + E[F]/m; returns math.inf when the mean diverges."""
    if m < 1:
        raise ValueError("m must be >= 1")
    mu = spec.mean()
    return math.inf if math.isinf(mu) else 1.0 + mu / m


def classify_regime(spec: FitnessSpec, m: int) -> Regime:
    """Phase of the degree-distribution tail for this fitness law.

    Weak      : E[F**(theta_m + eps)] < inf for some eps > 0
    Strong    : power law with alpha in (2, 1 + theta_m)
    StrongBoundary : alpha = 1 + theta_m with the theta_m-th moment infinite
    Extreme   : power law with alpha in (1, 2), i.e. infinite mean
    """
    th = theta(spec, m)
    a = spec.alpha
    if a is None:
        # bounded or light-tailed families: all moments finite
        return Regime.WEAK
    if math.isinf(th):
        return Regime.EXTREME if 1.0 < a < 2.0 else Regime.UNCLASSIFIED
    boundary = 1.0 + th
    if math.isclose(a, boundary, rel_tol=1e-12, abs_tol=1e-12):
        # the boundary moment E[F**theta_m] diverges for both tail families
        return Regime.STRONG_BOUNDARY
    if a > boundary:
        return Regime.WEAK
    if 2.0 < a < boundary:
        return Regime.STRONG
    if 1.0 < a < 2.0:
        return Regime.EXTREME
    return Regime.UNCLASSIFIED
