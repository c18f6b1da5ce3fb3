"""Exact one-step transition laws on small graphs.

Ground truth for the growth dynamics: enumerates the distribution of the
in-degree increment vector for one growth step, then checks the
normalized-binomial (super/sub)martingale identities, negative quadrant
dependence, and the mean/variance structure of the increments against it.

When every fitness value (and the exponent k) is a rational number, all
probabilities and residuals are computed with ``fractions.Fraction`` so
the identities are verified without floating-point noise.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

from .graph_engine import PAFFD, PAFRO_BERNOULLI, PAFRO_SINGLE_EDGE, PAFUD, ModelKind

__all__ = [
    "ExactState",
    "StepDistribution",
    "NqdResult",
    "AssumptionReport",
    "EnumerationGuardError",
    "enumerate_step",
    "verify_martingale",
    "verify_nqd",
    "verify_assumptions",
    "small_state_family",
]

ENUMERATION_GUARD = 10 ** 6

Number = Union[int, Fraction, float]


class EnumerationGuardError(RuntimeError):
    """Raised when a state would require more than the outcome budget."""


@dataclass(frozen=True)
class ExactState:
    """Minimal state for oracle work; fitness entries may be Fractions."""

    model: ModelKind
    n0: int
    m0: int
    fitness: tuple
    indeg: tuple

    @property
    def n(self) -> int:
        return len(self.indeg)


@dataclass(frozen=True)
class StepDistribution:
    """Distribution of the increment vector over [n] for one growth step."""

    outcomes: tuple  # ((dz tuple, probability), ...)
    exact: bool

    def prob_sum(self):
        return sum(p for _, p in self.outcomes)

    def marginal(self, i: int) -> dict:
        """Law of the increment of 1-based vertex i."""
        law: dict = {}
        for dz, p in self.outcomes:
            law[dz[i - 1]] = law.get(dz[i - 1], 0) + p
        return law

    def mean_increment(self, i: int):
        return sum(dz[i - 1] * p for dz, p in self.outcomes)


def _exact_inputs(state, k: Number = 0) -> bool:
    ok_types = (int, Fraction)
    return all(isinstance(f, ok_types) for f in _fitness_list(state)) and isinstance(k, ok_types)


def _fitness_list(state):
    return [state.fitness[i] for i in range(state.n)]


def _weights_and_denominator(state, exact: bool):
    conv = (lambda v: Fraction(v)) if exact else float
    fit = [conv(f) for f in _fitness_list(state)]
    w = [state.indeg[i] + fit[i] for i in range(state.n)]
    S = sum(fit)
    fam = state.model.family
    if fam == PAFRO_BERNOULLI or fam == PAFRO_SINGLE_EDGE:
        denom = state.m0 + (state.n - state.n0) + S
    else:
        denom = state.m0 + state.model.m * (state.n - state.n0) + S
    return w, denom


def _outcome_count(state) -> int:
    n, m = state.n, state.model.m
    fam = state.model.family
    if fam == PAFFD:
        return math.comb(n + m - 1, m)
    if fam == PAFUD:
        return n ** m
    if fam == PAFRO_SINGLE_EDGE:
        return n
    return 2 ** n


def enumerate_step(state) -> StepDistribution:
    """Exact law of (Delta Z_n(i), i in [n]) for one growth step.

    Works on any object exposing model, n, n0, m0, fitness, indeg --
    both ``GraphState`` (float mode) and ``ExactState`` (rational mode
    when the fitness values are rationals).
    """
    if _outcome_count(state) > ENUMERATION_GUARD:
        raise EnumerationGuardError(
            f"{_outcome_count(state)} outcomes exceed the {ENUMERATION_GUARD} budget")
    exact = _exact_inputs(state)
    w, denom = _weights_and_denominator(state, exact)
    n, m = state.n, state.model.m
    fam = state.model.family
    outcomes: list = []

    if fam == PAFRO_SINGLE_EDGE:
        for i in range(n):
            dz = tuple(1 if j == i else 0 for j in range(n))
            outcomes.append((dz, w[i] / denom))

    elif fam == PAFRO_BERNOULLI:
        probs = [w[i] / denom for i in range(n)]
        for bits in itertools.product((0, 1), repeat=n):
            p = 1 if exact else 1.0
            for i, b in enumerate(bits):
                p *= probs[i] if b else (1 - probs[i])
            outcomes.append((bits, p))

    elif fam == PAFFD:
        probs = [w[i] / denom for i in range(n)]
        for combo in itertools.combinations_with_replacement(range(n), m):
            counts = [0] * n
            for i in combo:
                counts[i] += 1
            coeff = math.factorial(m)
            p = Fraction(coeff) if exact else float(coeff)
            for i, c in enumerate(counts):
                if c:
                    p *= probs[i] ** c / math.factorial(c)
            outcomes.append((tuple(counts), p))

    else:  # PAFUD: sequential draws with updating weights and denominator
        acc: dict = {}

        def descend(weights, d, depth, counts, prob):
            if depth == m:
                key = tuple(counts)
                acc[key] = acc.get(key, 0) + prob
                return
            for i in range(n):
                p_i = prob * weights[i] / d
                counts[i] += 1
                weights[i] += 1
                descend(weights, d + 1, depth + 1, counts, p_i)
                counts[i] -= 1
                weights[i] -= 1

        one = Fraction(1) if exact else 1.0
        descend(list(w), denom, 0, [0] * n, one)
        outcomes = list(acc.items())

    outcomes.sort(key=lambda item: item[0])
    return StepDistribution(outcomes=tuple(outcomes), exact=exact)


# -----------------------------------------------------------------------------
# Martingale verification
# -----------------------------------------------------------------------------

def _c_ratio_one_step(state, k: Number, exact: bool):
    """c^k_{n+1} / c^k_n for the model's normalization sequence.

    PAFRO/PAFUD use the per-half-edge product; PAFFD uses the power-of-m
    variant except at k = 1, where the plain product makes the level-one
    quantity an exact martingale.
    """
    w, denom = _weights_and_denominator(state, exact)
    m = state.model.m
    fam = state.model.family
    if fam in (PAFRO_BERNOULLI, PAFRO_SINGLE_EDGE):
        return denom / (denom + k)
    if fam == PAFUD or k == 1:
        r = Fraction(1) if exact else 1.0
        for j in range(m):
            r *= (denom + j) / (denom + j + k)
        return r
    return (denom / (denom + k)) ** m


def verify_martingale(state, i: int, k: Number, relative: bool = False,
                      dist: Optional[StepDistribution] = None):
    """Signed one-step residual E[M^k_{n+1}(i) | G_n] - M^k_n(i).

    Exactly zero for PAFRO/PAFUD (and for PAFFD at k = 1); nonpositive for
    PAFFD with k >= 0 and nonnegative for k in (-min(F_i,1), 0).  With
    ``relative=True`` the residual is reported as a multiple of M^k_n(i),
    an exact rational in rational mode.  Pass a precomputed ``dist`` when
    sweeping many (i, k) pairs on one state.
    """
    exact = _exact_inputs(state, k)
    fit = _fitness_list(state)
    f_i = Fraction(fit[i - 1]) if exact and not isinstance(fit[i - 1], Fraction) else fit[i - 1]
    min_f = f_i if f_i < 1 else 1
    if not k > -min_f:
        raise ValueError(f"k={k} outside the domain k > -min(F_i, 1)")
    X = state.indeg[i - 1] + f_i
    if dist is None:
        dist = enumerate_step(state)
    law = dist.marginal(i)
    one = Fraction(1) if exact else 1.0
    ratio_mean = 0
    for d, p in law.items():
        r = one
        for ell in range(d):
            r = r * (X + k + ell) / (X + ell)
        ratio_mean += p * r
    rel = _c_ratio_one_step(state, k, exact) * ratio_mean - 1
    if relative:
        return rel
    from .theory import martingale_value
    return float(rel) * martingale_value(state, i, k)


# -----------------------------------------------------------------------------
# Dependence structure and increment assumptions
# -----------------------------------------------------------------------------

@dataclass(frozen=True)
class NqdResult:
    """Worst lower-orthant violation: max over pairs of joint - product."""

    worst: Number
    pairs_checked: int

    @property
    def empty(self) -> bool:
        return self.pairs_checked == 0


def verify_nqd(state, dist: Optional[StepDistribution] = None) -> NqdResult:
    """Negative quadrant dependence of the increments.

    For every ordered pair i != j and thresholds k, l the joint lower
    probability P(dZ_i <= k, dZ_j <= l) must not exceed the product of the
    marginals.  Nonpositive for PAFFD/PAFUD, exactly zero for independent
    Bernoulli increments.  Thresholds at or above the maximal increment
    make both sides equal and are skipped so they cannot mask a violation
    in the informative range.
    """
    if dist is None:
        dist = enumerate_step(state)
    n = state.n
    if n < 2:
        return NqdResult(worst=0, pairs_checked=0)
    m_top = max(max(dz) for dz, _ in dist.outcomes)
    thresholds = range(max(m_top, 1))
    worst = None
    pairs = 0
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            pairs += 1
            for ki in thresholds:
                for lj in thresholds:
                    joint = sum(p for dz, p in dist.outcomes if dz[i] <= ki and dz[j] <= lj)
                    pi = sum(p for dz, p in dist.outcomes if dz[i] <= ki)
                    pj = sum(p for dz, p in dist.outcomes if dz[j] <= lj)
                    v = joint - pi * pj
                    if worst is None or v > worst:
                        worst = v
    return NqdResult(worst=worst, pairs_checked=pairs)


@dataclass(frozen=True)
class AssumptionReport:
    """Residuals of the increment-structure assumptions on one state.

    a1_residual checks the literal mean identity with denominator
    n * Fbar = sum_i (Z_n(i) + F_i); a1_model_residual checks against the
    model's own denominator (times m), which is the form the dynamics
    actually satisfy.  The two coincide only when the realized edge count
    matches the deterministic one, which is why both are reported for the
    Bernoulli variant.
    """

    a1_residual: float
    a1_model_residual: float
    a2_ratio: float
    a2_per_vertex: tuple
    a3_value: float
    a5_violation: Number
    denominators_differ: bool


def verify_assumptions(state, dist: Optional[StepDistribution] = None) -> AssumptionReport:
    if dist is None:
        dist = enumerate_step(state)
    exact = dist.exact
    w, denom = _weights_and_denominator(state, exact)
    n, m = state.n, state.model.m
    total_w = sum(w)

    a1 = 0.0
    a1_model = 0.0
    a2_list = []
    a3 = 0.0
    for i in range(1, n + 1):
        law = dist.marginal(i)
        mean = sum(d * p for d, p in law.items())
        var = sum((d - mean) ** 2 * p for d, p in law.items())
        a1 = max(a1, abs(float(mean - w[i - 1] / total_w)))
        model_mean = m * w[i - 1] / denom
        if state.model.family == PAFRO_BERNOULLI:
            model_mean = w[i - 1] / denom
        a1_model = max(a1_model, abs(float(mean - model_mean)))
        a2_list.append(var / mean)
        p_one = law.get(1, 0)
        a3 = max(a3, abs(float(p_one - mean)))
    a5 = verify_nqd(state, dist)
    return AssumptionReport(
        a1_residual=a1,
        a1_model_residual=a1_model,
        a2_ratio=float(max(a2_list)),
        a2_per_vertex=tuple(a2_list),
        a3_value=n * a3,
        a5_violation=a5.worst,
        denominators_differ=bool(total_w != denom),
    )


# -----------------------------------------------------------------------------
# The small-state family driven by the verification suites
# -----------------------------------------------------------------------------

_FITNESS_PATTERNS = (
    (1, 1, 1, 1, 1, 1),
    (1, Fraction(3, 2), 2, 1, Fraction(3, 2), 2),
    (2, 2, Fraction(3, 2), Fraction(3, 2), 1, 1),
)


def small_state_family(max_n: int = 6, m_values: Sequence[int] = (1, 2, 3)):
    """Deterministically grown small states for all four dynamics.

    Rational fitness values cycle through {1, 3/2, 2}; each lineage starts
    from a path or star seed and adds vertices with edge targets chosen
    round-robin, so every yielded state is a reachable configuration with
    exact edge-count bookkeeping.  Yields ExactState objects with n <= max_n.
    """
    models = [ModelKind.pafud(m) for m in m_values]
    models += [ModelKind.paffd(m) for m in m_values]
    models += [ModelKind.pafro_single(), ModelKind.pafro_bernoulli()]
    seeds = ((2, "path"), (3, "star"))
    for model in models:
        for n0, topo in seeds:
            if topo == "path":
                seed_indeg = [1 if i < n0 - 1 else 0 for i in range(n0)]
            else:
                seed_indeg = [n0 - 1] + [0] * (n0 - 1)
            m0 = sum(seed_indeg)
            for pattern in _FITNESS_PATTERNS:
                fitness = tuple(pattern[i % len(pattern)] for i in range(max_n))
                yield ExactState(model, n0, m0, fitness[:n0], tuple(seed_indeg))
                indeg = list(seed_indeg)
                n = n0
                while n < max_n:
                    if model.is_pafro:
                        targets = [(n + 1) % n]
                    else:
                        targets = [(n + j) % n for j in range(model.m)]
                    for t in targets:
                        indeg[t] += 1
                    indeg.append(0)
                    n += 1
                    yield ExactState(model, n0, m0, fitness[:n], tuple(indeg))
