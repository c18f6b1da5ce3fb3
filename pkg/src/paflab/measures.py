"""Empirical observables of a growing graph.

Computes the empirical degree distribution p_n(k), the fitness-weighted
measure Gamma_n and its per-degree slices Gamma_n^(k), extremal statistics
(max degree, argmax vertex with smallest-index tie-break), the fraction of
vertices whose degree never grew past the seed value, plus two generic
statistical tools used throughout the verification suites: the Hill tail
index estimator and Kolmogorov-Smirnov distances.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional

import numpy as np

__all__ = [
    "EmpiricalSummary",
    "GammaBinned",
    "summarize",
    "empirical_pk",
    "empirical_gamma",
    "max_degree",
    "unchanged_fraction",
    "geometric_bins",
    "hill_estimator",
    "ks_statistic",
    "ks_two_sample",
]

DEFAULT_K_MAX = 64
GEOMETRIC_RATIO = 2.0 ** 0.25


@dataclass
class GammaBinned:
    """Mass of a fitness-binned measure; bins are half-open (edge, edge']."""

    edges: np.ndarray
    masses: np.ndarray
    overflow_mass: float = 0.0

    @property
    def has_overflow(self) -> bool:
        return self.overflow_mass > 0.0

    @property
    def total(self) -> float:
        return float(np.sum(self.masses)) + self.overflow_mass


@dataclass
class EmpiricalSummary:
    """Per-checkpoint snapshot of the degree/fitness landscape."""

    n: int
    pk_hist: Dict[int, float]
    max_degree: int
    argmax_index: int
    zero_indegree_fraction: float
    S_n: float
    gamma: Optional[GammaBinned] = None
    gamma_k: Dict[int, np.ndarray] = field(default_factory=dict)

    def to_rows(self):
        """Long-format rows (n, stat_name, key, value)."""
        rows = [
            (self.n, "max_degree", "", float(self.max_degree)),
            (self.n, "argmax_index", "", float(self.argmax_index)),
            (self.n, "zero_indegree_fraction", "", self.zero_indegree_fraction),
            (self.n, "S_n", "", self.S_n),
        ]
        for k in sorted(self.pk_hist):
            rows.append((self.n, "p_n", str(k), self.pk_hist[k]))
        if self.gamma is not None:
            for b, mass in enumerate(self.gamma.masses):
                rows.append((self.n, "gamma", str(b), float(mass)))
            if self.gamma.has_overflow:
                rows.append((self.n, "gamma", "overflow", self.gamma.overflow_mass))
        for k in sorted(self.gamma_k):
            for b, mass in enumerate(self.gamma_k[k]):
                rows.append((self.n, "gamma_k", f"{k}:{b}", float(mass)))
        return rows

    def to_json(self) -> str:
        doc = {
            "n": self.n,
            "pk_hist": {str(k): v for k, v in self.pk_hist.items()},
            "max_degree": self.max_degree,
            "argmax_index": self.argmax_index,
            "zero_indegree_fraction": self.zero_indegree_fraction,
            "S_n": self.S_n,
        }
        if self.gamma is not None:
            doc["gamma"] = {
                "edges": self.gamma.edges.tolist(),
                "masses": self.gamma.masses.tolist(),
                "overflow_mass": self.gamma.overflow_mass,
            }
        if self.gamma_k:
            doc["gamma_k"] = {str(k): m.tolist() for k, m in self.gamma_k.items()}
        return json.dumps(doc)


def empirical_pk(state) -> Dict[int, float]:
    """p_n(k) = #{i : Z_n(i) = k} / n; keys are the observed degrees."""
    indeg = state.indeg
    n = len(indeg)
    counts = np.bincount(indeg)
    return {int(k): counts[k] / n for k in np.nonzero(counts)[0]}


def geometric_bins(lo: float, hi: float, ratio: float = GEOMETRIC_RATIO) -> np.ndarray:
    """Geometric bin edges covering [lo, hi]; heavy tails need log spacing."""
    if not (lo > 0 and hi >= lo):
        raise ValueError("need 0 < lo <= hi")
    n_bins = max(1, int(math.ceil(math.log(hi / lo) / math.log(ratio))) + 1)
    return lo * ratio ** np.arange(-1, n_bins + 1, dtype=float)


def empirical_gamma(state, bin_edges, k_max: int = DEFAULT_K_MAX):
    """Binned Gamma_n and Gamma_n^(k) masses.

    Gamma_n gives each vertex mass Z_n(i)/n at its fitness F_i;
    Gamma_n^(k) puts mass 1/n at F_i for every vertex with Z_n(i) = k.
    Fitness outside the bin range lands in the flagged overflow mass.
    """
    edges = np.asarray(bin_edges, dtype=float)
    if edges.ndim != 1 or len(edges) < 2 or np.any(np.diff(edges) <= 0):
        raise ValueError("bin edges must be strictly increasing, length >= 2")
    fit = np.asarray(state.fitness, dtype=float)
    indeg = state.indeg
    n = len(indeg)

    inside = (fit > edges[0]) & (fit <= edges[-1])
    # half-open (a, b] binning: searchsorted on the left edge
    idx = np.searchsorted(edges, fit[inside], side="left") - 1
    gamma_masses = np.bincount(idx, weights=indeg[inside], minlength=len(edges) - 1) / n
    overflow = float(np.sum(indeg[~inside])) / n
    gamma = GammaBinned(edges=edges, masses=gamma_masses, overflow_mass=overflow)

    gamma_k: Dict[int, np.ndarray] = {}
    for k in np.unique(indeg):
        if k > k_max:
            continue
        sel = inside & (indeg == k)
        idx_k = np.searchsorted(edges, fit[sel], side="left") - 1
        gamma_k[int(k)] = np.bincount(idx_k, minlength=len(edges) - 1) / n
    return gamma, gamma_k


def max_degree(state) -> tuple[int, int]:
    """(argmax vertex, max in-degree); ties resolved to the smallest index."""
    indeg = state.indeg
    i = int(np.argmax(indeg))
    return i + 1, int(indeg[i])


def unchanged_fraction(state) -> float:
    """Fraction of vertices whose in-degree still equals its seed value.

    Vertices beyond the seed start at in-degree zero, so for them this is
    the zero-in-degree event; seed vertices are compared against the seed
    topology.
    """
    indeg = state.indeg
    n0 = state.n0
    seed = np.asarray(state.seed_indeg, dtype=np.int64)
    same_seed = int(np.sum(indeg[:n0] == seed))
    zeros_after = int(np.sum(indeg[n0:] == 0))
    return (same_seed + zeros_after) / len(indeg)


def summarize(state, bin_edges=None, k_max: int = DEFAULT_K_MAX,
              with_gamma: bool = False) -> EmpiricalSummary:
    """Standard observer: everything a checkpoint needs, in one pass."""
    pk = empirical_pk(state)
    arg, mx = max_degree(state)
    summary = EmpiricalSummary(
        n=state.n,
        pk_hist=pk,
        max_degree=mx,
        argmax_index=arg,
        zero_indegree_fraction=unchanged_fraction(state),
        S_n=float(state.S),
    )
    if with_gamma or bin_edges is not None:
        if bin_edges is None:
            fit = np.asarray(state.fitness)
            bin_edges = geometric_bins(float(fit.min()), float(fit.max()))
        gamma, gamma_k = empirical_gamma(state, bin_edges, k_max=k_max)
        summary.gamma = gamma
        summary.gamma_k = gamma_k
    return summary


# -----------------------------------------------------------------------------
# Tail and goodness-of-fit statistics
# -----------------------------------------------------------------------------

def hill_estimator(values, top_count: int) -> float:
    """Hill estimator of the tail index from the top order statistics.

    Reciprocal of the mean log-excess of the ``top_count`` largest values
    over the (top_count+1)-th largest.  Returns ``inf`` when all top values
    coincide (degenerate tail).
    """
    x = np.asarray(values, dtype=float)
    if top_count < 2 or top_count >= x.size:
        raise ValueError("need 2 <= top_count < len(values)")
    if np.any(x <= 0):
        raise ValueError("Hill estimator needs strictly positive values")
    top = np.sort(x)[-(top_count + 1):]
    mean_excess = float(np.mean(np.log(top[1:])) - math.log(top[0]))
    if mean_excess < 1e-9:
        return math.inf  # all top values (numerically) equal: degenerate tail
    return 1.0 / mean_excess


def ks_statistic(samples, cdf: Callable) -> float:
    """One-sample Kolmogorov-Smirnov sup-distance against ``cdf``.

    Evaluates both sides of every empirical jump, so a single sample at the
    median of a continuous law scores exactly 0.5.
    """
    x = np.sort(np.asarray(samples, dtype=float))
    if x.size == 0:
        raise ValueError("need at least one sample")
    n = x.size
    f = np.asarray(cdf(x), dtype=float)
    upper = np.arange(1, n + 1) / n - f
    lower = f - np.arange(0, n) / n
    return float(max(np.max(upper), np.max(lower)))


def ks_two_sample(a, b) -> float:
    """Two-sample KS distance between empirical CDFs."""
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    if a.size == 0 or b.size == 0:
        raise ValueError("need samples on both sides")
    grid = np.concatenate([a, b])
    fa = np.searchsorted(a, grid, side="right") / a.size
    fb = np.searchsorted(b, grid, side="right") / b.size
    return float(np.max(np.abs(fa - fb)))
