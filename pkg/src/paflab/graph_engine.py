"""Growth engine for preferential attachment with additive fitness.

Three dynamics are implemented.  A new vertex ``n+1`` with fitness
``F_{n+1}`` attaches to earlier vertices with probability proportional to
``Z_n(i) + F_i`` (in-degree plus fitness):

* ``PAFRO_SingleEdge`` -- one edge per step, categorical draw with
  denominator ``m0 + (n - n0) + S_n``.
* ``PAFRO_Bernoulli``  -- an independent Bernoulli coin per existing vertex
  with the same per-vertex success probability (random out-degree; the
  independence makes the degree increments uncorrelated).
* ``PAFFD(m)``         -- m half-edges connected independently with the frozen
  denominator ``m0 + m(n - n0) + S_n``.
* ``PAFUD(m)``         -- m half-edges connected sequentially; weight and
  denominator are updated after each half-edge (denominator
  ``m0 + m(n - n0) + (j-1) + S_n`` for the j-th draw).

Edges always point from the younger vertex to the older one.  At ``m = 1``
PAFFD and PAFUD coincide.

Two sampling mechanisms produce the same law:

* ``weighted_pick`` / ``grow_step`` walk a Fenwick prefix tree over the
  per-vertex weights (O(log n) per draw, exact bookkeeping).
* ``grow_to`` runs a decomposed sampler tuned for long runs: with
  probability (edge count)/W it picks the target of a uniformly chosen
  existing edge (that is exactly degree-proportional), otherwise it picks
  fitness-proportionally by bisecting the running fitness cumsum.  The two
  components add up to ``Z_n(i) + F_i`` exactly.

Random streams are consumed in a documented order so runs are reproducible:
``grow_step`` draws the new fitness first, then its attachment uniforms;
``grow_to`` draws all new fitness values for a segment in one block, then
the attachment uniforms in step order.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence, Union

import numpy as np

from .fitness import FitnessSpec
from .prefix_tree import PrefixWeightTree

__all__ = [
    "ModelKind",
    "GraphState",
    "GrowOutcome",
    "init_graph",
    "grow_step",
    "grow_to",
    "weighted_pick",
    "write_edge_log",
    "PAFRO_BERNOULLI",
    "PAFRO_SINGLE_EDGE",
    "PAFFD",
    "PAFUD",
]

PAFRO_BERNOULLI = "PAFRO_Bernoulli"
PAFRO_SINGLE_EDGE = "PAFRO_SingleEdge"
PAFFD = "PAFFD"
PAFUD = "PAFUD"

_FAMILIES = (PAFRO_BERNOULLI, PAFRO_SINGLE_EDGE, PAFFD, PAFUD)


@dataclass(frozen=True)
class ModelKind:
    """One of the four dynamics; PAFRO variants are pinned to m = 1."""

    family: str
    m: int = 1

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise ValueError(f"unknown model family {self.family!r}")
        if self.m < 1:
            raise ValueError("m must be >= 1")
        if self.is_pafro and self.m != 1:
            raise ValueError("PAFRO variants fix m = 1")

    @property
    def is_pafro(self) -> bool:
        return self.family in (PAFRO_BERNOULLI, PAFRO_SINGLE_EDGE)

    @property
    def fixed_edge_count(self) -> bool:
        """Whether the edge count after n steps is deterministic."""
        return self.family != PAFRO_BERNOULLI

    @property
    def allows_multi_edges(self) -> bool:
        return self.family in (PAFFD, PAFUD)

    def to_dict(self) -> dict:
        return {"family": self.family, "m": self.m}

    @classmethod
    def from_dict(cls, d) -> "ModelKind":
        if isinstance(d, str):
            return cls(family=d)
        return cls(family=d["family"], m=int(d.get("m", 1)))

    def label(self) -> str:
        return self.family if self.is_pafro else f"{self.family}(m={self.m})"

    @classmethod
    def paffd(cls, m: int = 1):
        return cls(PAFFD, m)

    @classmethod
    def pafud(cls, m: int = 1):
        return cls(PAFUD, m)

    @classmethod
    def pafro_single(cls):
        return cls(PAFRO_SINGLE_EDGE, 1)

    @classmethod
    def pafro_bernoulli(cls):
        return cls(PAFRO_BERNOULLI, 1)


class GraphState:
    """Growing directed graph: in-degrees, fitness, and the weight index.

    Vertices are 1-based in the public API (matching the convention that
    vertex i arrived at time i); internal arrays are 0-based.  The state is
    single-threaded: mutate it from one thread at a time.
    """

    def __init__(self, model: ModelKind, spec: FitnessSpec, n0: int, m0: int,
                 fitness: Sequence[float], indeg: Sequence[int],
                 seed_edges: Optional[Sequence[tuple[int, int]]] = None,
                 debug_checks: bool = False):
        if n0 < 1 or m0 < 1:
            raise ValueError("need n0 >= 1 and m0 >= 1")
        if len(fitness) != n0 or len(indeg) != n0:
            raise ValueError("fitness/indeg must have length n0")
        self.model = model
        self.spec = spec
        self.n0 = n0
        self.m0 = m0
        self.n = n0
        self.debug_checks = debug_checks

        cap = max(16, 2 * n0)
        self._fit = np.zeros(cap, dtype=float)
        self._fit[:n0] = np.asarray(fitness, dtype=float)
        self._n_drawn = n0
        self._fit_cum = np.cumsum(self._fit[:n0]).tolist()

        self._indeg = [int(z) for z in indeg]
        self.seed_indeg = tuple(self._indeg)

        # edge multiset: parents in edge order; sampling a uniform entry is
        # exactly degree-proportional sampling
        if seed_edges is None:
            # synthesize a multiset consistent with indeg (children unknown)
            self._targets = [i for i, z in enumerate(self._indeg) for _ in range(z)]
            self._seed_children = list(self._targets)
        else:
            self._targets = [p - 1 for _, p in seed_edges]
            self._seed_children = [c - 1 for c, _ in seed_edges]
        if len(self._targets) != m0:
            raise ValueError("seed edges inconsistent with m0")
        self._children_extra: Optional[list[int]] = [] if model.family == PAFRO_BERNOULLI else None

        self._tree: Optional[PrefixWeightTree] = None
        self._tree_fresh = False

    # -- basic views ---------------------------------------------------------

    @property
    def fitness(self) -> np.ndarray:
        """Fitness values F_1..F_n (read-only view)."""
        v = self._fit[: self.n]
        v.flags.writeable = False
        return v

    @property
    def indeg(self) -> np.ndarray:
        """In-degrees Z_n(1..n) as an array (copy)."""
        return np.asarray(self._indeg, dtype=np.int64)

    @property
    def S(self) -> float:
        """Running fitness sum S_n."""
        return self._fit_cum[self.n - 1]

    @property
    def edge_count(self) -> int:
        return len(self._targets)

    @property
    def W(self) -> float:
        """Total attachment weight (the model's denominator at the next step)."""
        if self.model.family == PAFRO_BERNOULLI:
            return self.m0 + (self.n - self.n0) + self.S
        return self.edge_count + self.S

    def weights(self) -> np.ndarray:
        """Per-vertex attachment weights Z_n(i) + F_i."""
        return self.indeg + self._fit[: self.n]

    @classmethod
    def from_arrays(cls, model: ModelKind, spec: FitnessSpec,
                    fitness: Sequence[float], indeg: Sequence[int],
                    n0: Optional[int] = None, m0: Optional[int] = None,
                    debug_checks: bool = False) -> "GraphState":
        """Build a custom state (e.g. the single-vertex self-loop seed).

        ``n0`` defaults to the array length and ``m0`` to the total
        in-degree, i.e. the arrays describe the seed graph itself.
        """
        n0 = len(indeg) if n0 is None else n0
        m0 = int(np.sum(indeg)) if m0 is None else m0
        return cls(model, spec, n0, m0, fitness, indeg, debug_checks=debug_checks)

    @classmethod
    def with_fitness_sample(cls, model: ModelKind, spec: FitnessSpec,
                            seed_indeg: Sequence[int],
                            fitness_sample: Sequence[float]) -> "GraphState":
        """Seed state conditioned on a full fitness sample.

        Vertices beyond the seed take their fitness from ``fitness_sample``
        instead of the random stream, which realizes the fitness-conditional
        measure used by the conditional-mean identities.
        """
        n0 = len(seed_indeg)
        sample = np.asarray(fitness_sample, dtype=float)
        if len(sample) < n0:
            raise ValueError("fitness_sample shorter than the seed")
        st = cls(model, spec, n0, int(np.sum(seed_indeg)), sample[:n0], seed_indeg)
        st._fit = sample.copy()
        st._n_drawn = len(sample)
        st._fit_cum = np.cumsum(sample).tolist()
        return st

    # -- fitness stream -------------------------------------------------------

    def _ensure_fitness(self, n_needed: int, rng: np.random.Generator) -> None:
        if n_needed <= self._n_drawn:
            return
        if n_needed > len(self._fit):
            new_cap = max(n_needed, 2 * len(self._fit))
            grown = np.zeros(new_cap, dtype=float)
            grown[: self._n_drawn] = self._fit[: self._n_drawn]
            self._fit = grown
        k = n_needed - self._n_drawn
        draws = np.atleast_1d(np.asarray(self.spec.sample(rng, k), dtype=float))
        self._fit[self._n_drawn: n_needed] = draws
        base = self._fit_cum[-1]
        self._fit_cum.extend((base + np.cumsum(draws)).tolist())
        self._n_drawn = n_needed

    # -- weight index ----------------------------------------------------------

    def _ensure_tree(self) -> PrefixWeightTree:
        if self._tree is None or self._tree.capacity < self.n:
            self._tree = PrefixWeightTree(max(16, 2 * self.n))
            self._tree_fresh = False
        if not self._tree_fresh:
            self._tree.rebuild(self.weights())
            self._tree_fresh = True
        return self._tree

    def check_invariants(self, tol: float = 1e-9) -> None:
        """Assert the structural invariants; used by tests and debug mode."""
        if self.model.fixed_edge_count:
            expect = self.m0 + self.model.m * (self.n - self.n0)
            if sum(self._indeg) != expect:
                raise AssertionError("edge-count conservation violated")
        if sum(self._indeg) != len(self._targets):
            raise AssertionError("edge multiset out of sync with in-degrees")
        if self._tree is not None and self._tree_fresh:
            exact = float(np.sum(self.weights()))
            if abs(self._tree.total - exact) > tol * max(1.0, exact):
                raise AssertionError("weight index drift beyond tolerance")

    # -- edge log ---------------------------------------------------------------

    def edges(self) -> Iterable[tuple[int, int]]:
        """Yield (child, parent) pairs, 1-based, ascending child."""
        seed = sorted(
            (c + 1, self._targets[e] + 1) for e, c in enumerate(self._seed_children)
        )
        yield from seed
        m0, m = self.m0, self.model.m
        if self.model.family == PAFRO_BERNOULLI:
            for e in range(m0, len(self._targets)):
                yield self._children_extra[e - m0] + 1, self._targets[e] + 1
        else:
            for e in range(m0, len(self._targets)):
                child = self.n0 + 1 + (e - m0) // m
                yield child, self._targets[e] + 1


@dataclass
class GrowOutcome:
    """Result of ``grow_to``: final state plus per-checkpoint observations."""

    state: GraphState
    summaries: list = field(default_factory=list)
    truncated: bool = False


# -----------------------------------------------------------------------------
# Seed graphs
# -----------------------------------------------------------------------------

def _resolve_topology(n0: int, seed_topology, model: ModelKind) -> list[tuple[int, int]]:
    if isinstance(seed_topology, str):
        if seed_topology == "path":
            edges = [(i, i - 1) for i in range(2, n0 + 1)]
        elif seed_topology == "star":
            edges = [(i, 1) for i in range(2, n0 + 1)]
        else:
            raise ValueError(f"unknown seed topology {seed_topology!r}")
    else:
        edges = [(int(c), int(p)) for c, p in seed_topology]
    if not edges:
        raise ValueError("seed topology must contain at least one edge (m0 >= 1)")
    for c, p in edges:
        if not (1 <= p < c <= n0):
            raise ValueError(f"seed edge {(c, p)} must point from larger to smaller index in [n0]")
    if not model.allows_multi_edges and len(set(edges)) != len(edges):
        raise ValueError("duplicate seed edge not allowed for PAFRO models")
    return edges


def init_graph(n0: int, seed_topology, model: ModelKind, spec: FitnessSpec,
               rng: np.random.Generator, debug_checks: bool = False) -> GraphState:
    """Seed graph on [n0] with i.i.d. fitness values drawn from ``spec``.

    ``seed_topology`` is "path", "star", or an explicit list of (child,
    parent) pairs with child > parent.  PAFRO models reject duplicate
    pairs; PAFFD/PAFUD accept them as multi-edges.
    """
    edges = _resolve_topology(n0, seed_topology, model)
    indeg = [0] * n0
    for _, p in edges:
        indeg[p - 1] += 1
    fitness = np.atleast_1d(np.asarray(spec.sample(rng, n0), dtype=float))
    return GraphState(model, spec, n0, len(edges), fitness, indeg,
                      seed_edges=edges, debug_checks=debug_checks)


# -----------------------------------------------------------------------------
# Single-step growth via the prefix tree
# -----------------------------------------------------------------------------

def weighted_pick(state: GraphState, rng: np.random.Generator) -> int:
    """Sample a vertex with probability (Z_n(i)+F_i) / sum_j (Z_n(j)+F_j).

    O(log n) descent in the Fenwick weight index; returns a 1-based index.
    """
    tree = state._ensure_tree()
    if tree.total <= 0:
        raise ValueError("total attachment weight must be positive")
    return tree.pick(rng.random() * tree.total) + 1


def grow_step(state: GraphState, rng: np.random.Generator) -> GraphState:
    """Add vertex n+1 (fresh fitness, then its edges); mutates ``state``."""
    n = state.n
    state._ensure_fitness(n + 1, rng)
    f_new = float(state._fit[n])
    tree = state._ensure_tree()
    fam = state.model.family
    m = state.model.m

    if fam == PAFRO_BERNOULLI:
        denom = state.m0 + (n - state.n0) + state.S
        probs = state.weights() / denom
        if state.debug_checks and np.any(probs >= 1.0):
            raise AssertionError("PAFRO attachment probability reached 1")
        hits = np.nonzero(rng.random(n) < probs)[0]
        for t in hits:
            t = int(t)
            state._targets.append(t)
            state._children_extra.append(n)
            state._indeg[t] += 1
            tree.add(t, 1.0)
    elif fam == PAFFD and m > 1:
        picks = [tree.pick(rng.random() * tree.total) for _ in range(m)]
        for t in picks:
            state._targets.append(t)
            state._indeg[t] += 1
        for t in picks:
            tree.add(t, 1.0)
    else:
        # PAFUD, PAFRO_SingleEdge, and PAFFD at m = 1: sequential draws
        for _ in range(m):
            t = tree.pick(rng.random() * tree.total)
            state._targets.append(t)
            state._indeg[t] += 1
            tree.add(t, 1.0)

    state._indeg.append(0)
    state.n = n + 1
    if tree.capacity <= n:
        state._tree_fresh = False
        state._ensure_tree()
    else:
        tree.set(n, f_new)
    if state.debug_checks:
        state.check_invariants()
    return state


# -----------------------------------------------------------------------------
# Batched growth (decomposed sampler)
# -----------------------------------------------------------------------------

def _run_segment_fixed_m(state: GraphState, n_stop: int, rng: np.random.Generator) -> None:
    """Tight loop for PAFFD/PAFUD/PAFRO_SingleEdge up to n_stop vertices."""
    m = state.model.m
    sequential = state.model.family != PAFFD or m == 1
    targets = state._targets
    indeg = state._indeg
    cs = state._fit_cum
    n = state.n
    indeg.extend([0] * (n_stop - n))
    ubuf = rng.random(m * (n_stop - n)).tolist()
    ptr = 0
    E = len(targets)
    append = targets.append
    bis = bisect_right
    if sequential:
        for v in range(n, n_stop):
            S = cs[v - 1]
            for _ in range(m):
                x = ubuf[ptr] * (E + S)
                ptr += 1
                t = targets[int(x)] if x < E else bis(cs, x - E, 0, v)
                append(t)
                indeg[t] += 1
                E += 1
    else:
        for v in range(n, n_stop):
            W = E + cs[v - 1]
            picks = []
            for _ in range(m):
                x = ubuf[ptr] * W
                ptr += 1
                picks.append(targets[int(x)] if x < E else bis(cs, x - E, 0, v))
            for t in picks:
                append(t)
                indeg[t] += 1
            E += m
    state.n = n_stop
    state._tree_fresh = False


def _run_segment_bernoulli(state: GraphState, n_stop: int, rng: np.random.Generator) -> None:
    n = state.n
    indeg = np.asarray(state._indeg, dtype=np.int64)
    indeg = np.concatenate([indeg, np.zeros(n_stop - n, dtype=np.int64)])
    fit = state._fit
    cs = state._fit_cum
    targets = state._targets
    children = state._children_extra
    n0, m0 = state.n0, state.m0
    for v in range(n, n_stop):
        denom = m0 + (v - n0) + cs[v - 1]
        probs = (indeg[:v] + fit[:v]) / denom
        if state.debug_checks and np.any(probs >= 1.0):
            raise AssertionError("PAFRO attachment probability reached 1")
        hits = np.nonzero(rng.random(v) < probs)[0]
        for t in hits:
            t = int(t)
            targets.append(t)
            children.append(v)
        indeg[hits] += 1
    state._indeg = indeg.tolist()
    state.n = n_stop
    state._tree_fresh = False


def grow_to(state: GraphState, n_target: int, checkpoints: Sequence[int] = (),
            observers: Union[None, Callable, Sequence[Callable]] = None,
            rng: Optional[np.random.Generator] = None,
            max_steps: Optional[int] = None) -> GrowOutcome:
    """Grow to ``n_target`` vertices, observing the state at each checkpoint.

    ``observers`` may be a single callable, a list of callables, or None
    for the default empirical summary.  Deterministic given the random
    stream; fitness for the whole segment is drawn in one block before the
    attachment uniforms.  If ``max_steps`` is exhausted the outcome is
    returned truncated, with the summaries collected so far.
    """
    if rng is None:
        raise ValueError("grow_to needs an explicit random stream")
    if n_target < state.n:
        raise ValueError("n_target must be >= current n")
    cps = sorted(set(int(c) for c in checkpoints))
    if cps and (cps[0] <= state.n or cps[-1] > n_target):
        raise ValueError("checkpoints must lie in (current n, n_target]")

    if observers is None:
        from .measures import summarize
        obs_list, single = [summarize], True
    elif callable(observers):
        obs_list, single = [observers], True
    else:
        obs_list, single = list(observers), False

    outcome = GrowOutcome(state=state)
    if n_target == state.n:
        return outcome

    state._ensure_fitness(n_target, rng)
    budget = max_steps if max_steps is not None else float("inf")
    boundaries = [c for c in cps if c < n_target] + [n_target]
    for stop in boundaries:
        span = stop - state.n
        if span > budget:
            outcome.truncated = True
            break
        budget -= span
        if state.model.family == PAFRO_BERNOULLI:
            _run_segment_bernoulli(state, stop, rng)
        else:
            _run_segment_fixed_m(state, stop, rng)
        if stop in cps:
            got = [ob(state) for ob in obs_list]
            outcome.summaries.append(got[0] if single else tuple(got))
    if state.debug_checks:
        state.check_invariants()
    return outcome


def write_edge_log(state: GraphState, path, binary: bool = False) -> None:
    """Write the edge log: text "child parent" lines (ascending child), or a
    binary .npy array of shape (E, 2)."""
    pairs = list(state.edges())
    if binary:
        np.save(path, np.asarray(pairs, dtype=np.int64))
    else:
        with open(path, "w") as fh:
            for c, p in pairs:
                fh.write(f"{c} {p}\n")
