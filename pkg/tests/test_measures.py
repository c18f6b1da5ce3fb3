import math

import numpy as np
import pytest

from paflab import (
    Deterministic,
    GraphState,
    ModelKind,
    ParetoTail,
    empirical_gamma,
    empirical_pk,
    grow_to,
    hill_estimator,
    init_graph,
    ks_statistic,
    ks_two_sample,
    max_degree,
    sample_fitness,
    stream,
    summarize,
    unchanged_fraction,
)
from paflab.measures import geometric_bins
from paflab.theory import TheoryContext, limit_gamma_k, limit_gamma_mass

DET = Deterministic(1.0)


def _state(indeg, fitness=None, model=ModelKind.paffd(1)):
    fitness = fitness or [1.0] * len(indeg)
    return GraphState.from_arrays(model, DET, fitness, indeg)


def test_empirical_pk_counts():
    assert empirical_pk(_state([1, 1, 0])) == {0: pytest.approx(1 / 3), 1: pytest.approx(2 / 3)}
    assert empirical_pk(_state([3, 0, 0, 0])) == {0: pytest.approx(3 / 4), 3: pytest.approx(1 / 4)}
    pk = empirical_pk(_state([2, 1, 1, 0]))
    assert sum(pk.values()) == pytest.approx(1.0, abs=1e-15)


def test_empirical_gamma_examples():
    st = _state([1, 0], [1.0, 1.0])
    gamma, gamma_k = empirical_gamma(st, [0.0, 2.0])
    assert gamma.masses[0] == pytest.approx(0.5)
    assert not gamma.has_overflow
    # one bin covering everything carries (sum indeg)/n exactly
    st2 = _state([3, 2, 0, 1], [0.5, 1.0, 2.0, 4.0])
    gamma2, gamma_k2 = empirical_gamma(st2, [0.25, 8.0])
    assert gamma2.total == pytest.approx(6 / 4, abs=1e-12)
    # per-degree masses sum to p_n(k) over the partition
    pk = empirical_pk(st2)
    for k, masses in gamma_k2.items():
        assert masses.sum() == pytest.approx(pk[k], abs=1e-12)


def test_empirical_gamma_overflow_flagged():
    st = _state([1, 1], [1.0, 10.0])
    gamma, _ = empirical_gamma(st, [0.5, 2.0])
    assert gamma.has_overflow
    assert gamma.overflow_mass == pytest.approx(0.5)
    with pytest.raises(ValueError):
        empirical_gamma(st, [2.0, 1.0])


def test_empirical_gamma_matches_limit_measure():
    # binned Gamma_n within 5% of the size-biased limit on well-filled bins
    spec = ParetoTail(3.0, 1.0, 1.0)
    rng = stream(29, 0)
    st = init_graph(2, "path", ModelKind.paffd(1), spec, rng)
    grow_to(st, 10**5, rng=rng)
    edges = geometric_bins(1.0, 64.0, ratio=2.0)
    gamma, _ = empirical_gamma(st, edges)
    ctx = TheoryContext(spec, 1)
    for b in range(len(edges) - 1):
        expected = limit_gamma_mass(ctx, (edges[b], edges[b + 1]))
        if expected > 0.05:
            assert gamma.masses[b] == pytest.approx(expected, rel=0.05)


def test_gamma_k_bins_match_limit():
    spec = ParetoTail(3.0, 1.0, 1.0)
    rng = stream(31, 0)
    st = init_graph(2, "path", ModelKind.paffd(1), spec, rng)
    grow_to(st, 10**5, rng=rng)
    edges = np.array([1.0, 2.0, 4.0, 1e9])
    _, gamma_k = empirical_gamma(st, edges)
    ctx = TheoryContext(spec, 1)
    for k in (0, 1):
        for b in range(3):
            expected = limit_gamma_k(ctx, k, (edges[b], edges[b + 1]))
            if expected > 0.05:
                assert gamma_k[k][b] == pytest.approx(expected, rel=0.06)


def test_max_degree_tie_break():
    assert max_degree(_state([2, 2, 1])) == (1, 2)
    assert max_degree(_state([0, 5, 0])) == (2, 5)
    # degenerate all-zero query (only reachable on hand-built stubs)
    class Stub:
        indeg = np.zeros(3, dtype=np.int64)
    assert max_degree(Stub()) == (1, 0)


def test_unchanged_fraction_counts_seed_vertices():
    st = _state([1, 0])
    assert unchanged_fraction(st) == 1.0
    rng = stream(33, 0)
    st2 = init_graph(2, "path", ModelKind.paffd(1), DET, rng)
    grow_to(st2, 100, rng=rng)
    frac = unchanged_fraction(st2)
    zeros_after = np.sum(st2.indeg[2:] == 0)
    same_seed = np.sum(st2.indeg[:2] == np.array(st2.seed_indeg))
    assert frac == pytest.approx((zeros_after + same_seed) / 100)


def test_summarize_fields():
    rng = stream(35, 0)
    st = init_graph(2, "path", ModelKind.paffd(1), DET, rng)
    grow_to(st, 50, rng=rng)
    s = summarize(st, with_gamma=True)
    assert s.n == 50
    assert sum(s.pk_hist.values()) == pytest.approx(1.0, abs=1e-12)
    assert s.max_degree >= 1 and 1 <= s.argmax_index <= 50
    assert s.S_n == pytest.approx(50.0)
    assert s.gamma.total == pytest.approx(st.indeg.sum() / 50, abs=1e-12)
    rows = s.to_rows()
    assert any(r[1] == "p_n" for r in rows)
    assert "pk_hist" in s.to_json()


def test_hill_estimator_examples():
    assert hill_estimator([100.0, 10.0, 1.0], 2) == pytest.approx(2 / math.log(1000), rel=1e-12)
    jitter = 1.0 + 1e-12 * np.arange(10)
    assert math.isinf(hill_estimator(jitter, 5))
    with pytest.raises(ValueError):
        hill_estimator([1.0, -2.0, 3.0], 2)
    with pytest.raises(ValueError):
        hill_estimator([1.0, 2.0], 2)


def test_hill_consistency_on_pareto_sample():
    rng = stream(37, 0)
    draws = np.asarray(sample_fitness(ParetoTail(1.5, 1.0, 1.0), rng, size=10**6))
    est = hill_estimator(draws, 10**4)
    assert abs(est - 1.5) < 0.1


def test_ks_statistic_examples():
    assert ks_statistic([0.5], lambda x: np.clip(x, 0, 1)) == pytest.approx(0.5)
    n = 50
    quantiles = (2 * np.arange(1, n + 1) - 1) / (2 * n)
    assert ks_statistic(quantiles, lambda x: np.clip(x, 0, 1)) == pytest.approx(1 / (2 * n))


def test_ks_null_distribution():
    # inverse-transform samples against their own CDF: 95% below 1.95/sqrt(N)
    rng = stream(41, 0)
    n = 10**4
    below = 0
    for _ in range(100):
        u = rng.random(n)
        draws = (0.2945 / -np.log(u)) ** (1 / 1.5)
        cdf = lambda x: np.exp(-0.2945 * np.maximum(np.asarray(x), 1e-12) ** -1.5)
        below += ks_statistic(draws, cdf) < 1.95 / math.sqrt(n)
    assert below >= 95


def test_ks_two_sample_basic():
    rng = stream(43, 0)
    a = rng.random(2000)
    b = rng.random(3000)
    assert ks_two_sample(a, b) < 0.05
    assert ks_two_sample(a, a + 10.0) == pytest.approx(1.0)
