import math

import numpy as np
import pytest

from paflab import (
    Deterministic,
    Exponential,
    LogPareto,
    ParetoTail,
    Regime,
    Uniform,
    classify_regime,
    quantile_u,
    sample_fitness,
    spec_from_dict,
    stream,
    tail_prob,
    theta,
)

ALL_SPECS = [
    Deterministic(1.0),
    Deterministic(2.5),
    ParetoTail(1.5, 1.0, 1.0),
    ParetoTail(3.0, 2.0, 4.0),
    ParetoTail(0.5, 1.0, 1.0),
    LogPareto(1.5, 1.0, 1.0),
    Uniform(0.0, 1.0),
    Uniform(0.5, 2.0),
    Exponential(2.0),
]


def test_deterministic_point_mass():
    rng = stream(0, 0)
    assert sample_fitness(Deterministic(1.0), rng) == 1.0
    assert np.all(sample_fitness(Deterministic(3.0), rng, size=5) == 3.0)


def test_pareto_inverse_transform_value():
    # tail uniform u = 1/8 maps to 8**(2/3) = 4 for beta = 3/2
    spec = ParetoTail(1.5, 1.0, 1.0)
    assert spec.quantile(1 / 8) == pytest.approx(4.0, rel=1e-12)


def test_uniform_sample_mean_lln():
    rng = stream(42, 0)
    draws = sample_fitness(Uniform(0.0, 1.0), rng, size=10**6)
    assert abs(draws.mean() - 0.5) < 0.002


def test_tail_prob_examples():
    assert tail_prob(ParetoTail(1.5, 1.0, 1.0), 4.0) == pytest.approx(0.125)
    assert tail_prob(Deterministic(1.0), 0.5) == 1.0
    assert tail_prob(Deterministic(1.0), 1.5) == 0.0
    # closed convention at the point mass
    assert tail_prob(Deterministic(1.0), 1.0) == 1.0


def test_quantile_u_examples():
    assert quantile_u(ParetoTail(1.5, 1.0, 1.0), 8) == pytest.approx(4.0, rel=1e-12)
    for n in (2, 5, 1000):
        assert quantile_u(Deterministic(2.5), n) == 2.5
    # frozen bisection oracle: v solves log(e+v) * v**-1.5 == 1e-4
    v = quantile_u(LogPareto(1.5, 1.0, 1.0), 10**4)
    assert v == pytest.approx(1775.8471776371252, rel=1e-9)
    assert quantile_u(Uniform(0.0, 1.0), 4) == pytest.approx(0.75)
    assert quantile_u(Exponential(2.0), 100) == pytest.approx(math.log(100) / 2)


def test_theta_examples():
    assert theta(Deterministic(1.0), 1) == 2.0
    assert theta(ParetoTail(1.5, 1.0, 1.0), 1) == pytest.approx(4.0)
    assert math.isinf(theta(ParetoTail(0.5, 1.0, 1.0), 1))
    assert theta(Uniform(0.0, 1.0), 2) == pytest.approx(1.25)


def test_classify_regime_examples():
    assert classify_regime(Uniform(0.0, 1.0), 1) == Regime.WEAK
    assert classify_regime(ParetoTail(1.5, 1.0, 1.0), 1) == Regime.STRONG
    assert classify_regime(ParetoTail(0.5, 1.0, 1.0), 1) == Regime.EXTREME
    assert classify_regime(Deterministic(1.0), 1) == Regime.WEAK
    # beta > theta_m puts a power law in the weak phase
    assert classify_regime(ParetoTail(4.0, 1.0, 1.0), 1) == Regime.WEAK
    # alpha = 2 exactly (infinite mean, not extreme) stays unclassified
    assert classify_regime(ParetoTail(1.0, 1.0, 1.0), 1) == Regime.UNCLASSIFIED


def test_strong_boundary_at_golden_ratio_exponent():
    # beta solving beta = theta_1 = 2 + 1/(beta-1), i.e. the golden-ratio case
    beta = (3.0 + math.sqrt(5.0)) / 2.0
    spec = ParetoTail(beta, 1.0, 1.0)
    assert theta(spec, 1) == pytest.approx(beta, rel=1e-12)
    assert classify_regime(spec, 1) == Regime.STRONG_BOUNDARY


@pytest.mark.parametrize("spec", ALL_SPECS, ids=lambda s: s.label())
def test_quantile_u_is_monotone_inverse(spec):
    for n in (2, 3, 10, 137, 10**4):
        u = quantile_u(spec, n)
        # just above u the tail has dropped to 1/n (right limit handles atoms)
        above = np.nextafter(u * (1 + 1e-12), np.inf)
        assert tail_prob(spec, above) <= 1.0 / n + 1e-12
        below = u * (1 - 1e-9)
        if below > spec.essential_infimum():
            assert tail_prob(spec, below) > 1.0 / n - 1e-12


@pytest.mark.parametrize("spec", ALL_SPECS, ids=lambda s: s.label())
def test_tail_prob_monotone_and_normalized(spec):
    xs = np.geomspace(1e-6, 1e6, 200)
    t = np.asarray(tail_prob(spec, xs))
    assert np.all(np.diff(t) <= 1e-15)
    assert np.all((t >= 0) & (t <= 1))
    assert tail_prob(spec, spec.essential_infimum()) == pytest.approx(1.0)


@pytest.mark.parametrize(
    "spec",
    [ParetoTail(3.0, 1.0, 1.0), Uniform(0.0, 1.0), Exponential(1.5), LogPareto(3.0, 1.0, 1.0)],
    ids=lambda s: s.label(),
)
def test_sample_mean_matches_theta(spec):
    rng = stream(7, 0)
    draws = np.asarray(sample_fitness(spec, rng, size=10**6))
    se = draws.std(ddof=1) / math.sqrt(len(draws))
    assert abs(draws.mean() - (theta(spec, 1) - 1.0)) < 5 * se


def test_pareto_tail_regression_recovers_beta():
    spec = ParetoTail(1.5, 1.0, 1.0)
    rng = stream(11, 0)
    draws = np.sort(np.asarray(sample_fitness(spec, rng, size=10**6)))
    # log-log regression of the empirical survival function over the tail
    grid = np.geomspace(np.quantile(draws, 0.5), np.quantile(draws, 0.999), 40)
    ccdf = 1.0 - np.searchsorted(draws, grid, side="right") / len(draws)
    slope = np.polyfit(np.log(grid), np.log(ccdf), 1)[0]
    assert abs(-slope - 1.5) < 0.05


def test_logpareto_sampling_matches_tail():
    spec = LogPareto(1.5, 1.0, 1.0)
    rng = stream(13, 0)
    draws = np.asarray(sample_fitness(spec, rng, size=10**5))
    for x in (2.0, 5.0, 20.0):
        emp = np.mean(draws >= x)
        assert emp == pytest.approx(spec.tail_prob(x), abs=4e-3)


def test_serialization_roundtrip():
    for spec in ALL_SPECS:
        again = spec_from_dict(spec.to_dict())
        assert again == spec
    with pytest.raises(ValueError):
        spec_from_dict({"kind": "Cauchy", "scale": 1.0})


def test_invalid_parameters_rejected():
    with pytest.raises(ValueError):
        Deterministic(0.0)
    with pytest.raises(ValueError):
        ParetoTail(-1.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        ParetoTail(1.5, 1.0, 3.0)  # tail above 1 at xmin
    with pytest.raises(ValueError):
        Uniform(1.0, 1.0)
    with pytest.raises(ValueError):
        Exponential(0.0)
    with pytest.raises(ValueError):
        LogPareto(0.5, 1.0, 40.0)  # tail not monotone


def test_pareto_atom_convention():
    # c * xmin**-beta = 1/2 leaves an atom of mass 1/2 at xmin
    spec = ParetoTail(1.0, 1.0, 0.5)
    loc, mass = spec.atom()
    assert loc == 1.0 and mass == pytest.approx(0.5)
    rng = stream(3, 0)
    draws = np.asarray(sample_fitness(spec, rng, size=10**5))
    assert np.mean(draws == 1.0) == pytest.approx(0.5, abs=0.01)
