"""paflab: preferential attachment with additive fitness, simulated and checked.

Grows graphs under the three fitness-biased attachment dynamics, evaluates
the limiting degree/fitness formulas numerically, and verifies the
structural identities (martingales, negative quadrant dependence, extreme
value limits) the dynamics are supposed to satisfy.
"""

from .fitness import (
    Deterministic,
    Exponential,
    FitnessSpec,
    LogPareto,
    ParetoTail,
    Regime,
    Uniform,
    classify_regime,
    quantile_u,
    sample_fitness,
    spec_from_dict,
    tail_prob,
    theta,
)
from .graph_engine import (
    GraphState,
    GrowOutcome,
    ModelKind,
    grow_step,
    grow_to,
    init_graph,
    weighted_pick,
    write_edge_log,
)
from .measures import (
    EmpiricalSummary,
    empirical_gamma,
    empirical_pk,
    hill_estimator,
    ks_statistic,
    ks_two_sample,
    max_degree,
    summarize,
    unchanged_fraction,
)
from .oracle import (
    ExactState,
    StepDistribution,
    enumerate_step,
    verify_assumptions,
    verify_martingale,
    verify_nqd,
)
from .ppp import (
    PointSample,
    extreme_sup,
    frechet_cdf,
    functional_T,
    g_beta_identity,
    g_integral,
    law_of_I_cdf,
    sample_ppp,
    strong_sup,
)
from .seeding import replication_seed, stream
from .theory import (
    TheoryContext,
    c_sequence,
    conditional_mean_degree,
    limit_gamma_k,
    limit_gamma_mass,
    limit_pk,
    martingale_value,
    tail_exponent_prediction,
    weak_tail_constant,
)

__version__ = "0.1.0"
