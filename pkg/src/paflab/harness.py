"""Experiment orchestration: replications, aggregation, result bundles.

A run is a directory containing ``manifest.json`` (full config echo plus
versions and a completeness marker), one or more CSV tables, and
``summary.json`` with the aggregated statistics.  Replications execute in
a process pool when ``parallelism > 1`` (override with the PAFLAB_THREADS
environment variable); their streams derive only from
``(master_seed, replication_index)``, so results do not depend on the
degree of parallelism, and reruns of the same config produce byte-identical
CSV bodies.

CSV schemas
-----------
degree_dist          replication,n,k,p_n_k
max_degree           replication,n,I_n,max_Z,S_n,u_n
extreme_zero_fraction replication,n,unchanged_fraction,p_n_0
ppp                  sample_id,sup_value,argmax_t,N_points
regime_scan          spec,m,regime,predicted_exponent,hill_estimate,slope,zero_fraction_final
verify               check,state_id,model,n,index,k,value,bound,passed
"""

from __future__ import annotations

import json
import math
import os
import platform
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .fitness import FitnessSpec, Regime, classify_regime, quantile_u, spec_from_dict, theta
from .graph_engine import GraphState, ModelKind, grow_to, init_graph
from .measures import hill_estimator, ks_statistic, summarize, unchanged_fraction
from .oracle import enumerate_step, small_state_family, verify_assumptions, verify_martingale, verify_nqd
from .ppp import extreme_sup, frechet_cdf, g_integral, law_of_I_cdf, sample_ppp, strong_sup
from .seeding import stream
from .theory import RegimeError, TheoryContext, limit_pk, tail_exponent_prediction

__all__ = ["ExperimentConfig", "ResultBundle", "run_experiment", "compare_regimes"]

EXPERIMENTS = ("degree_dist", "max_degree", "regime_scan", "ppp_limit", "verify",
               "extreme_zero_fraction")

# asymptotic one-sample KS critical value at 95%: 1.358 / sqrt(N)
KS_COEFFICIENT_95 = 1.358


def ks_critical(n_samples: int, coefficient: float = KS_COEFFICIENT_95) -> float:
    return coefficient / math.sqrt(n_samples)


def geometric_checkpoints(n0: int, n_target: int, ratio: float = 2.0) -> tuple:
    """Doubling checkpoints up to n_target (log-log slope fits need them)."""
    cps = []
    c = float(max(2 * n0, 4))
    while c < n_target:
        cps.append(int(round(c)))
        c *= ratio
    cps.append(n_target)
    return tuple(sorted(set(cps)))


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    model: ModelKind = ModelKind.paffd(1)
    fitness: FitnessSpec = None
    n0: int = 2
    seed_topology: object = "path"
    n_target: int = 1000
    checkpoints: tuple = ()
    replications: int = 1
    master_seed: int = 0
    parallelism: int = 1
    outputs: str = "out"
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"unknown experiment {self.experiment!r}")
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        cps = tuple(int(c) for c in self.checkpoints)
        if list(cps) != sorted(cps) or (cps and cps[-1] > self.n_target):
            raise ValueError("checkpoints must be sorted and <= n_target")
        object.__setattr__(self, "checkpoints", cps)

    def effective_checkpoints(self) -> tuple:
        if self.checkpoints:
            return self.checkpoints
        if self.experiment in ("max_degree", "regime_scan"):
            return geometric_checkpoints(self.n0, self.n_target)
        return (self.n_target,)

    def to_dict(self) -> dict:
        return {
            "experiment": self.experiment,
            "model": self.model.to_dict(),
            "fitness": self.fitness.to_dict() if self.fitness is not None else None,
            "n0": self.n0,
            "seed_topology": self.seed_topology,
            "n_target": self.n_target,
            "checkpoints": list(self.checkpoints),
            "replications": self.replications,
            "master_seed": self.master_seed,
            "parallelism": self.parallelism,
            "outputs": self.outputs,
            "options": self.options,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        d = dict(d)
        if "model" in d and d["model"] is not None:
            d["model"] = ModelKind.from_dict(d["model"])
        if d.get("fitness") is not None:
            d["fitness"] = spec_from_dict(d["fitness"])
        d["checkpoints"] = tuple(d.get("checkpoints", ()))
        return cls(**d)

    @classmethod
    def from_json_file(cls, path) -> "ExperimentConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


@dataclass
class ResultBundle:
    directory: Path
    manifest: dict
    summary: dict

    @property
    def manifest_path(self) -> Path:
        return self.directory / "manifest.json"


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, np.integer):
        return str(int(v))
    return str(v)


def _write_csv(path: Path, header: Sequence[str], rows, model_label: Optional[str] = None) -> int:
    with open(path, "w") as fh:
        if model_label is not None:
            fh.write(f"# model={model_label}\n")
        fh.write(",".join(header) + "\n")
        count = 0
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")
            count += 1
    return count


def _resolve_parallelism(config: ExperimentConfig) -> int:
    env = os.environ.get("PAFLAB_THREADS")
    if env:
        return max(1, int(env))
    return max(1, config.parallelism)


def _map_replications(fn, config: ExperimentConfig):
    reps = range(config.replications)
    workers = _resolve_parallelism(config)
    if workers <= 1 or config.replications == 1:
        return [fn(config, r) for r in reps]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(fn, config, r) for r in reps]
        return [f.result() for f in futures]


# -----------------------------------------------------------------------------
# Per-replication simulation
# -----------------------------------------------------------------------------

def _simulate_replication(config: ExperimentConfig, rep: int):
    """One growth run; returns per-checkpoint records as plain tuples."""
    rng = stream(config.master_seed, rep)
    state = init_graph(config.n0, config.seed_topology, config.model, config.fitness, rng)
    records = []

    def observer(st: GraphState):
        summ = summarize(st)
        records.append((st.n, summ.pk_hist, summ.max_degree, summ.argmax_index,
                        summ.zero_indegree_fraction, summ.S_n))
        return None

    grow_to(state, config.n_target, checkpoints=config.effective_checkpoints(),
            observers=observer, rng=rng)
    return records


def _simulate_with_degrees(config: ExperimentConfig, rep: int):
    """Growth run that also returns the final in-degree array (for Hill)."""
    rng = stream(config.master_seed, rep)
    state = init_graph(config.n0, config.seed_topology, config.model, config.fitness, rng)
    outcome = grow_to(state, config.n_target, checkpoints=config.effective_checkpoints(),
                      rng=rng)
    records = [
        (s.n, s.pk_hist, s.max_degree, s.argmax_index, s.zero_indegree_fraction, s.S_n)
        for s in outcome.summaries
    ]
    return records, state.indeg


# -----------------------------------------------------------------------------
# Experiments
# -----------------------------------------------------------------------------

def run_experiment(config: ExperimentConfig) -> ResultBundle:
    """Run one experiment and materialize its result bundle on disk."""
    out = Path(config.outputs)
    out.mkdir(parents=True, exist_ok=True)
    manifest = {
        "config": config.to_dict(),
        "versions": {
            "paflab": __version__,
            "python": platform.python_version(),
            "numpy": np.__version__,
        },
        "files": {},
        "complete": False,
    }
    runner = {
        "degree_dist": _run_degree_dist,
        "max_degree": _run_max_degree,
        "extreme_zero_fraction": _run_extreme_zero,
        "ppp_limit": _run_ppp_limit,
        "verify": _run_verify,
        "regime_scan": _run_regime_scan,
    }[config.experiment]
    try:
        summary = runner(config, out, manifest)
        manifest["complete"] = True
    finally:
        with open(out / "manifest.json", "w") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True)
    with open(out / "summary.json", "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
    return ResultBundle(directory=out, manifest=manifest, summary=summary)


def _register(manifest: dict, path: Path, header: Sequence[str], rows: int) -> None:
    manifest["files"][path.name] = {"columns": list(header), "rows": rows}


def _run_degree_dist(config: ExperimentConfig, out: Path, manifest: dict) -> dict:
    per_rep = _map_replications(_simulate_replication, config)
    header = ("replication", "n", "k", "p_n_k")
    rows = []
    final_hists = []
    for rep, records in enumerate(per_rep):
        for (n, pk, *_rest) in records:
            for k in sorted(pk):
                rows.append((rep, n, k, pk[k]))
            if n == config.n_target:
                final_hists.append(pk)
    path = out / "degree_dist.csv"
    _register(manifest, path, header, _write_csv(path, header, rows, config.model.label()))

    summary = {"experiment": "degree_dist", "model": config.model.label(),
               "fitness": config.fitness.label(), "n": config.n_target,
               "replications": config.replications}
    k_top = int(config.options.get("k_max_compare", 20))
    mean_pk = {k: float(np.mean([h.get(k, 0.0) for h in final_hists]))
               for k in range(k_top + 1)}
    summary["mean_p_n"] = mean_pk
    if not math.isinf(theta(config.fitness, config.model.m)):
        ctx = TheoryContext(config.fitness, config.model.m)
        limit = {k: limit_pk(ctx, k) for k in range(k_top + 1)}
        summary["limit_pk"] = limit
        emp_tail = 1.0 - sum(mean_pk.values())
        th_tail = 1.0 - sum(limit.values())
        tv = 0.5 * (sum(abs(mean_pk[k] - limit[k]) for k in limit) + abs(emp_tail - th_tail))
        summary["tv_distance"] = tv
    return summary


def _fit_slope(ns, values) -> float:
    ln_n = np.log(np.asarray(ns, dtype=float))
    ln_v = np.log(np.maximum(np.asarray(values, dtype=float), 1.0))
    return float(np.polyfit(ln_n, ln_v, 1)[0])


def _run_max_degree(config: ExperimentConfig, out: Path, manifest: dict) -> dict:
    per_rep = _map_replications(_simulate_replication, config)
    header = ("replication", "n", "I_n", "max_Z", "S_n", "u_n")
    rows = []
    slopes = []
    persistent = 0
    final_ratio = []
    final_loc = []
    n_final = config.n_target
    decade_floor = n_final / float(config.options.get("persistence_window", 100))
    for rep, records in enumerate(per_rep):
        ns = [r[0] for r in records]
        maxz = [r[2] for r in records]
        args = [r[3] for r in records]
        for (n, _pk, mz, arg, _zf, s_n) in records:
            rows.append((rep, n, arg, mz, s_n, quantile_u(config.fitness, n)))
        if len(ns) >= 2:
            slopes.append(_fit_slope(ns, maxz))
        late = [a for nn, a in zip(ns, args) if nn >= decade_floor]
        if late and all(a == late[0] for a in late):
            persistent += 1
        final_ratio.append(maxz[-1] / quantile_u(config.fitness, n_final))
        final_loc.append(args[-1] / n_final)
    path = out / "max_degree.csv"
    _register(manifest, path, header, _write_csv(path, header, rows, config.model.label()))

    summary = {
        "experiment": "max_degree",
        "model": config.model.label(),
        "fitness": config.fitness.label(),
        "replications": config.replications,
        "mean_loglog_slope": float(np.mean(slopes)) if slopes else None,
        "slope_per_replication": slopes,
        "persistent_hub_fraction": persistent / config.replications,
    }
    regime = classify_regime(config.fitness, config.model.m)
    summary["regime"] = regime.value
    if regime == Regime.STRONG:
        th = theta(config.fitness, config.model.m)
        alpha = config.fitness.alpha
        g01 = g_integral(th, alpha, 0.0, 1.0)
        summary["ks_max_vs_frechet"] = ks_statistic(
            final_ratio, lambda x: frechet_cdf(g01, alpha, x))
        summary["ks_argmax_vs_lawI"] = ks_statistic(
            final_loc, lambda t: law_of_I_cdf(th, alpha, t))
        summary["ks_threshold_95"] = ks_critical(
            config.replications, float(config.options.get("ks_coefficient", KS_COEFFICIENT_95)))
    return summary


def _run_extreme_zero(config: ExperimentConfig, out: Path, manifest: dict) -> dict:
    per_rep = _map_replications(_simulate_replication, config)
    header = ("replication", "n", "unchanged_fraction", "p_n_0")
    rows = []
    by_checkpoint: dict = {}
    for rep, records in enumerate(per_rep):
        for (n, pk, _mz, _arg, zf, _s) in records:
            rows.append((rep, n, zf, pk.get(0, 0.0)))
            by_checkpoint.setdefault(n, []).append(zf)
    path = out / "extreme_zero_fraction.csv"
    _register(manifest, path, header, _write_csv(path, header, rows, config.model.label()))
    means = {n: float(np.mean(v)) for n, v in sorted(by_checkpoint.items())}
    ordered = [means[n] for n in sorted(means)]
    return {
        "experiment": "extreme_zero_fraction",
        "model": config.model.label(),
        "fitness": config.fitness.label(),
        "mean_unchanged_fraction": means,
        "monotone_increasing": all(a <= b for a, b in zip(ordered, ordered[1:])),
    }


def _run_ppp_limit(config: ExperimentConfig, out: Path, manifest: dict) -> dict:
    opts = config.options
    alpha = float(opts.get("alpha", config.fitness.alpha if config.fitness else 2.5))
    delta = float(opts.get("delta", 1e-3))
    n_samples = int(opts.get("n_samples", 10000))
    mode = opts.get("mode", "strong")
    th = float(opts.get("theta", theta(config.fitness, config.model.m)
                        if config.fitness else 4.0))
    rng = stream(config.master_seed, 0)
    header = ("sample_id", "sup_value", "argmax_t", "N_points")
    rows = []
    values = np.empty(n_samples)
    locs = np.empty(n_samples)
    for s in range(n_samples):
        smp = sample_ppp(alpha, delta, rng)
        if mode == "strong":
            res = strong_sup(smp, th)
            values[s], locs[s] = res.value, res.argmax_t
        else:
            res = extreme_sup(smp, int(config.model.m), float(opts.get("eps_floor", delta)))
            values[s], locs[s] = res.value, res.argmax_t
        rows.append((s, values[s], locs[s], smp.n_points))
    path = out / "ppp.csv"
    _register(manifest, path, header, _write_csv(path, header, rows))

    summary = {"experiment": "ppp_limit", "mode": mode, "alpha": alpha, "delta": delta,
               "theta": th, "n_samples": n_samples,
               "ks_threshold_95": ks_critical(
                   n_samples, float(opts.get("ks_coefficient", KS_COEFFICIENT_95)))}
    if mode == "strong":
        g01 = g_integral(th, alpha, 0.0, 1.0)
        summary["g01"] = g01
        ok = values > 0
        summary["ks_sup_vs_frechet"] = ks_statistic(values[ok], lambda x: frechet_cdf(g01, alpha, x))
        summary["ks_argmax_vs_lawI"] = ks_statistic(locs[ok], lambda t: law_of_I_cdf(th, alpha, t))
    else:
        summary["median_sup"] = float(np.median(values))
    return summary


def _run_verify(config: ExperimentConfig, out: Path, manifest: dict) -> dict:
    from fractions import Fraction

    max_n = int(config.options.get("max_n", 6))
    k_grid = (0, Fraction(1, 2), 1, 2, 3)
    tol = 1e-10
    header = ("check", "state_id", "model", "n", "index", "k", "value", "bound", "passed")
    rows = []
    failures = 0
    for sid, state in enumerate(small_state_family(max_n=max_n)):
        dist = enumerate_step(state)
        fam = state.model.family
        for i in range(1, state.n + 1):
            for k in k_grid:
                rel = verify_martingale(state, i, k, relative=True, dist=dist)
                val = float(rel)
                if fam == "PAFFD" and k not in (0, 1):
                    ok = val <= tol if k > 0 else val >= -tol
                    bound = "<=0" if k > 0 else ">=0"
                else:
                    ok = abs(val) < tol
                    bound = "|.|<1e-10"
                failures += not ok
                rows.append(("martingale", sid, state.model.label(), state.n, i,
                             str(k), val, bound, int(ok)))
        nqd = verify_nqd(state, dist)
        val = float(nqd.worst)
        ok = (val == 0.0) if fam == "PAFRO_Bernoulli" else (val <= 1e-12)
        failures += not ok
        rows.append(("nqd", sid, state.model.label(), state.n, 0, "", val,
                     "=0" if fam == "PAFRO_Bernoulli" else "<=0", int(ok)))
        rep = verify_assumptions(state, dist)
        ok = rep.a1_model_residual < 1e-10
        failures += not ok
        rows.append(("increment_mean", sid, state.model.label(), state.n, 0, "",
                     rep.a1_model_residual, "<1e-10", int(ok)))
    path = out / "verify.csv"
    _register(manifest, path, header, _write_csv(path, header, rows))
    return {"experiment": "verify", "checks": len(rows), "failures": failures,
            "passed": failures == 0}


def _regime_row(spec: FitnessSpec, m: int, config: ExperimentConfig, spec_index: int):
    sub = replace(config, experiment="max_degree", fitness=spec,
                  master_seed=config.master_seed + 7919 * spec_index,
                  options=dict(config.options))
    per_rep = _map_replications(_simulate_with_degrees, sub)
    slopes = []
    first_zero = []
    final_zero = []
    degrees_pool = []
    for records, indeg in per_rep:
        ns = [r[0] for r in records]
        maxz = [r[2] for r in records]
        if len(ns) >= 2:
            slopes.append(_fit_slope(ns, maxz))
        first_zero.append(records[0][4])
        final_zero.append(records[-1][4])
        degrees_pool.append(indeg)
    degrees = np.concatenate(degrees_pool)
    positive = degrees[degrees > 0].astype(float)

    def hill_at(frac: float) -> float:
        top = max(2, int(len(positive) * frac))
        return hill_estimator(positive, top) if len(positive) > top + 1 else math.nan

    # the estimator's bias is regime-dependent, so report a fraction sweep
    frac = float(config.options.get("hill_fraction", 0.01))
    hill, hill_lo, hill_hi = hill_at(frac), hill_at(frac / 2), hill_at(frac * 2)
    regime = classify_regime(spec, m)
    try:
        predicted = tail_exponent_prediction(TheoryContext(spec, m)).exponent
    except RegimeError:
        predicted = math.nan
    zero_first = float(np.mean(first_zero))
    zero_final = float(np.mean(final_zero))
    return (spec.label(), m, regime.value, predicted, hill, hill_lo, hill_hi,
            float(np.mean(slopes)) if slopes else math.nan,
            zero_first, zero_final)


def compare_regimes(config: ExperimentConfig, specs: Sequence[FitnessSpec]):
    """One row per fitness spec: regime, predicted exponent, Hill, slope."""
    return [_regime_row(spec, config.model.m, config, idx)
            for idx, spec in enumerate(specs)]


def _run_regime_scan(config: ExperimentConfig, out: Path, manifest: dict) -> dict:
    spec_dicts = config.options.get("specs")
    specs = [spec_from_dict(d) for d in spec_dicts] if spec_dicts else [config.fitness]
    table = compare_regimes(config, specs)
    header = ("spec", "m", "regime", "predicted_exponent", "hill_estimate",
              "hill_half_fraction", "hill_double_fraction", "slope",
              "zero_fraction_first", "zero_fraction_final")
    path = out / "regime_scan.csv"
    _register(manifest, path, header, _write_csv(path, header, table, config.model.label()))
    return {"experiment": "regime_scan",
            "rows": [dict(zip(header, row)) for row in table]}
