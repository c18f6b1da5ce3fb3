"""Command-line front end.

Subcommands
-----------
simulate  run an experiment from a JSON config file
theory    emit (k, p_k) CSV plus a JSON header with theta, regime, exponent
ppp       sample point-process suprema; CSV rows plus a JSON summary
verify    pass/fail table of the exact small-graph identities
regime    regime comparison table across fitness specs
report    render report.md and figures from a result bundle

The config file is a single JSON document matching ExperimentConfig field
names.  PAFLAB_THREADS overrides the configured parallelism.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from .fitness import classify_regime, spec_from_dict, theta
from .graph_engine import ModelKind
from .harness import ExperimentConfig, run_experiment
from .theory import RegimeError, TheoryContext, limit_pk, tail_exponent_prediction, weak_tail_constant


def _cmd_simulate(args) -> int:
    config = ExperimentConfig.from_json_file(args.config)
    if args.outputs:
        config = ExperimentConfig.from_dict({**config.to_dict(), "outputs": args.outputs})
    bundle = run_experiment(config)
    print(f"wrote {bundle.manifest_path}")
    return 0


def _cmd_theory(args) -> int:
    spec = spec_from_dict(json.loads(args.fitness))
    ctx = TheoryContext(spec, args.m)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    th = theta(spec, args.m)
    header = {
        "fitness": spec.to_dict(),
        "m": args.m,
        "theta_m": None if math.isinf(th) else th,
        "regime": classify_regime(spec, args.m).value,
    }
    try:
        pred = tail_exponent_prediction(ctx)
        header["exponent"] = pred.exponent
        header["log_correction"] = pred.log_correction
    except RegimeError:
        header["exponent"] = None
    try:
        header["weak_constant_C"] = weak_tail_constant(ctx)
    except RuntimeError:
        header["weak_constant_C"] = None
    if header["regime"] == "Strong":
        from .ppp import g_integral

        header["g01"] = g_integral(th, spec.alpha, 0.0, 1.0)
    with open(out / "theory.json", "w") as fh:
        json.dump(header, fh, indent=2, sort_keys=True)
    with open(out / "theory.csv", "w") as fh:
        fh.write("k,p_k\n")
        for k in range(args.k_max + 1):
            fh.write(f"{k},{limit_pk(ctx, k)!r}\n")
    print(f"wrote {out / 'theory.csv'} and {out / 'theory.json'}")
    return 0


def _cmd_ppp(args) -> int:
    config = ExperimentConfig(
        experiment="ppp_limit",
        model=ModelKind.paffd(args.m),
        fitness=None,
        master_seed=args.seed,
        outputs=args.out,
        options={"alpha": args.alpha, "delta": args.delta, "theta": args.theta,
                 "n_samples": args.samples, "mode": args.mode},
    )
    bundle = run_experiment(config)
    print(json.dumps(bundle.summary, indent=2, sort_keys=True))
    return 0


def _cmd_verify(args) -> int:
    import csv

    config = ExperimentConfig(experiment="verify", outputs=args.out,
                              options={"max_n": args.n_max})
    bundle = run_experiment(config)
    # aggregate the residual table by (check, model) for the terminal
    groups: dict = {}
    with open(bundle.directory / "verify.csv") as fh:
        for row in csv.DictReader(ln for ln in fh if not ln.startswith("#")):
            key = (row["check"], row["model"], row["bound"])
            worst, count, ok = groups.get(key, (0.0, 0, True))
            val = abs(float(row["value"]))
            groups[key] = (max(worst, val), count + 1, ok and row["passed"] == "1")
    print(f"{'check':<16} {'model':<22} {'bound':<12} {'checks':>6} {'worst |value|':>14}  status")
    for (check, model, bound), (worst, count, ok) in sorted(groups.items()):
        print(f"{check:<16} {model:<22} {bound:<12} {count:>6} {worst:>14.3e}  "
              f"{'pass' if ok else 'FAIL'}")
    s = bundle.summary
    print(f"total checks: {s['checks']}  failures: {s['failures']}")
    print("PASS" if s["passed"] else "FAIL")
    return 0 if s["passed"] else 1


def _cmd_regime(args) -> int:
    config = ExperimentConfig.from_json_file(args.config)
    if config.experiment != "regime_scan":
        config = ExperimentConfig.from_dict({**config.to_dict(), "experiment": "regime_scan"})
    bundle = run_experiment(config)
    for row in bundle.summary["rows"]:
        print(row)
    return 0


def _cmd_report(args) -> int:
    from .report import emit_report

    path = emit_report(args.bundle)
    print(f"wrote {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="paflab", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="run an experiment from a JSON config")
    s.add_argument("--config", required=True)
    s.add_argument("--outputs", default=None, help="override the output directory")
    s.set_defaults(fn=_cmd_simulate)

    s = sub.add_parser("theory", help="evaluate the limiting degree law")
    s.add_argument("--fitness", required=True, help='JSON, e.g. {"kind":"Deterministic","c":1}')
    s.add_argument("--m", type=int, default=1)
    s.add_argument("--k-max", type=int, default=100)
    s.add_argument("--out", default="theory_out")
    s.set_defaults(fn=_cmd_theory)

    s = sub.add_parser("ppp", help="sample the limiting point-process functionals")
    s.add_argument("--alpha", type=float, required=True)
    s.add_argument("--delta", type=float, default=1e-3)
    s.add_argument("--theta", type=float, default=4.0)
    s.add_argument("--m", type=int, default=1)
    s.add_argument("--samples", type=int, default=10000)
    s.add_argument("--mode", choices=("strong", "extreme"), default="strong")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", default="ppp_out")
    s.set_defaults(fn=_cmd_ppp)

    s = sub.add_parser("verify", help="exact small-graph identity checks")
    s.add_argument("--n-max", type=int, default=6)
    s.add_argument("--out", default="verify_out")
    s.set_defaults(fn=_cmd_verify)

    s = sub.add_parser("regime", help="compare disorder regimes across fitness specs")
    s.add_argument("--config", required=True)
    s.set_defaults(fn=_cmd_regime)

    s = sub.add_parser("report", help="render report.md from a result bundle")
    s.add_argument("--bundle", required=True)
    s.set_defaults(fn=_cmd_report)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
