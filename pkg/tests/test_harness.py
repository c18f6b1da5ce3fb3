import json
import math

import numpy as np
import pytest

from paflab import Deterministic, ModelKind, ParetoTail, Uniform
from paflab.cli import main as cli_main
from paflab.harness import ExperimentConfig, compare_regimes, run_experiment
from paflab.report import emit_report
from paflab.seeding import replication_seed, splitmix64, stream


def _config(tmp_path, **kw):
    base = dict(
        experiment="degree_dist",
        model=ModelKind.paffd(1),
        fitness=Deterministic(1.0),
        n_target=500,
        checkpoints=(100, 500),
        replications=3,
        master_seed=12,
        outputs=str(tmp_path / "out"),
    )
    base.update(kw)
    return ExperimentConfig(**base)


def test_seeding_mix_is_stable():
    assert splitmix64(0) == 16294208416658607535  # published SplitMix64 value
    assert replication_seed(1, 0) != replication_seed(1, 1)
    assert replication_seed(1, 3) == replication_seed(1, 3)
    a = stream(5, 2).random(4)
    b = stream(5, 2).random(4)
    assert np.array_equal(a, b)


def test_config_roundtrip(tmp_path):
    cfg = _config(tmp_path, options={"k_max_compare": 10})
    again = ExperimentConfig.from_dict(json.loads(json.dumps(cfg.to_dict())))
    assert again == cfg
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg.to_dict()))
    assert ExperimentConfig.from_json_file(path) == cfg


def test_config_validation(tmp_path):
    with pytest.raises(ValueError):
        _config(tmp_path, experiment="nope")
    with pytest.raises(ValueError):
        _config(tmp_path, replications=0)
    with pytest.raises(ValueError):
        _config(tmp_path, checkpoints=(500, 100))
    with pytest.raises(ValueError):
        _config(tmp_path, checkpoints=(600,))


def test_degree_dist_bundle(tmp_path):
    cfg = _config(tmp_path)
    bundle = run_experiment(cfg)
    assert bundle.manifest["complete"]
    assert (bundle.directory / "degree_dist.csv").exists()
    assert (bundle.directory / "summary.json").exists()
    body = (bundle.directory / "degree_dist.csv").read_text()
    assert body.startswith("# model=PAFFD(m=1)\nreplication,n,k,p_n_k\n")
    assert bundle.summary["tv_distance"] < 0.2
    # manifest lists every csv with its schema, and the files parse
    for name, meta in bundle.manifest["files"].items():
        lines = [ln for ln in (bundle.directory / name).read_text().splitlines()
                 if not ln.startswith("#")]
        assert lines[0].split(",") == meta["columns"]
        assert len(lines) - 1 == meta["rows"]


def test_rerun_is_byte_identical(tmp_path):
    cfg1 = _config(tmp_path, outputs=str(tmp_path / "a"))
    cfg2 = _config(tmp_path, outputs=str(tmp_path / "b"))
    run_experiment(cfg1)
    run_experiment(cfg2)
    a = (tmp_path / "a" / "degree_dist.csv").read_bytes()
    b = (tmp_path / "b" / "degree_dist.csv").read_bytes()
    assert a == b


def test_parallelism_invariance(tmp_path):
    serial = run_experiment(_config(tmp_path, outputs=str(tmp_path / "p1"), parallelism=1))
    parallel = run_experiment(_config(tmp_path, outputs=str(tmp_path / "p4"), parallelism=4))
    assert (tmp_path / "p1" / "degree_dist.csv").read_bytes() == \
        (tmp_path / "p4" / "degree_dist.csv").read_bytes()
    assert serial.summary == parallel.summary


def test_env_var_overrides_parallelism(tmp_path, monkeypatch):
    monkeypatch.setenv("PAFLAB_THREADS", "2")
    bundle = run_experiment(_config(tmp_path, outputs=str(tmp_path / "env")))
    body = (tmp_path / "env" / "degree_dist.csv").read_bytes()
    monkeypatch.delenv("PAFLAB_THREADS")
    again = run_experiment(_config(tmp_path, outputs=str(tmp_path / "noenv")))
    assert body == (tmp_path / "noenv" / "degree_dist.csv").read_bytes()
    assert bundle.summary == again.summary


def test_replications_at_seed_boundary(tmp_path):
    cfg = _config(tmp_path, n_target=100, checkpoints=(100,), replications=1)
    bundle = run_experiment(cfg)
    rows = (bundle.directory / "degree_dist.csv").read_text().splitlines()
    assert len(rows) > 2


def test_max_degree_bundle(tmp_path):
    cfg = _config(
        tmp_path, experiment="max_degree", fitness=Uniform(0.0, 1.0),
        n_target=4096, checkpoints=(512, 1024, 2048, 4096), replications=4,
    )
    bundle = run_experiment(cfg)
    assert bundle.summary["regime"] == "Weak"
    assert 0.3 < bundle.summary["mean_loglog_slope"] < 1.0
    assert 0.0 <= bundle.summary["persistent_hub_fraction"] <= 1.0
    csv_lines = (bundle.directory / "max_degree.csv").read_text().splitlines()
    assert csv_lines[1] == "replication,n,I_n,max_Z,S_n,u_n"


def test_extreme_zero_bundle(tmp_path):
    cfg = _config(
        tmp_path, experiment="extreme_zero_fraction",
        fitness=ParetoTail(0.5, 1.0, 1.0), n_target=2000,
        checkpoints=(200, 2000), replications=3,
    )
    bundle = run_experiment(cfg)
    means = bundle.summary["mean_unchanged_fraction"]
    assert set(means) == {"200", "2000"} or set(means) == {200, 2000}
    assert all(0.0 < v <= 1.0 for v in means.values())


def test_ppp_limit_bundle(tmp_path):
    cfg = ExperimentConfig(
        experiment="ppp_limit", model=ModelKind.paffd(1),
        fitness=ParetoTail(1.5, 1.0, 1.0), master_seed=3,
        outputs=str(tmp_path / "ppp"),
        options={"delta": 0.05, "n_samples": 500, "mode": "strong", "theta": 4.0},
    )
    bundle = run_experiment(cfg)
    assert bundle.summary["g01"] == pytest.approx(3 * math.pi / 32, rel=1e-8)
    assert bundle.summary["ks_sup_vs_frechet"] < 0.1
    lines = (bundle.directory / "ppp.csv").read_text().splitlines()
    assert lines[0] == "sample_id,sup_value,argmax_t,N_points"
    assert len(lines) == 501


def test_verify_bundle(tmp_path):
    cfg = ExperimentConfig(experiment="verify", outputs=str(tmp_path / "v"),
                           options={"max_n": 4})
    bundle = run_experiment(cfg)
    assert bundle.summary["passed"] is True
    assert bundle.summary["failures"] == 0


def test_regime_scan(tmp_path):
    cfg = ExperimentConfig(
        experiment="regime_scan", model=ModelKind.paffd(1),
        fitness=Uniform(0.0, 1.0), n_target=2048,
        checkpoints=(256, 512, 1024, 2048), replications=2,
        master_seed=5, outputs=str(tmp_path / "r"),
        options={"specs": [Uniform(0.0, 1.0).to_dict(),
                           ParetoTail(1.5, 1.0, 1.0).to_dict(),
                           ParetoTail(0.5, 1.0, 1.0).to_dict()]},
    )
    bundle = run_experiment(cfg)
    rows = bundle.summary["rows"]
    assert [r["regime"] for r in rows] == ["Weak", "Strong", "Extreme"]
    assert rows[0]["predicted_exponent"] == pytest.approx(2.5)
    assert rows[1]["predicted_exponent"] == pytest.approx(2.5)
    assert math.isnan(rows[2]["predicted_exponent"])


def test_compare_regimes_returns_rows(tmp_path):
    cfg = _config(tmp_path, experiment="max_degree", n_target=512,
                  checkpoints=(128, 512), replications=2)
    rows = compare_regimes(cfg, [Deterministic(1.0)])
    assert rows[0][2] == "Weak"


def test_emit_report(tmp_path):
    cfg = _config(tmp_path, outputs=str(tmp_path / "rep"))
    run_experiment(cfg)
    path = emit_report(tmp_path / "rep")
    text = path.read_text()
    assert "# paflab result report" in text
    assert (tmp_path / "rep" / "degree_ccdf.svg").exists()
    assert "no data" in text  # ppp/max_degree sections are absent here


def test_emit_report_empty_bundle(tmp_path):
    empty = tmp_path / "empty"
    empty.mkdir()
    path = emit_report(empty)
    assert "no data" in path.read_text()


# -- CLI ----------------------------------------------------------------------

def test_cli_theory(tmp_path, capsys):
    rc = cli_main(["theory", "--fitness", '{"kind": "Deterministic", "c": 1.0}',
                   "--m", "1", "--k-max", "5", "--out", str(tmp_path / "t")])
    assert rc == 0
    header = json.loads((tmp_path / "t" / "theory.json").read_text())
    assert header["theta_m"] == pytest.approx(2.0)
    assert header["regime"] == "Weak"
    assert header["exponent"] == pytest.approx(3.0)
    assert header["weak_constant_C"] == pytest.approx(4.0)
    rows = (tmp_path / "t" / "theory.csv").read_text().splitlines()
    assert rows[0] == "k,p_k"
    assert float(rows[1].split(",")[1]) == pytest.approx(2 / 3)


def test_cli_simulate_and_report(tmp_path):
    cfg = _config(tmp_path, outputs=str(tmp_path / "sim"))
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(cfg.to_dict()))
    assert cli_main(["simulate", "--config", str(cfg_path)]) == 0
    assert (tmp_path / "sim" / "manifest.json").exists()
    assert cli_main(["report", "--bundle", str(tmp_path / "sim")]) == 0
    assert (tmp_path / "sim" / "report.md").exists()


def test_cli_ppp(tmp_path):
    rc = cli_main(["ppp", "--alpha", "2.5", "--delta", "0.05", "--theta", "4.0",
                   "--samples", "200", "--seed", "1", "--out", str(tmp_path / "p")])
    assert rc == 0
    assert (tmp_path / "p" / "ppp.csv").exists()


def test_cli_verify_exit_status(tmp_path):
    rc = cli_main(["verify", "--n-max", "4", "--out", str(tmp_path / "v")])
    assert rc == 0


def test_cli_regime(tmp_path):
    cfg = ExperimentConfig(
        experiment="regime_scan", model=ModelKind.paffd(1),
        fitness=Uniform(0.0, 1.0), n_target=256, checkpoints=(64, 256),
        replications=1, master_seed=2, outputs=str(tmp_path / "rg"),
    )
    cfg_path = tmp_path / "rg.json"
    cfg_path.write_text(json.dumps(cfg.to_dict()))
    assert cli_main(["regime", "--config", str(cfg_path)]) == 0
