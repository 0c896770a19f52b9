import json

import numpy as np
import pytest

from rescluster.simlab import (
    ConfigError,
    EmptyFile,
    ExperimentConfig,
    ParseError,
    RaggedRows,
    ingest_csv,
    replicate_seed,
    result_lines,
    run_breakdown,
    run_convergence,
    run_pdet_vs_n,
    run_runtime,
    run_sensitivity,
)
from rescluster.simlab.cli import main
from rescluster.simlab.experiments import DetectionRecord, conditions, sensitivity_grid


def _write(tmp_path, text, name="d.csv"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_ingest_basic(tmp_path):
    d = ingest_csv(_write(tmp_path, "0,5\n5,0\n-5,0\n"))
    assert (d.n, d.dim) == (3, 2)


def test_ingest_header_and_delimiter(tmp_path):
    d = ingest_csv(_write(tmp_path, "f1;f2\n1;2\n3;4\n"), delimiter=";", has_header=True)
    np.testing.assert_array_equal(d.points, [[1, 2], [3, 4]])


def test_ingest_errors(tmp_path):
    with pytest.raises(RaggedRows) as err:
        ingest_csv(_write(tmp_path, "1,2\n3,4\n5\n"))
    assert err.value.line == 3
    with pytest.raises(ParseError) as err:
        ingest_csv(_write(tmp_path, "1,2\nx,4\n"))
    assert err.value.line == 2
    with pytest.raises(ParseError):
        ingest_csv(_write(tmp_path, "1,nan\n"))
    with pytest.raises(EmptyFile):
        ingest_csv(_write(tmp_path, "a,b\n"), has_header=True)


def test_config_validation_and_defaults():
    cfg = ExperimentConfig("breakdown")
    assert cfg.mc_runs == 100 and cfg.n_per_cluster == (250,) and cfg.eps_grid[0] == 0.0
    assert ExperimentConfig("sensitivity").mc_runs == 50
    for bad in (dict(eps_grid=(1.0,)), dict(mc_runs=-1), dict(l_min=3, l_max=2), dict(em_loss="tukey"),
                dict(penalty="aic"), dict(n_per_cluster=((1, 2),))):
        with pytest.raises(ConfigError):
            ExperimentConfig("breakdown", **bad)


def test_config_hash_ignores_workers_and_output():
    a = ExperimentConfig("pdet", workers=1, output_path="a")
    b = ExperimentConfig("pdet", workers=4, output_path="b")
    assert a.config_hash() == b.config_hash()
    assert a.config_hash() != ExperimentConfig("pdet", seed=1).config_hash()


def test_replicate_seed_stable():
    assert replicate_seed(0, "breakdown", 1, 2) == replicate_seed(0, "breakdown", 1, 2)
    assert len({replicate_seed(0, "x", c, r) for c in range(5) for r in range(5)}) == 25


def test_sensitivity_grid_shapes():
    assert list(sensitivity_grid(41.0)) == [0.0]
    assert len(sensitivity_grid(5.0)) == 9
    cfg = ExperimentConfig("sensitivity", grid_step=10.0)
    assert len(conditions(cfg)) == 25


def test_detection_record_invariant():
    with pytest.raises(ValueError):
        DetectionRecord({"eps": 0}, "finite", 1.0, {"3": 2}, 3, 0.0)


def _small(exp, **kw):
    base = dict(em_loss="huber", bic_loss="tukey", n_per_cluster=(20,), mc_runs=2, l_max=4, seed=3)
    base.update(kw)
    return ExperimentConfig(exp, **base)


def test_breakdown_histograms():
    res = run_breakdown(_small("breakdown", eps_grid=(0.0, 0.1), penalty="all"))
    assert len(res.records) == 6
    for rec in res.records:
        assert sum(rec.k_hat_histogram.values()) == rec.mc_runs == 2
        assert rec.p_detect == rec.k_hat_histogram.get("3", 0) / 2
    one = run_breakdown(_small("breakdown", eps_grid=(0.0,), mc_runs=1))
    assert sum(one.records[0].k_hat_histogram.values()) == 1


def test_workers_do_not_change_results():
    cfg = _small("pdet", n_per_cluster=(10, 20), eps_grid=(0.05,))
    a = result_lines(run_pdet_vs_n(cfg))[1:]
    b = result_lines(run_pdet_vs_n(cfg.with_(workers=2)))[1:]
    assert a == b


def test_sensitivity_single_cell():
    res = run_sensitivity(_small("sensitivity", grid_step=41.0))
    assert len(res.records) == 1 and res.records[0].condition["x"] == 0.0


def test_convergence_tables():
    res = run_convergence(_small("convergence", n_per_cluster=(30,), l_min=2, l_max=3, mc_runs=1))
    row = res.tables[0]
    assert set(row["mean_scores"]) == {"finite", "asymptotic", "schwarz"}
    assert row["l"] == [2, 3]


def test_runtime_single_point():
    res = run_runtime(_small("runtime", n_per_cluster=(20,), mc_runs=1, l_max=2))
    assert len(res.timings["points"]) == 1 and res.timings["slopes"] == {}


def test_cli_enumerate_csv(tmp_path, capsys):
    rng = np.random.default_rng(0)
    pts = np.vstack([rng.standard_normal((30, 2)), rng.standard_normal((30, 2)) + 10])
    path = tmp_path / "two.csv"
    path.write_text("a,b\n" + "\n".join(f"{x},{y}" for x, y in pts))
    code = main(["enumerate", "--input", str(path), "--header", "--lmax", "4", "--penalty", "all",
                 "--out", str(tmp_path / "r.jsonl")])
    out = capsys.readouterr().out
    assert code == 0
    assert "K_hat (finite): 2" in out
    lines = (tmp_path / "r.jsonl").read_text().splitlines()
    assert json.loads(lines[0])["kind"] == "header"
    assert (tmp_path / "r.jsonl.summary.txt").exists()


def test_cli_exit_codes(tmp_path, capsys):
    assert main(["enumerate", "--input", str(tmp_path / "missing.csv"), "--lmax", "2"]) == 3
    bad = tmp_path / "bad.csv"
    bad.write_text("1,2\n3\n")
    assert main(["enumerate", "--input", str(bad), "--lmax", "1"]) == 3
    good = tmp_path / "g.csv"
    good.write_text("1,2\n3,4\n5,7\n")
    assert main(["enumerate", "--input", str(good)]) == 2
    assert main(["enumerate", "--input", str(good), "--lmax", "9"]) == 2
    assert main(["breakdown", "--eps", "1.5"]) == 2
    assert main(["breakdown", "--max-iters", "0"]) == 2
    with pytest.raises(SystemExit) as err:
        main(["breakdown", "--em-loss", "tukey"])
    assert err.value.code == 2
    # two identical points cannot support a two-member cluster, so the finite criterion has nothing valid
    dup = tmp_path / "dup.csv"
    dup.write_text("1,1\n1,1\n")
    assert main(["enumerate", "--input", str(dup), "--lmin", "2", "--lmax", "2"]) == 4


def test_cli_experiment_writes_both_files(tmp_path):
    out = tmp_path / "b.jsonl"
    code = main(["breakdown", "--nk", "15", "--eps", "0", "--mc", "2", "--lmax", "3", "--out", str(out)])
    assert code == 0
    kinds = [json.loads(x)["kind"] for x in out.read_text().splitlines()]
    assert kinds[:2] == ["header", "config"] and "aggregate" in kinds
    assert "p_detect" in (tmp_path / "b.jsonl.summary.txt").read_text()
