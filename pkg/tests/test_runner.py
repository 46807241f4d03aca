"""Runner and CLI tests: artifacts, reproducibility, seeding, exit codes."""

import json

import numpy as np
import pandas as pd
import pytest

from herdnoise import cli, runner
from herdnoise.config import ExperimentConfig
from herdnoise.errors import ConfigError

TINY = """
model.kind = return_y
model.eps2 = 1.0
model.alpha = 1
run.t_end = 2.0
run.dt_sample = 1e-3
run.n_trajectories = 1
run.master_seed = 5
run.burn_in_fraction = 0.1
analysis.compute_pdf = false
analysis.compute_psd = false
"""

SMALL = """
model.kind = return_y
model.eps2 = 1.0
model.alpha = 1
run.t_end = 40.0
run.dt_sample = 1e-3
run.n_trajectories = 3
run.master_seed = 5
run.burn_in_fraction = 0.1
analysis.psd_segment = 4096
analysis.pdf_fit = 2,50
analysis.psd_fit = 1,40
"""


def read_bytes(path):
    return path.read_bytes()


class TestSeeds:
    def test_derived_seed_is_stable_and_indexed(self):
        a = runner.derive_seed(123, 0)
        b = runner.derive_seed(123, 0)
        c = runner.derive_seed(123, 1)
        d = runner.derive_seed(124, 0)
        assert a == b
        assert len({a, c, d}) == 3
        assert 0 <= a < 2 ** 32


class TestRunExperiment:
    def test_tiny_run_bookkeeping(self, tmp_path):
        cfg = ExperimentConfig.from_text(TINY)
        manifest = runner.run_experiment(cfg, out_dir=tmp_path)
        frame = pd.read_csv(tmp_path / "series.csv")
        # t_end/dt_sample samples minus the burn-in rows
        assert len(frame) == 2000 - 200
        assert list(frame.columns) == ["t", "value"]
        assert (tmp_path / "manifest.json").is_file()
        assert (tmp_path / "summary.csv").is_file()
        parsed = json.loads((tmp_path / "manifest.json").read_text())
        assert parsed["trajectory_seeds"] == manifest.seeds
        assert parsed["version"]

    def test_reruns_are_byte_identical(self, tmp_path):
        cfg = ExperimentConfig.from_text(SMALL)
        runner.run_experiment(cfg, out_dir=tmp_path / "a")
        runner.run_experiment(cfg, out_dir=tmp_path / "b")
        for name in ("series.csv", "pdf.csv", "psd.csv", "summary.csv"):
            assert read_bytes(tmp_path / "a" / name) == \
                read_bytes(tmp_path / "b" / name), name

    def test_trajectory_zero_independent_of_ensemble_size(self, tmp_path):
        cfg = ExperimentConfig.from_text(TINY)
        runner.run_experiment(cfg.override({"run.n_trajectories": "3"}),
                              out_dir=tmp_path / "three")
        runner.run_experiment(cfg, out_dir=tmp_path / "one")
        assert read_bytes(tmp_path / "three" / "series.csv") == \
            read_bytes(tmp_path / "one" / "series.csv")

    def test_worker_count_does_not_change_results(self, tmp_path):
        cfg = ExperimentConfig.from_text(SMALL)
        runner.run_experiment(cfg, out_dir=tmp_path / "serial")
        runner.run_experiment(cfg.override({"run.workers": "3"}),
                              out_dir=tmp_path / "threaded")
        for name in ("pdf.csv", "psd.csv", "summary.csv"):
            assert read_bytes(tmp_path / "serial" / name) == \
                read_bytes(tmp_path / "threaded" / name), name

    def test_manifest_config_reproduces_summary(self, tmp_path):
        cfg = ExperimentConfig.from_text(SMALL)
        first = runner.run_experiment(cfg, out_dir=tmp_path / "a")
        echoed = ExperimentConfig.from_text(first.config_text)
        second = runner.run_experiment(echoed, out_dir=tmp_path / "b")
        assert first.summary == second.summary

    def test_abm_model_runs(self, tmp_path):
        cfg = ExperimentConfig.from_text(TINY).override({
            "model.kind": "abm", "model.n_agents": "40",
            "model.sigma1": "0.5", "model.sigma2": "0.5", "model.h": "1.0",
            "run.t_end": "5.0", "run.dt_sample": "0.01"})
        runner.run_experiment(cfg, out_dir=tmp_path)
        frame = pd.read_csv(tmp_path / "series.csv")
        assert len(frame) == 450
        assert frame["value"].between(0.0, 1.0).all()

    def test_missing_output_dir_is_config_error(self):
        with pytest.raises(ConfigError, match="output.dir"):
            runner.run_experiment(ExperimentConfig.from_text(TINY))

    def test_error_annotated_with_trajectory(self, tmp_path):
        cfg = ExperimentConfig.from_text(TINY).override(
            {"model.kind": "powerlaw", "model.eta": "300.0"})
        with pytest.raises(Exception, match="trajectory 0"):
            runner.run_experiment(cfg, out_dir=tmp_path)


class TestFigureConfigs:
    def test_figure_parameter_families(self):
        for alpha in (0, 1, 2):
            c1 = runner.figure_config("fig1", alpha)
            assert c1["model.eps1"] == 0.0
            assert c1["model.eps2"] == 2.0 - alpha
            c2 = runner.figure_config("fig2", alpha)
            assert c2["model.eps1"] == 2.0
            assert c2["model.eps2"] == 2.0
            c3 = runner.figure_config("fig3", alpha)
            assert c3["run.n_trajectories"] == 1
            assert c3["analysis.compute_fq"] is True

    def test_unknown_figure(self):
        with pytest.raises(ConfigError):
            runner.figure_config("fig9", 0)

    def test_smoke_scale_run(self, tmp_path):
        rows, manifests = runner.reproduce_figure("fig1", tmp_path,
                                                  scale=0.05)
        assert (tmp_path / "comparison.csv").is_file()
        quantities = {(r["alpha"], r["quantity"]) for r in rows}
        for alpha in (0, 1, 2):
            assert (alpha, "lambda") in quantities
            assert (alpha, "beta") in quantities
        for alpha in (0, 1, 2):
            for name in ("pdf.csv", "psd.csv", "summary.csv",
                         "manifest.json"):
                assert (tmp_path / f"fig1_alpha{alpha}" / name).is_file()


class TestAnalyze:
    def test_round_trip_on_series(self, tmp_path):
        cfg = ExperimentConfig.from_text(SMALL).override(
            {"run.n_trajectories": "1"})
        runner.run_experiment(cfg, out_dir=tmp_path / "run")
        out = runner.analyze_series(tmp_path / "run" / "series.csv",
                                    cfg, tmp_path / "re")
        assert set(out) == {"pdf", "psd"}
        redone = pd.read_csv(tmp_path / "re" / "psd.csv")
        original = pd.read_csv(tmp_path / "run" / "psd.csv")
        assert np.allclose(redone["power"], original["power"])

    def test_missing_column_is_config_error(self, tmp_path):
        bad = tmp_path / "series.csv"
        bad.write_text("a,b\n1,2\n")
        with pytest.raises(ConfigError, match="'t'"):
            runner.analyze_series(bad, ExperimentConfig.defaults(),
                                  tmp_path / "out")


class TestCli:
    def test_predict_output(self, capsys):
        code = cli.main(["predict", "--kind", "return_y", "--alpha", "1",
                         "--eps2", "1"])
        out = capsys.readouterr().out
        assert code == 0
        assert "lambda = 3" in out
        assert "beta   = 1" in out

    def test_simulate_and_overrides(self, tmp_path, capsys):
        cfg_file = tmp_path / "run.cfg"
        cfg_file.write_text(TINY)
        code = cli.main(["simulate", "--config", str(cfg_file), "--out",
                         str(tmp_path / "out"), "--run.t_end", "1.0"])
        assert code == 0
        frame = pd.read_csv(tmp_path / "out" / "series.csv")
        assert len(frame) == 900

    def test_config_error_exit_code(self, tmp_path):
        cfg_file = tmp_path / "run.cfg"
        cfg_file.write_text(TINY + "run.n_trajectories = 0\n")
        code = cli.main(["simulate", "--config", str(cfg_file), "--out",
                         str(tmp_path / "out")])
        assert code == cli.EXIT_CONFIG

    def test_unknown_override_exit_code(self, tmp_path):
        cfg_file = tmp_path / "run.cfg"
        cfg_file.write_text(TINY)
        code = cli.main(["simulate", "--config", str(cfg_file), "--out",
                         str(tmp_path / "out"), "--model.bogus", "1"])
        assert code == cli.EXIT_CONFIG

    def test_numerical_failure_exit_code(self, tmp_path):
        cfg_file = tmp_path / "run.cfg"
        cfg_file.write_text(TINY + "model.kind = powerlaw\nmodel.eta = 300\n")
        code = cli.main(["simulate", "--config", str(cfg_file), "--out",
                         str(tmp_path / "out")])
        assert code == cli.EXIT_NUMERICAL

    def test_comparison_failure_exit_code(self, monkeypatch, tmp_path):
        failing = [{"figure": "fig1", "alpha": 0, "quantity": "lambda",
                    "measured": 9.0, "predicted": 3.0, "abs_error": 6.0,
                    "tolerance": 0.3, "pass": False}]
        monkeypatch.setattr(runner, "reproduce_figure",
                            lambda *a, **k: (failing, {}))
        code = cli.main(["reproduce", "--figure", "fig1", "--out",
                         str(tmp_path)])
        assert code == cli.EXIT_TOLERANCE

    def test_invalid_figure_rejected_by_parser(self):
        with pytest.raises(SystemExit) as err:
            cli.main(["reproduce", "--figure", "fig9", "--out", "x"])
        assert err.value.code == 2

    def test_analyze_cli(self, tmp_path):
        cfg_file = tmp_path / "run.cfg"
        cfg_file.write_text(TINY)
        assert cli.main(["simulate", "--config", str(cfg_file), "--out",
                         str(tmp_path / "out")]) == 0
        code = cli.main(["analyze", "--series",
                         str(tmp_path / "out" / "series.csv"), "--out",
                         str(tmp_path / "re"),
                         "--analysis.compute_psd", "false",
                         "--analysis.bins_per_decade", "5"])
        assert code == 0
        assert (tmp_path / "re" / "pdf.csv").is_file()
