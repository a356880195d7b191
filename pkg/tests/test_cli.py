"""End-to-end CLI behaviour: artifacts, exit codes, config handling."""

import json
import shutil
import subprocess
import xml.etree.ElementTree as ET

import pytest

from ssakit.cli import main
from ssakit.series import read_csv
from ssakit.ssa import SsaResult


def simulate(tmp_path, sub="sim", setting=4, T=700, seed=3):
    out = tmp_path / sub
    code = main(["simulate", "--setting", str(setting), "--T", str(T),
                 "--seed", str(seed), "--out", str(out)])
    assert code == 0
    return out


class TestSimulate:
    def test_writes_series_and_manifest(self, tmp_path):
        out = simulate(tmp_path)
        series = read_csv(out / "observed.csv")
        assert series.n_samples == 700
        assert series.n_channels == 8
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["setting"] == 4
        assert manifest["T"] == 700
        assert manifest["seed"] == 3
        assert manifest["k"] == 3
        assert manifest["nonstationary_indices"] == [6, 7, 8]
        assert len(manifest["mixing"]) == 8

    def test_byte_identical_across_runs(self, tmp_path):
        a = simulate(tmp_path, "a")
        b = simulate(tmp_path, "b")
        assert (a / "observed.csv").read_bytes() == (b / "observed.csv").read_bytes()
        assert (a / "manifest.json").read_bytes() == (b / "manifest.json").read_bytes()

    def test_unknown_setting_is_a_usage_error(self, tmp_path, capsys):
        code = main(["simulate", "--setting", "5", "--T", "700", "--seed", "1",
                     "--out", str(tmp_path)])
        assert code == 1
        assert "--setting must be in" in capsys.readouterr().err

    def test_short_series_rejected(self, tmp_path):
        code = main(["simulate", "--setting", "1", "--T", "100", "--seed", "1",
                     "--out", str(tmp_path)])
        assert code == 1


class TestSsa:
    def test_comb_artifacts(self, tmp_path):
        sim = simulate(tmp_path)
        out = tmp_path / "fit"
        code = main(["ssa", "--in", str(sim / "observed.csv"), "--method",
                     "comb", "--k", "3", "--K", "6", "--out", str(out)])
        assert code == 0
        result = SsaResult.from_json((out / "result.json").read_text())
        assert result.method == "comb"
        assert result.k == 3
        assert result.row_labels == ("M_m", "M_v", "M_tau1")
        components = read_csv(out / "components.csv")
        assert components.n_samples == 700
        assert components.channel_names == (
            "N1", "N2", "N3", "S1", "S2", "S3", "S4", "S5"
        )
        lines = (out / "pseudo_eigenvalues.csv").read_text().splitlines()
        assert lines[0] == "matrix," + ",".join(f"d_{j}" for j in range(1, 9))
        assert [line.split(",")[0] for line in lines[1:]] == [
            "M_m", "M_v", "M_tau1"
        ]

    def test_single_method_with_breakpoints(self, tmp_path):
        sim = simulate(tmp_path)
        out = tmp_path / "fit"
        code = main(["ssa", "--in", str(sim / "observed.csv"), "--method",
                     "save", "--k", "2", "--breakpoints", "200,400,600",
                     "--out", str(out)])
        assert code == 0
        result = SsaResult.from_json((out / "result.json").read_text())
        assert result.segmentation.breakpoints == (200, 400, 600)
        assert not (out / "pseudo_eigenvalues.csv").exists()

    def test_sir_with_too_few_intervals_warns_but_runs(self, tmp_path, capsys):
        sim = simulate(tmp_path)
        out = tmp_path / "fit"
        code = main(["ssa", "--in", str(sim / "observed.csv"), "--method",
                     "sir", "--k", "3", "--K", "2", "--out", str(out)])
        assert code == 0
        err = capsys.readouterr().err
        assert "warning: method sir needs more intervals" in err
        assert (out / "result.json").exists()

    def test_multiple_lags_require_comb(self, tmp_path, capsys):
        sim = simulate(tmp_path)
        code = main(["ssa", "--in", str(sim / "observed.csv"), "--method",
                     "save", "--K", "6", "--lags", "1,2",
                     "--out", str(tmp_path / "x")])
        assert code == 1
        assert "multiple --lags need method comb" in capsys.readouterr().err

    def test_exactly_one_segmentation_source(self, tmp_path, capsys):
        sim = simulate(tmp_path)
        base = ["ssa", "--in", str(sim / "observed.csv"), "--method", "sir",
                "--out", str(tmp_path / "x")]
        assert main(base) == 1
        assert main(base + ["--K", "6", "--breakpoints", "300"]) == 1
        err = capsys.readouterr().err
        assert "exactly one of --K and --breakpoints" in err

    def test_unknown_method_rejected(self, tmp_path):
        sim = simulate(tmp_path)
        code = main(["ssa", "--in", str(sim / "observed.csv"), "--method",
                     "pca", "--K", "6", "--out", str(tmp_path / "x")])
        assert code == 1

    def test_k_too_large_is_a_data_error(self, tmp_path, capsys):
        sim = simulate(tmp_path)
        code = main(["ssa", "--in", str(sim / "observed.csv"), "--method",
                     "sir", "--k", "8", "--K", "6", "--out", str(tmp_path / "x")])
        assert code == 2
        assert "k must satisfy" in capsys.readouterr().err

    def test_malformed_csv_is_a_data_error(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("1.0,2.0\n3.0\n")
        code = main(["ssa", "--in", str(bad), "--method", "sir", "--K", "2",
                     "--out", str(tmp_path / "x")])
        assert code == 2

    def test_missing_input_is_a_data_error(self, tmp_path):
        code = main(["ssa", "--in", str(tmp_path / "nope.csv"), "--method",
                     "sir", "--K", "2", "--out", str(tmp_path / "x")])
        assert code == 2


class TestDiagnose:
    def test_interval_stats_table(self, tmp_path):
        sim = simulate(tmp_path)
        out = tmp_path / "diag"
        code = main(["diagnose", "--in", str(sim / "observed.csv"), "--K", "4",
                     "--lag", "2", "--plot", "--out", str(out)])
        assert code == 0
        lines = (out / "interval_stats.csv").read_text().splitlines()
        assert lines[0] == "channel,interval,start,end,mean,variance,autocov_lag_2"
        assert len(lines) == 1 + 8 * 4
        assert lines[1].split(",")[0] == "X1"
        ET.fromstring((out / "diagnostics.svg").read_text())

    def test_plot_is_opt_in(self, tmp_path):
        sim = simulate(tmp_path)
        out = tmp_path / "diag"
        code = main(["diagnose", "--in", str(sim / "observed.csv"), "--K", "4",
                     "--out", str(out)])
        assert code == 0
        assert not (out / "diagnostics.svg").exists()


class TestScreeplot:
    def test_csv_and_svg_from_result(self, tmp_path):
        sim = simulate(tmp_path)
        fit = tmp_path / "fit"
        main(["ssa", "--in", str(sim / "observed.csv"), "--method", "comb",
              "--k", "3", "--K", "6", "--out", str(fit)])
        out = tmp_path / "scree"
        code = main(["screeplot", "--in", str(fit / "result.json"), "--plot",
                     "--out", str(out)])
        assert code == 0
        lines = (out / "screeplot.csv").read_text().splitlines()
        assert lines[0] == "component,value"
        assert len(lines) == 9
        assert [line.split(",")[0] for line in lines[1:]] == [
            str(i) for i in range(1, 9)
        ]
        values = [float(line.split(",")[1]) for line in lines[1:]]
        assert values == sorted(values, reverse=True)
        ET.fromstring((out / "screeplot.svg").read_text())


class TestEvaluate:
    ARGS = ["evaluate", "--settings", "1", "--methods", "sir,comb",
            "--T-grid", "600", "--K-grid", "2", "--replicates", "2",
            "--seed", "1"]

    def test_tables_and_determinism(self, tmp_path):
        a = tmp_path / "a"
        b = tmp_path / "b"
        assert main(self.ARGS + ["--out", str(a)]) == 0
        assert main(self.ARGS + ["--out", str(b)]) == 0
        results = (a / "results.csv").read_text().splitlines()
        assert len(results) == 1 + 2 * 2
        aggregate = (a / "aggregate.csv").read_text().splitlines()
        assert len(aggregate) == 1 + 2
        assert (a / "results.csv").read_bytes() == (b / "results.csv").read_bytes()
        assert (a / "aggregate.csv").read_bytes() == (b / "aggregate.csv").read_bytes()

    def test_bad_grid_rejected(self, tmp_path, capsys):
        code = main(["evaluate", "--settings", "9", "--seed", "1",
                     "--out", str(tmp_path)])
        assert code == 1
        assert "--settings" in capsys.readouterr().err


class TestErrorReporting:
    def test_json_errors_on_stderr(self, tmp_path, capsys):
        code = main(["simulate", "--setting", "5", "--T", "700", "--seed", "1",
                     "--json", "--out", str(tmp_path)])
        assert code == 1
        err = json.loads(capsys.readouterr().err)
        assert err["error"] == "usage"
        assert "--setting" in err["message"]

    def test_json_data_errors_carry_exception_kind(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("1.0,2.0\nx,3.0\n")
        code = main(["ssa", "--in", str(bad), "--method", "sir", "--K", "2",
                     "--json", "--out", str(tmp_path / "x")])
        assert code == 2
        err = json.loads(capsys.readouterr().err)
        assert err["error"] == "CsvFormatError"

    def test_missing_command(self, capsys):
        assert main([]) == 1
        assert "a command is required" in capsys.readouterr().err

    def test_missing_required_flag(self, tmp_path, capsys):
        code = main(["simulate", "--T", "700", "--seed", "1",
                     "--out", str(tmp_path)])
        assert code == 1
        assert "--setting is required" in capsys.readouterr().err


class TestConfigFile:
    def test_config_supplies_defaults_and_flags_win(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("# benchmark defaults\nsetting=2\nT=700\nseed=5\n")
        out_cfg = tmp_path / "c"
        assert main(["simulate", "--config", str(cfg), "--out", str(out_cfg)]) == 0
        assert json.loads((out_cfg / "manifest.json").read_text())["setting"] == 2
        out_flag = tmp_path / "f"
        assert main(["simulate", "--config", str(cfg), "--setting", "1",
                     "--out", str(out_flag)]) == 0
        assert json.loads((out_flag / "manifest.json").read_text())["setting"] == 1

    def test_unknown_config_key_rejected(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("setting=2\nT=700\nseed=5\nbogus=1\n")
        assert main(["simulate", "--config", str(cfg), "--out",
                     str(tmp_path / "x")]) == 1
        assert "unknown config keys" in capsys.readouterr().err

    def test_malformed_config_line_rejected(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("setting 2\n")
        assert main(["simulate", "--config", str(cfg), "--out",
                     str(tmp_path / "x")]) == 1
        assert "expected key=value" in capsys.readouterr().err

    def test_missing_config_file_rejected(self, tmp_path):
        assert main(["simulate", "--config", str(tmp_path / "nope.cfg"),
                     "--out", str(tmp_path / "x")]) == 1


@pytest.mark.skipif(shutil.which("ssakit") is None,
                    reason="console script not installed")
def test_console_script_smoke(tmp_path):
    out = tmp_path / "cli"
    proc = subprocess.run(
        ["ssakit", "simulate", "--setting", "1", "--T", "600", "--seed", "0",
         "--out", str(out)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert (out / "observed.csv").exists()
