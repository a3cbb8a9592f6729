import os
import re

import pytest

from krrbounds.cli import load_config, main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def write_config(path, **overrides):
    values = dict(
        beta=1.0, b=2.0, c=2.0, sigma=0.1, n_modes=16, delta=0.1,
        ell_grid="16,32,64", repetitions=2, seed=7,
        aggregate="median", burn_in=1,
        records_path="records.txt", report_path="report.csv",
    )
    values.update(overrides)
    lines = ["# test config"] + [f"{k} = {v}" for k, v in values.items()]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


class TestEffdimCommand:
    def test_figure_values(self, capsys):
        code, out, _ = run_cli(
            capsys, "effdim", "--beta", "0.1", "--b", "2", "--lambda", "1e-3"
        )
        assert code == 0
        values = {
            key: float(m.group(1))
            for key, m in {
                "exact": re.search(r"exact N\(lambda\)\s+= (\S+)", out),
                "corrected": re.search(r"corrected bound\s+= (\S+)", out),
                "claimed": re.search(r"claimed bound\s+= (\S+)", out),
            }.items()
        }
        assert values["exact"] == pytest.approx(15.208, abs=1e-3)
        assert values["corrected"] == pytest.approx(15.708, abs=1e-3)
        assert values["claimed"] == pytest.approx(6.325, abs=1e-3)
        assert "claimed < exact < corrected" in out

    def test_csv_row(self, capsys):
        code, out, _ = run_cli(
            capsys, "effdim", "--beta", "0.1", "--b", "2", "--lambda", "1e-3", "--csv"
        )
        assert code == 0
        header, row = out.strip().splitlines()
        assert header == "lambda,exact,corrected,claimed,gap_corrected,gap_claimed"
        assert len(row.split(",")) == 6

    def test_zero_lambda_usage_error(self, capsys):
        code, _, err = run_cli(capsys, "effdim", "--beta", "0.1", "--b", "2", "--lambda", "0")
        assert code == 2
        assert "lambda" in err

    def test_b_one_usage_error_names_constraint(self, capsys):
        code, _, err = run_cli(capsys, "effdim", "--beta", "0.1", "--b", "1", "--lambda", "1e-3")
        assert code == 2
        assert "b must be > 1" in err


class TestBoundsFigureCommand:
    def test_default_grid_ordering_at_1e3(self, capsys, tmp_path):
        out_path = tmp_path / "figure.csv"
        code, _, _ = run_cli(capsys, "bounds-figure", "--out", str(out_path))
        assert code == 0
        lines = out_path.read_text().splitlines()
        assert lines[0] == "lambda,exact,corrected,claimed"
        target = [ln for ln in lines[1:] if abs(float(ln.split(",")[0]) - 1e-3) < 1e-12]
        assert target, "default grid must contain lambda = 1e-3"
        lam, exact, corrected, claimed = map(float, target[0].split(","))
        assert claimed < exact < corrected

    def test_single_point(self, capsys, tmp_path):
        out_path = tmp_path / "one.csv"
        code, _, _ = run_cli(
            capsys, "bounds-figure", "--points", "1", "--lambda-min", "1e-3",
            "--lambda-max", "1e-3", "--out", str(out_path),
        )
        assert code == 0
        assert len(out_path.read_text().splitlines()) == 2

    def test_rerun_byte_identical(self, capsys, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        run_cli(capsys, "bounds-figure", "--points", "11", "--out", str(a))
        run_cli(capsys, "bounds-figure", "--points", "11", "--out", str(b))
        assert a.read_bytes() == b.read_bytes()


class TestRiskBoundCommand:
    def test_worked_example(self, capsys):
        code, out, _ = run_cli(
            capsys, "risk-bound", "--b", "2", "--c", "1.5", "--beta", "1",
            "--alpha", "1", "--R", "1", "--kappa", "1", "--M", "1", "--Sigma", "1",
            "--lambda", "0.1", "--ell", "100", "--eta", "2.207276647028654",
        )
        assert code == 0
        assert re.search(r"total\s+= 8\.23432", out)
        assert "sample_size_ok   = False" in out
        assert "lambda_ok        = True" in out

    def test_infinite_b(self, capsys):
        code, out, _ = run_cli(
            capsys, "risk-bound", "--b", "inf", "--c", "1.5", "--beta", "0.7",
            "--alpha", "1", "--R", "1", "--kappa", "1", "--M", "1", "--Sigma", "2",
            "--lambda", "0.03", "--ell", "50", "--eta", "0.5",
        )
        assert code == 0
        effdim_term = float(re.search(r"term_effdim\s+= (\S+)", out).group(1))
        assert effdim_term == pytest.approx(4.0 * 0.7 / 50, rel=1e-12)


class TestScheduleCommand:
    def test_prints_schedule_and_exponent(self, capsys):
        code, out, _ = run_cli(capsys, "schedule", "--b", "2", "--c", "1.5", "--ell", "256")
        assert code == 0
        assert re.search(r"lambda_ell\s+= 0\.0625", out)
        assert re.search(r"rate exponent\s+= 0\.75", out)

    def test_c_one_log_caveat(self, capsys):
        code, out, _ = run_cli(capsys, "schedule", "--b", "2", "--c", "1", "--ell", "100")
        assert code == 0
        assert "log(ell)" in out


class TestCounterexampleCommand:
    def test_b2(self, capsys):
        code, out, _ = run_cli(capsys, "counterexample", "--b", "2")
        assert code == 0
        bisected = float(re.search(r"threshold \(bisection\)\s+= (\S+)", out).group(1))
        witness = float(re.search(r"witness beta\s+= (\S+)", out).group(1))
        gap = float(re.search(r"gap at witness\s+= (\S+)", out).group(1))
        assert bisected == pytest.approx(0.61685, abs=1e-5)
        assert witness == pytest.approx(0.1)
        assert gap == pytest.approx(2.967, abs=1e-3)

    def test_b_one_usage_error(self, capsys):
        code, _, err = run_cli(capsys, "counterexample", "--b", "1")
        assert code == 2
        assert "b must be > 1" in err


class TestSimulateCommand:
    def test_runs_and_writes_outputs(self, capsys, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        config = write_config(tmp_path / "run.cfg")
        code, out, _ = run_cli(capsys, "simulate", "--config", str(config))
        assert code == 0
        assert (tmp_path / "records.txt").exists()
        assert (tmp_path / "report.csv").exists()
        assert "fitted slope" in out
        lines = (tmp_path / "records.txt").read_text().splitlines()
        assert len(lines) == 3 * 2  # 3 grid points x 2 repetitions

    def test_missing_config_exit_2(self, capsys, tmp_path):
        code, _, err = run_cli(capsys, "simulate", "--config", str(tmp_path / "absent.cfg"))
        assert code == 2
        assert "cannot read config" in err

    def test_invalid_c_names_field(self, capsys, tmp_path):
        config = write_config(tmp_path / "bad.cfg", c=3)
        code, _, err = run_cli(capsys, "simulate", "--config", str(config))
        assert code == 2
        assert "c must be in [1, 2]" in err

    def test_no_partial_output_on_validation_failure(self, capsys, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        config = write_config(tmp_path / "bad.cfg", repetitions=0)
        code, _, _ = run_cli(capsys, "simulate", "--config", str(config))
        assert code == 2
        assert not (tmp_path / "records.txt").exists()
        assert not (tmp_path / "report.csv").exists()

    def test_env_seed_override(self, capsys, tmp_path, monkeypatch):
        config = write_config(tmp_path / "run.cfg")
        monkeypatch.setenv("EFFDIM_SEED", "12345")
        loaded = load_config(str(config))
        assert loaded.sweep.master_seed == 12345
        monkeypatch.delenv("EFFDIM_SEED")
        assert load_config(str(config)).sweep.master_seed == 7

    def test_unknown_key_rejected(self, tmp_path):
        path = tmp_path / "bad.cfg"
        path.write_text("beta = 1.0\nmystery = 3\n", encoding="utf-8")
        with pytest.raises(ValueError, match="unknown config key"):
            load_config(str(path))
