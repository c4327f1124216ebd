"""End-to-end tests of the scenario runner.

Everything goes through the real argument parser and file outputs in a
temp directory; determinism is checked on raw bytes.
"""

import hashlib

import numpy as np
import pytest

from fragility.cli import ScenarioConfig, main, parse_config
from fragility.errors import ConfigError

BASE = {
    "N": 30,
    "r": 1.0,
    "c": 0.5,
    "a0": -2.0,
    "a1": -1.0,
    "eta": 0.4,
    "n1_0": 10,
    "horizon": 20.0,
    "runs": 50,
    "seed": 7,
    "buckets": 10,
}


def write_config(path, drop=(), **overrides):
    fields = {**BASE, **overrides}
    for key in drop:
        fields.pop(key, None)
    lines = [f"{key} = {value}" for key, value in fields.items()]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return str(path)


def file_hashes(folder):
    return {
        p.name: hashlib.sha256(p.read_bytes()).hexdigest()
        for p in sorted(folder.iterdir())
    }


def summary_value(folder, key):
    for line in (folder / "summary.txt").read_text().splitlines():
        stripped = line.strip()
        if stripped.startswith(f"{key} = "):
            return stripped.split(" = ", 1)[1]
    raise KeyError(key)


class TestParseConfig:
    def test_minimal_schema_with_defaults(self, tmp_path):
        cfg = parse_config(
            write_config(
                tmp_path / "s.cfg",
                N=100,
                r=1,
                c=0.5,
                a0=0.5,
                a1=-1,
                eta=0.4,
                n1_0=50,
                horizon=100,
                runs=1000,
                seed=42,
                drop=("buckets",),
            )
        )
        assert isinstance(cfg, ScenarioConfig)
        assert cfg.params.N == 100
        assert cfg.params.P == 1.0
        assert cfg.params.shock_lo == 0.75
        assert cfg.params.shock_hi == 1.25
        assert cfg.buckets == 200
        assert cfg.dt_override is None
        assert cfg.outputs == ()

    def test_comments_and_blank_lines_ignored(self, tmp_path):
        path = tmp_path / "s.cfg"
        body = "\n".join(
            ["# scenario", ""]
            + [f"{k} = {v}  # inline note" for k, v in BASE.items()]
        )
        path.write_text(body + "\n", encoding="utf-8")
        cfg = parse_config(path)
        assert cfg.seed == 7

    def test_outputs_key_parsed(self, tmp_path):
        cfg = parse_config(
            write_config(tmp_path / "s.cfg", outputs="macro, master")
        )
        assert cfg.outputs == ("macro", "master")

    def test_unknown_key_named_with_line(self, tmp_path):
        path = tmp_path / "s.cfg"
        write_config(path)
        path.write_text(path.read_text() + "wobble = 3\n", encoding="utf-8")
        with pytest.raises(ConfigError, match=r"line 12: unknown key 'wobble'"):
            parse_config(path)

    def test_duplicate_key_named_with_both_lines(self, tmp_path):
        path = tmp_path / "s.cfg"
        write_config(path)
        path.write_text(path.read_text() + "N = 40\n", encoding="utf-8")
        with pytest.raises(ConfigError, match=r"duplicate key 'N'.*line 1"):
            parse_config(path)

    def test_missing_separator_rejected(self, tmp_path):
        path = tmp_path / "s.cfg"
        path.write_text("N 30\n", encoding="utf-8")
        with pytest.raises(ConfigError, match=r"line 1: expected 'key = value'"):
            parse_config(path)

    def test_share_bound_violation_names_key(self, tmp_path):
        with pytest.raises(ConfigError, match=r"eta out of \[0,1\]: 1.5"):
            parse_config(write_config(tmp_path / "s.cfg", eta=1.5))

    def test_missing_required_keys_listed(self, tmp_path):
        with pytest.raises(ConfigError, match=r"missing required keys: .*seed"):
            parse_config(write_config(tmp_path / "s.cfg", drop=("seed", "r")))

    def test_type_mismatch_named(self, tmp_path):
        with pytest.raises(ConfigError, match=r"N must be an integer, got 'abc'"):
            parse_config(write_config(tmp_path / "s.cfg", N="abc"))

    def test_bad_output_kind_rejected(self, tmp_path):
        with pytest.raises(ConfigError, match=r"outputs entry 'plot'"):
            parse_config(write_config(tmp_path / "s.cfg", outputs="macro, plot"))

    def test_negative_seed_rejected(self, tmp_path):
        with pytest.raises(ConfigError, match=r"seed must be nonnegative"):
            parse_config(write_config(tmp_path / "s.cfg", seed=-1))

    def test_occupation_above_population_rejected(self, tmp_path):
        with pytest.raises(ConfigError, match=r"n1_0 out of \[0, 30\]"):
            parse_config(write_config(tmp_path / "s.cfg", n1_0=31))

    def test_unreadable_file_rejected(self, tmp_path):
        with pytest.raises(ConfigError, match="cannot read config"):
            parse_config(tmp_path / "nope.cfg")


class TestCommands:
    def test_macro_csv_schema(self, tmp_path, capsys):
        cfg = write_config(tmp_path / "s.cfg")
        out = tmp_path / "out"
        assert main(["macro", "--config", cfg, "--out", str(out)]) == 0
        lines = (out / "macro.csv").read_text().splitlines()
        assert lines[0] == "t,m,var_s,Y"
        assert len(lines) == 1 + BASE["buckets"] + 1
        printed = capsys.readouterr().out
        assert "macro.csv" in printed and "summary.txt" in printed

    def test_calibration_block_identities(self, tmp_path):
        cfg = write_config(tmp_path / "s.cfg")
        out = tmp_path / "out"
        assert main(["calibrate", "--config", cfg, "--out", str(out)]) == 0
        lam = float(summary_value(out, "lambda"))
        gamma = float(summary_value(out, "gamma"))
        zeta = float(summary_value(out, "zeta"))
        iota = float(summary_value(out, "iota"))
        assert lam == pytest.approx(zeta * (1.0 - BASE["eta"]), rel=1e-10)
        assert gamma == pytest.approx(iota * BASE["eta"], rel=1e-10)

    def test_simulate_single_run_writes_trajectory(self, tmp_path):
        cfg = write_config(tmp_path / "s.cfg", runs=1)
        out = tmp_path / "out"
        assert main(["simulate", "--config", cfg, "--out", str(out)]) == 0
        lines = (out / "trajectory.csv").read_text().splitlines()
        assert lines[0] == "t,N1"
        assert lines[1] == "0,10"
        assert not (out / "ensemble.csv").exists()

    def test_simulate_many_runs_writes_ensemble(self, tmp_path):
        cfg = write_config(tmp_path / "s.cfg")
        out = tmp_path / "out"
        assert main(["simulate", "--config", cfg, "--out", str(out)]) == 0
        lines = (out / "ensemble.csv").read_text().splitlines()
        assert lines[0] == "t,mean_n1,var_n1"
        assert len(lines) == 1 + BASE["buckets"] + 1
        assert not (out / "trajectory.csv").exists()

    def test_master_distribution_sums_to_one(self, tmp_path):
        cfg = write_config(tmp_path / "s.cfg")
        out = tmp_path / "out"
        assert main(["master", "--config", cfg, "--out", str(out)]) == 0
        lines = (out / "master.csv").read_text().splitlines()
        assert lines[0] == "k,p"
        ks = [int(row.split(",")[0]) for row in lines[1:]]
        ps = np.array([float(row.split(",")[1]) for row in lines[1:]])
        assert ks == list(range(BASE["N"] + 1))
        assert ps.sum() == pytest.approx(1.0, abs=1e-9)

    def test_equilibrium_outputs(self, tmp_path):
        cfg = write_config(tmp_path / "s.cfg")
        out = tmp_path / "out"
        assert main(["equilibrium", "--config", cfg, "--out", str(out)]) == 0
        lines = (out / "potential.csv").read_text().splitlines()
        assert lines[0] == "n,U"
        assert len(lines) > 100
        assert float(summary_value(out, "beta")) != 0.0
        assert 0.0 < float(summary_value(out, "n_star")) < 1.0

    def test_compare_outputs_and_summary_block(self, tmp_path):
        cfg = write_config(tmp_path / "s.cfg")
        out = tmp_path / "out"
        assert main(["compare", "--config", cfg, "--out", str(out)]) == 0
        lines = (out / "compare.csv").read_text().splitlines()
        assert (
            lines[0]
            == "t,ensemble_mean,master_mean,drift_mean,ensemble_var,master_var,gaussian_var"
        )
        assert len(lines) == 1 + BASE["buckets"] + 1
        first = lines[1].split(",")
        assert float(first[0]) == 0.0
        assert float(first[1]) == float(first[2]) == float(first[3]) == 10.0
        for key in ("m_star", "var_star", "Y_e", "beta", "n_star"):
            summary_value(out, key)
        assert float(summary_value(out, "binomial_check_linf")) <= 1e-12


class TestDeterminismAndExitCodes:
    def test_same_config_byte_identical(self, tmp_path):
        cfg = write_config(tmp_path / "s.cfg")
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        assert main(["compare", "--config", cfg, "--out", str(out_a)]) == 0
        assert main(["compare", "--config", cfg, "--out", str(out_b)]) == 0
        hashes_a, hashes_b = file_hashes(out_a), file_hashes(out_b)
        assert set(hashes_a) == {"compare.csv", "summary.txt"}
        assert hashes_a == hashes_b

    def test_seed_flag_overrides_config(self, tmp_path):
        cfg = write_config(tmp_path / "s.cfg", runs=1)
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        assert main(["simulate", "--config", cfg, "--out", str(out_a)]) == 0
        assert (
            main(["simulate", "--config", cfg, "--out", str(out_b), "--seed", "8"])
            == 0
        )
        a = (out_a / "trajectory.csv").read_bytes()
        b = (out_b / "trajectory.csv").read_bytes()
        assert a != b

    def test_config_error_exits_two(self, tmp_path, capsys):
        cfg = write_config(tmp_path / "s.cfg", eta=1.5)
        assert main(["macro", "--config", cfg, "--out", str(tmp_path / "o")]) == 2
        assert "config error" in capsys.readouterr().err

    def test_degenerate_calibration_exits_three(self, tmp_path, capsys):
        cfg = write_config(
            tmp_path / "s.cfg", r=0.5, c=0.3, a0=0.2, a1=0.2, eta=0.0
        )
        out = tmp_path / "o"
        assert main(["macro", "--config", cfg, "--out", str(out)]) == 3
        assert "numeric error" in capsys.readouterr().err
        assert not out.exists()

    def test_unstable_step_override_exits_two(self, tmp_path, capsys):
        cfg = write_config(tmp_path / "s.cfg", dt_override=10.0)
        assert main(["master", "--config", cfg, "--out", str(tmp_path / "o")]) == 2
        assert "stability" in capsys.readouterr().err
