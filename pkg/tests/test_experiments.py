import json
import os

import numpy as np
import pytest

from tvgames.cli import main as cli_main
from tvgames.experiments import (apply_overrides, check_stored, csv_text,
                                 list_experiments, run_named, sweep,
                                 trace_columns, _base_config)


class TestConfig:
    def test_all_names_registered(self):
        names = list_experiments()
        for n in names:
            cfg = _base_config(n)
            assert cfg["name"] == n
            assert "seed" in cfg

    def test_unknown_name(self):
        with pytest.raises(KeyError):
            _base_config("nope")

    def test_overrides_dotted_and_typed(self):
        cfg = _base_config("zs-ogd")
        apply_overrides(cfg, {"game.alpha": "2", "T": "50", "seed": 7})
        assert cfg["game"]["alpha"] == 2
        assert cfg["T"] == 50
        assert cfg["seed"] == 7

    def test_overrides_reject_unknown_keys(self):
        cfg = _base_config("zs-ogd")
        with pytest.raises(KeyError):
            apply_overrides(cfg, {"game.gamma": "1"})
        with pytest.raises(KeyError):
            apply_overrides(cfg, {"nope.alpha": "1"})


class TestRunNamed:
    def test_writes_artifacts_and_reproduces_bitwise(self, tmp_path):
        out1 = tmp_path / "a"
        out2 = tmp_path / "b"
        s1 = run_named("zs-ogd", overrides={"T": 60}, seed=5, out_dir=str(out1))
        s2 = run_named("zs-ogd", overrides={"T": 60}, seed=5, out_dir=str(out2))
        assert s1.ok and s2.ok
        csv1 = open(s1.files["csv"]).read()
        csv2 = open(s2.files["csv"]).read()
        assert csv1 == csv2
        header = csv1.splitlines()[0]
        assert header == ("t,eq_gap,cum_gap_sq,reg_x,reg_y,dreg_x_max,"
                          "dreg_y_max,path2,v_a_running")
        assert os.path.exists(s1.files["trace"])
        assert json.load(open(s1.files["summary"]))["name"] == "zs-ogd"

    def test_different_seed_changes_output(self, tmp_path):
        s1 = run_named("zs-ogd", overrides={"T": 40}, seed=1,
                       out_dir=str(tmp_path / "s1"))
        s2 = run_named("zs-ogd", overrides={"T": 40}, seed=2,
                       out_dir=str(tmp_path / "s2"))
        assert open(s1.files["csv"]).read() != open(s2.files["csv"]).read()

    def test_columns_are_running_quantities(self):
        s = run_named("zs-ogd", overrides={"T": 50}, seed=3, write=False)
        assert s.cum_gap_sq >= 0
        assert s.path2 >= 0

    def test_check_stored_round_trip(self, tmp_path):
        s = run_named("zs-ogd", overrides={"T": 50}, seed=4,
                      out_dir=str(tmp_path))
        ok, msgs = check_stored(s.files["csv"])
        assert ok, msgs
        assert any("byte for byte" in m for m in msgs)
        ok2, _ = check_stored(s.files["trace"])
        assert ok2

    def test_check_stored_detects_tampering(self, tmp_path):
        s = run_named("zs-ogd", overrides={"T": 30}, seed=4,
                      out_dir=str(tmp_path))
        text = open(s.files["csv"]).read()
        open(s.files["csv"], "w").write(text.replace("\n2,", "\n2x,", 1))
        ok, msgs = check_stored(s.files["csv"])
        assert not ok
        assert any("DIFFERS" in m for m in msgs)

    def test_mediator_experiment_artifacts(self, tmp_path):
        s = run_named("metalearn-ce", overrides={"game.H": 2, "game.m": 150},
                      seed=2, out_dir=str(tmp_path))
        assert s.ok
        header = open(s.files["csv"]).read().splitlines()[0]
        assert header == "t,ce_gap_last,ce_gap_avg,mediator_dreg,reg_1,reg_2"
        ok, msgs = check_stored(s.files["csv"])
        assert ok, msgs

    def test_every_registered_experiment_margins_hold(self):
        # spec invariant: every built-in experiment's applicable checker
        # margins stay above -1e-9 at the shipped default configuration
        for name in list_experiments():
            s = run_named(name, write=False)
            assert s.ok, (name, s.violations)

    def test_potential_run_uses_gap_schema(self, tmp_path):
        s = run_named("pot-gd", overrides={"T": 30, "game.d": 6}, seed=2,
                      out_dir=str(tmp_path))
        header = open(s.files["csv"]).read().splitlines()[0]
        assert header.startswith("t,eq_gap,cum_gap_sq")
        assert s.kind == "identical-interest"


class TestSweep:
    def test_empty_grid_single_run(self, tmp_path):
        res = sweep("zs-ogd", {}, base_seed=3, out_dir=str(tmp_path),
                    workers=1, overrides={"T": 30})
        assert len(res) == 1

    def test_alpha_grid_with_derived_seeds(self, tmp_path):
        res = sweep("zs-ogd", {"game.alpha": [0.7, 1, 2]}, base_seed=3,
                    out_dir=str(tmp_path), workers=1, overrides={"T": 40})
        assert len(res) == 3
        assert len({s.seed for s in res}) == 3
        table = open(tmp_path / "zs-ogd.sweep.csv").read().splitlines()
        assert table[0] == "cell,seed,game.alpha,cum_gap_sq,final_gap,avg_gap,ok"
        assert len(table) == 4

    def test_parallel_matches_serial(self, tmp_path):
        grid = {"game.alpha": [1, 2], "seed": [5, 6]}
        r_serial = sweep("zs-ogd", grid, workers=1, overrides={"T": 30})
        r_par = sweep("zs-ogd", grid, workers=2, overrides={"T": 30})
        for a, b in zip(r_serial, r_par):
            assert a.seed == b.seed
            assert a.cum_gap_sq == b.cum_gap_sq


class TestCLI:
    def test_list(self, capsys):
        assert cli_main(["list"]) == 0
        out = capsys.readouterr().out
        assert "zs-ogd" in out and "pot-gd" in out

    def test_run_ok_exit_code(self, tmp_path, capsys):
        code = cli_main(["run", "zs-ogd", "--set", "T=40", "--seed", "3",
                         "--out", str(tmp_path)])
        assert code == 0
        assert "check" in capsys.readouterr().out

    def test_usage_errors(self, capsys):
        assert cli_main(["run", "not-an-experiment"]) == 1
        assert cli_main(["run", "zs-ogd", "--set", "bogus"]) == 1
        assert cli_main([]) == 1

    def test_io_error_exit_code(self):
        assert cli_main(["check", "/nonexistent/trace.csv"]) == 3

    def test_check_exit_code(self, tmp_path, capsys):
        cli_main(["run", "alternating-2x2", "--out", str(tmp_path)])
        code = cli_main(["check", str(tmp_path / "alternating-2x2.csv")])
        assert code == 0

    def test_sweep_cli(self, tmp_path, capsys):
        code = cli_main(["sweep", "zs-ogd", "--grid", "game.alpha=1,2",
                         "--set", "T=30", "--out", str(tmp_path),
                         "--workers", "1"])
        assert code == 0
        assert (tmp_path / "zs-ogd.sweep.csv").exists()

    def test_env_var_default_out(self, tmp_path, monkeypatch, capsys):
        monkeypatch.setenv("TVGAMES_OUT", str(tmp_path / "envout"))
        code = cli_main(["run", "alternating-2x2"])
        assert code == 0
        assert (tmp_path / "envout" / "alternating-2x2.csv").exists()


class TestCSVText:
    def test_round_trip_floats(self):
        cols = {"t": np.array([1, 2]), "x": np.array([0.1, 1e-17])}
        text = csv_text(cols)
        lines = text.splitlines()
        assert lines[0] == "t,x"
        assert float(lines[1].split(",")[1]) == 0.1
        assert float(lines[2].split(",")[1]) == 1e-17
