import os
import subprocess
import sys

import pytest

from tvplots import FigureSpec, SchemaError, load_csv, render
from tvplots.cli import main as cli_main

HERE = os.path.dirname(__file__)
TINY = os.path.join(HERE, "data", "tiny.csv")
GOLDEN = os.path.join(HERE, "golden", "tiny.svg")


def tiny_spec(out_path, fmt="svg"):
    return FigureSpec(rows=[("", [("tiny", TINY)])], title="tiny",
                      out_path=str(out_path), fmt=fmt)


class TestLoadCSV:
    def test_parses_columns(self):
        cols = load_csv(TINY)
        assert cols["t"] == [1.0, 2.0, 3.0, 4.0, 5.0]
        assert len(cols["eq_gap"]) == 5

    def test_ragged_rejected(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("t,a\n1,2\n3\n")
        with pytest.raises(SchemaError, match="ragged"):
            load_csv(str(p))


class TestRenderSVG:
    def test_golden_file(self, tmp_path):
        out = tmp_path / "tiny.svg"
        render(tiny_spec(out))
        assert out.read_bytes() == open(GOLDEN, "rb").read()

    def test_deterministic_across_runs(self, tmp_path):
        a = tmp_path / "a.svg"
        b = tmp_path / "b.svg"
        render(tiny_spec(a))
        render(tiny_spec(b))
        assert a.read_bytes() == b.read_bytes()

    def test_single_csv_single_metric(self, tmp_path):
        out = tmp_path / "one.svg"
        spec = FigureSpec(rows=[("", [("tiny", TINY)])], metrics=["eq_gap"],
                          out_path=str(out))
        render(spec)
        text = out.read_text()
        assert text.startswith("<svg")
        assert out.stat().st_size > 0
        assert text.count("<polyline") == 1

    def test_missing_column_fails_closed(self, tmp_path):
        p = tmp_path / "drifted.csv"
        p.write_text("t,eq_gap\n1,0.5\n2,0.25\n")
        spec = FigureSpec(rows=[("", [("x", str(p))])],
                          metrics=["eq_gap", "cum_gap_sq"],
                          out_path=str(tmp_path / "x.svg"))
        with pytest.raises(SchemaError) as err:
            render(spec)
        msg = str(err.value)
        assert "cum_gap_sq" in msg      # what was expected
        assert "eq_gap" in msg          # what the header has
        assert not (tmp_path / "x.svg").exists()

    def test_inputs_never_modified(self, tmp_path):
        before = open(TINY, "rb").read()
        render(tiny_spec(tmp_path / "t.svg"))
        assert open(TINY, "rb").read() == before

    def test_log_panel_handles_zeros(self, tmp_path):
        p = tmp_path / "zeros.csv"
        p.write_text("t,eq_gap,cum_gap_sq,reg_x,reg_y,dreg_x_max,dreg_y_max,"
                     "path2,v_a_running\n"
                     "1,0.5,0.25,0,0,0,0,0,0\n2,0.0,0.25,0,0,0,0,0,0\n")
        out = tmp_path / "z.svg"
        render(FigureSpec(rows=[("", [("z", str(p))])], out_path=str(out)))
        assert out.read_text().startswith("<svg")


class TestRenderPNG:
    def test_png_written(self, tmp_path):
        pytest.importorskip("matplotlib")
        out = tmp_path / "tiny.png"
        render(tiny_spec(out, fmt="png"))
        assert out.stat().st_size > 0
        assert out.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def _tvgames(*args):
    return subprocess.run([sys.executable, "-m", "tvgames.cli", *args],
                          capture_output=True, text=True)


@pytest.fixture(scope="module")
def sweep_dirs(tmp_path_factory):
    """Produce real pot-gd and zs-ogd sweep outputs via the tvgames CLI."""
    root = tmp_path_factory.mktemp("runs")
    zs = root / "zs"
    pot = root / "pot"
    r1 = _tvgames("sweep", "zs-ogd", "--grid", "game.alpha=0.7,1,2",
                  "--grid", "seed=1,2", "--set", "T=60",
                  "--set", "checks=none", "--set", "cert_family=none",
                  "--out", str(zs), "--workers", "1")
    r2 = _tvgames("sweep", "pot-gd", "--grid", "game.alpha=0.1,0.2,0.5",
                  "--set", "T=40", "--set", "game.d=8",
                  "--set", "checks=none", "--out", str(pot), "--workers", "1")
    assert r1.returncode == 0, r1.stderr
    assert r2.returncode == 0, r2.stderr
    return zs, pot


class TestCLI:
    def test_renders_sweeps_into_multicurve_figures(self, sweep_dirs, tmp_path,
                                                    capsys):
        zs, pot = sweep_dirs
        figs = tmp_path / "figs"
        assert cli_main(["--input", str(zs), "--out", str(figs)]) == 0
        svg = (figs / "zs-ogd.svg").read_text()
        for label in ("alpha=0.7", "alpha=1", "alpha=2"):
            assert label in svg
        # 2 seed rows x 4 metric panels x 3 overlay curves
        assert svg.count("<polyline") == 2 * 4 * 3

        assert cli_main(["--input", str(pot), "--out", str(figs)]) == 0
        pot_svg = (figs / "pot-gd.svg").read_text()
        assert pot_svg.count("<polyline") == 1 * 4 * 3

    def test_experiment_filter(self, sweep_dirs, tmp_path):
        zs, _ = sweep_dirs
        figs = tmp_path / "figs"
        assert cli_main(["--input", str(zs), "--out", str(figs),
                         "--experiment", "zs-ogd"]) == 0
        assert (figs / "zs-ogd.svg").exists()
        assert cli_main(["--input", str(zs), "--out", str(tmp_path / "n"),
                         "--experiment", "nothing"]) == 1

    def test_single_run_directory(self, tmp_path):
        run_dir = tmp_path / "single"
        r = _tvgames("run", "alternating-2x2", "--out", str(run_dir))
        assert r.returncode == 0, r.stderr
        figs = tmp_path / "figs"
        assert cli_main(["--input", str(run_dir), "--out", str(figs)]) == 0
        assert (figs / "alternating-2x2.svg").exists()

    def test_missing_input_dir_is_io_error(self):
        assert cli_main(["--input", "/nonexistent-dir", "--out", "/tmp/x"]) == 3

    def test_schema_drift_is_usage_error(self, tmp_path, capsys):
        bad = tmp_path / "runs"
        bad.mkdir()
        (bad / "zs-ogd.csv").write_text("t,eq_gap\n1,0.5\n")
        figs = tmp_path / "figs"
        assert cli_main(["--input", str(bad), "--out", str(figs)]) == 1
        err = capsys.readouterr().err
        assert "cum_gap_sq" in err

    def test_png_format(self, sweep_dirs, tmp_path):
        pytest.importorskip("matplotlib")
        zs, _ = sweep_dirs
        figs = tmp_path / "figs"
        assert cli_main(["--input", str(zs), "--out", str(figs),
                         "--format", "png"]) == 0
        assert (figs / "zs-ogd.png").stat().st_size > 0
