"""Command-line interface: exit codes and output files for each subcommand."""

import pytest

from risec import cli, driver
from tests.test_config import BASE_TEXT

FAST_TEXT = BASE_TEXT.replace("params.m = 4", "params.m = 2").replace(
    "params.n = 8", "params.n = 1"
).replace("sweep.values = 10, 20, 30", "sweep.values = 30").replace(
    "realizations = 5", "realizations = 1"
).replace("methods = active, passive, no_ris", "methods = no_ris")


@pytest.fixture
def cfg_file(tmp_path):
    path = tmp_path / "exp.cfg"
    path.write_text(FAST_TEXT)
    return str(path)


class TestValidate:
    def test_ok(self, cfg_file, capsys):
        assert cli.main(["validate", "--config", cfg_file]) == 0
        out = capsys.readouterr().out
        assert out.startswith("ok:")
        assert "m=2 n=1" in out

    def test_bad_config(self, tmp_path, capsys):
        path = tmp_path / "bad.cfg"
        path.write_text("params.m = 2\n")
        assert cli.main(["validate", "--config", str(path)]) == 1
        assert "config error" in capsys.readouterr().err

    def test_missing_file(self, tmp_path, capsys):
        assert cli.main(["validate", "--config", str(tmp_path / "nope.cfg")]) == 1
        assert "config error" in capsys.readouterr().err


class TestRun:
    def test_writes_outputs(self, cfg_file, tmp_path, capsys):
        out_dir = tmp_path / "out"
        assert cli.main(["run", "--config", cfg_file, "--out", str(out_dir)]) == 0
        assert (out_dir / "results.csv").is_file()
        assert (out_dir / "summary.csv").is_file()
        assert "(0 failures)" in capsys.readouterr().out

    def test_no_output_dir(self, cfg_file, capsys):
        assert cli.main(["run", "--config", cfg_file]) == 1
        assert "output directory" in capsys.readouterr().err

    def test_failures_exit_2(self, cfg_file, tmp_path, monkeypatch, capsys):
        def boom(*a, **k):
            raise RuntimeError("injected")

        monkeypatch.setattr(driver, "no_ris_baseline", boom)
        out_dir = tmp_path / "out"
        assert cli.main(["run", "--config", cfg_file, "--out", str(out_dir)]) == 2
        assert "(1 failures)" in capsys.readouterr().out


class TestOracle:
    def test_small_instance(self, capsys):
        rc = cli.main(["oracle", "--m", "1", "--n", "1", "--seed", "0"])
        assert rc == 0
        out = capsys.readouterr().out
        assert "best SR:" in out and "grid points" in out

    def test_deterministic(self, capsys):
        cli.main(["oracle", "--m", "1", "--n", "1", "--seed", "3"])
        first = capsys.readouterr().out
        cli.main(["oracle", "--m", "1", "--n", "1", "--seed", "3"])
        assert capsys.readouterr().out == first

    def test_rejects_large_instance(self, capsys):
        assert cli.main(["oracle", "--m", "3", "--n", "1", "--seed", "0"]) == 1
        assert "m <= 2" in capsys.readouterr().err

    def test_no_ris_mode(self, capsys):
        rc = cli.main(["oracle", "--m", "2", "--n", "0", "--seed", "0"])
        assert rc == 0
        out = capsys.readouterr().out
        # with the surface disabled the reported reflect vector is zero
        assert "q = [0" in out
