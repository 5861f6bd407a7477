"""runnerパッケージとコマンドラインのテスト"""
import datetime
import json
import os
import shutil
import tempfile

import numpy as np
import pytest

import app
from bfstar.canm import default_initial_guess
from bfstar.config import PRESET_DIR
from bfstar.discretization import build_grid
from bfstar.model import PhysicalParams, SpectralPair
from bfstar.runner import RunConfig, StarSolverRunner, parse_sweep_spec
from bfstar.runner import runner as runner_module
from bfstar.runner._logger import Logger, format_line
from bfstar.runner._output_io import PROFILE_COLUMNS, RunOutputIO, format_float, profile_table
from bfstar.runner.runner_config import LogLevel
from bfstar.status import STATUS_FILE_NAME
from bfstar.status import errors as ie
from bfstar.status.progress import ProgressStatus, TerminatingStatus



SMALL = {"NUMERICS.N": 512, "NUMERICS.X_INF": 32.0, "DEBUGGING.LOG_TO_CONSOLE": False}
"""h = 1/16, X_∞ = 32 の小さな構成"""


@pytest.fixture
def tmp_dir():
    d = tempfile.mkdtemp()
    yield d
    shutil.rmtree(d)

@pytest.fixture(autouse=True)
def no_env(monkeypatch):
    monkeypatch.delenv("BFSTAR_OUTPUT_DIR", raising=False)

@pytest.fixture
def state():
    params = PhysicalParams(sigma_c=0.8, mu_c=1.0, lam=0.01)
    return default_initial_guess(params, build_grid(64, 4.0))


def _small_config(tmp_dir:str, **extra) -> RunConfig:
    overrides = dict(SMALL)
    overrides.update(extra)
    return RunConfig(tmp_dir, overrides=overrides, output_dir=os.path.join(tmp_dir, "out"))


class TestOutputIO:
    def test_format_float(self):
        assert format_float(1.0) == "1.00000000000e+00"
        assert float(format_float(1.16088753279)) == 1.16088753279
        assert format_float(float("nan")) == "nan"

    def test_profile_table(self, state):
        table = profile_table(state)
        assert table.shape == (65, len(PROFILE_COLUMNS))
        np.testing.assert_array_equal(table[:, 0], state.grid.nodes)
        np.testing.assert_array_equal(table[:, 4], state.mu)

    def test_write_profile(self, tmp_dir, state):
        io = RunOutputIO(os.path.join(tmp_dir, "out"))
        io.init_directories()
        file_path = io.write_profile("profile.txt", state, {"n": 64})
        assert io.written == [file_path]
        with open(file_path, "r", encoding="utf-8") as f:
            lines = f.read().splitlines()
        assert lines[0] == "# n = 64"
        assert any(line.startswith("# r_s = ") for line in lines)
        assert lines[4] == "# " + "\t".join(PROFILE_COLUMNS)
        # コメント行を除くと数値の表として読める
        data = np.loadtxt(file_path, comments="#", delimiter="\t")
        assert data.shape == (65, 6)

    def test_verification_table(self, tmp_dir):
        io = RunOutputIO(tmp_dir, delimiter=",")
        file_path = io.write_verification_table("table.txt", [
            {"check": "runge.r_s", "value": 4.04, "lower": 3.5, "upper": 4.5, "passed": True},
        ])
        with open(file_path, "r", encoding="utf-8") as f:
            lines = f.read().splitlines()
        assert lines[0] == "# check,value,lower,upper,passed"
        assert lines[1].startswith("runge.r_s,4.04")
        assert lines[1].endswith(",1")

    def test_plot_script(self, tmp_dir):
        io = RunOutputIO(tmp_dir)
        file_path = io.write_plot_script("plot_sweep.py", ["sweep_summary.txt"], "sweep")
        with open(file_path, "r", encoding="utf-8") as f:
            text = f.read()
        assert "import matplotlib.pyplot as plt" in text
        assert "delimiter='\\t'" in text
        compile(text, file_path, "exec")
        with pytest.raises(ValueError):
            io.write_plot_script("plot.py", [], "histogram")


class TestLogger:
    def test_format(self, tmp_dir):
        logger = Logger(os.path.join(tmp_dir, "default.log"))
        log_path = os.path.join(tmp_dir, "logs", "bfstar.log")
        assert logger.init_logger(log_path, init_log=True) is True
        assert logger.log(ProgressStatus.SOLVING, "k=1", LogLevel.WARNING) is True
        with open(log_path, "r", encoding="utf-8") as f:
            line = f.read().splitlines()[0]
        assert line.startswith("[WARNING]")
        assert ", SOLVING," in line
        assert line.endswith("k=1")

    def test_fallback(self, tmp_dir):
        blocker = os.path.join(tmp_dir, "file")
        with open(blocker, "w", encoding="utf-8"):
            pass
        default = os.path.join(tmp_dir, "default.log")
        logger = Logger(default)
        # ファイルの下にはディレクトリを作れない
        assert logger.init_logger(os.path.join(blocker, "sub", "x.log")) is False
        assert logger.log_path == default

    def test_not_initialized(self):
        assert Logger("unused.log").log(ProgressStatus.INITIALIZING, "msg") is False

    def test_format_line(self):
        line = format_line(LogLevel.ERROR, ProgressStatus.VERIFYING, "runge.r_s: nan (NG)",
                           datetime.datetime(2024, 1, 2, 3, 4, 5))
        assert line.startswith("[ERROR]   2024/01/02 03:04:05, VERIFYING,")
        assert line.endswith(" runge.r_s: nan (NG)")

    def test_iteration_and_check(self, tmp_dir, capsys):
        logger = Logger(os.path.join(tmp_dir, "default.log"))
        log_path = os.path.join(tmp_dir, "bfstar.log")
        logger.init_logger(log_path, logging_to_console=True)
        assert logger.log_iteration(ProgressStatus.SOLVING, "[n=512] ", 3, 1e-4, 0.5, 2e-6,
                                    SpectralPair(1.16, 0.8))
        assert logger.log_check(ProgressStatus.VERIFYING, "shooting", 0.2, False)
        with open(log_path, "r", encoding="utf-8") as f:
            lines = f.read().splitlines()
        assert lines[0].endswith("[n=512] k=3, δ(0)=1.000e-04, τ_opt=0.5000, "
                                 "δ(τ_opt)=2.000e-06, R_s=1.1600000000, Ω=0.8000000000")
        assert lines[1].startswith("[WARNING]")
        assert lines[1].endswith("shooting: 0.2 (NG)")
        # WARNING 以上は標準エラーに出る
        captured = capsys.readouterr()
        assert "k=3" in captured.out
        assert "shooting" in captured.err


class TestRunner:
    def test_invalid_command(self, tmp_dir):
        with pytest.raises(ValueError):
            StarSolverRunner(_small_config(tmp_dir), "plot")

    def test_solve(self, tmp_dir):
        config = _small_config(tmp_dir)
        with StarSolverRunner(config, "solve") as runner:
            err = runner.run()
        assert err is None, err.error_message()
        assert runner.exit_code == 0
        assert runner.is_completed
        assert runner.progress == (ProgressStatus.TERMINATING, TerminatingStatus.COMPLETED)

        out = config.output.directory
        for name in ("profile.txt", "solve_report.json", "run_config.ini", STATUS_FILE_NAME):
            assert os.path.exists(os.path.join(out, name)), name
        assert not os.path.exists(os.path.join(out, "plot_profile.py"))

        with open(os.path.join(out, "solve_report.json"), "r", encoding="utf-8") as f:
            report = json.load(f)
        assert report["summary"]["converged"] is True
        assert report["summary"]["r_s"] == runner.summary["r_s"]
        assert report["report"]["termination_reason"] == "converged"

        with open(os.path.join(out, STATUS_FILE_NAME), "r", encoding="utf-8") as f:
            status = json.load(f)
        assert status["current_error"] is None
        assert status["progress"]["outline"] == "TERMINATING"
        assert os.path.exists(os.path.join(tmp_dir, "bfstar.log"))

        # 保存した設定を読み込むと同じ構成になる
        saved = RunConfig(tmp_dir, os.path.join(out, "run_config.ini"))
        assert saved.numerics.n == 512
        assert saved.params == config.params

    def test_solve_with_plots(self, tmp_dir):
        config = _small_config(tmp_dir, **{"OUTPUT.EMIT_PLOTS": True})
        with StarSolverRunner(config, "solve") as runner:
            runner.run()
        assert runner.exit_code == 0
        assert os.path.exists(os.path.join(config.output.directory, "plot_profile.py"))

    def test_not_converged(self, tmp_dir):
        config = _small_config(tmp_dir, **{"NUMERICS.MAX_ITER": 1})
        with StarSolverRunner(config, "solve") as runner:
            err = runner.run()
        assert err is not None
        assert runner.exit_code == 2
        assert runner.is_canceled
        assert not os.path.exists(os.path.join(config.output.directory, "profile.txt"))

    def test_sweep(self, tmp_dir):
        extra = parse_sweep_spec("sigma_c:0.8:0.7:-0.05")
        extra["SWEEP.KEEP_PROFILES"] = True
        config = _small_config(tmp_dir, **extra)
        with StarSolverRunner(config, "sweep") as runner:
            err = runner.run()
        assert err is None, err.error_message()
        assert runner.summary["points"] == 3
        assert runner.summary["failed"] == 0

        out = config.output.directory
        data = np.loadtxt(os.path.join(out, "sweep_summary.txt"), comments="#", delimiter="\t")
        assert data.shape == (3, 8)
        np.testing.assert_allclose(data[:, 0], [0.8, 0.75, 0.7])
        assert np.all(data[:, 1] > 0.0)
        assert len(os.listdir(os.path.join(out, "profiles"))) == 3

    def test_sweep_without_parameter(self, tmp_dir):
        with StarSolverRunner(_small_config(tmp_dir), "sweep") as runner:
            runner.run()
        assert runner.exit_code == 3

    def test_verify(self, tmp_dir, monkeypatch):
        # 遠方の検証は X_∞ = 32, 64 の2点に絞る
        monkeypatch.setattr(runner_module, "FARFIELD_X_INF", (32.0, 64.0))
        config = _small_config(tmp_dir)
        with StarSolverRunner(config, "verify") as runner:
            err = runner.run()
        assert runner.exit_code in (0, 2)
        if err is not None:
            assert isinstance(err, ie.VerificationFailed)

        out = config.output.directory
        assert os.path.exists(os.path.join(out, "verification_table.txt"))
        with open(os.path.join(out, "verification_report.json"), "r", encoding="utf-8") as f:
            report = json.load(f)
        assert set(report["runge"]) == {"r_s", "omega", "nu_1", "phi_1", "sigma_1"}
        assert len(report["farfield"]["x_inf"]) == 2
        assert "jacobian_audit" in report
        names = [c["check"] for c in report["checks"]]
        assert "first_integral" in names
        assert "shooting" in names
        assert runner.summary["checks"] == len(names)
        # 反復が境界条件のずれを補正するので、どの X_∞ でも解ける
        assert not any(name.startswith("farfield.solve_") for name in names)
        assert not any(name.startswith("runge.solve_") for name in names)

    @pytest.mark.slow
    def test_verify_reference(self, tmp_dir):
        config = RunConfig(tmp_dir, os.path.join(PRESET_DIR, "reference.ini"),
                           overrides={"DEBUGGING.LOG_TO_CONSOLE": False},
                           output_dir=os.path.join(tmp_dir, "out"))
        with StarSolverRunner(config, "verify") as runner:
            err = runner.run()
        assert err is None, err.error_message()
        assert runner.exit_code == 0
        assert runner.summary["failed"] == []

    @pytest.mark.slow
    def test_sweep_sigma_c_family(self, tmp_dir):
        config = RunConfig(tmp_dir, os.path.join(PRESET_DIR, "sigma_c_family.ini"),
                           overrides={"DEBUGGING.LOG_TO_CONSOLE": False},
                           output_dir=os.path.join(tmp_dir, "out"))
        with StarSolverRunner(config, "sweep") as runner:
            err = runner.run()
        assert err is None, err.error_message()
        with open(os.path.join(config.output.directory, "sweep_report.json"), "r",
                  encoding="utf-8") as f:
            rows = json.load(f)["rows"]
        assert len(rows) == 17
        r_s = np.array([r["r_s"] for r in rows])
        energy = np.array([r["boson_energy"] for r in rows])
        # σ_c とともに R_s は単調に減少し、Ω e^{-ν(0)/2} は単調に増加する
        assert np.all(np.diff(r_s) < 0.0)
        assert np.all(np.diff(energy) > 0.0)
        assert 5.0 <= r_s[0] / r_s[-1] <= 20.0
        assert runner.summary["r_s_ratio"] == pytest.approx(r_s[0] / r_s[-1])


class TestApp:
    def test_missing_config(self, tmp_dir, capsys):
        code = app.main(["solve", "--config", os.path.join(tmp_dir, "missing.ini")])
        assert code == 3
        assert "missing.ini" in capsys.readouterr().err

    @pytest.mark.parametrize("argv", [
        ["sweep", "--sweep", "sigma_c:0.1"],
        ["sweep", "--sweep", "omega:0.1:0.9:0.1"],
        ["sweep"],
        ["solve", "--n", "4"],
    ])
    def test_invalid_arguments(self, tmp_dir, argv):
        assert app.main(argv + ["--out", tmp_dir]) == 3

    def test_overrides_from_args(self):
        args = app.build_parser().parse_args(
            ["solve", "--sigma-c", "0.5", "--lambda", "2", "--n", "256", "--emit-plots"])
        assert app.overrides_from_args(args) == {
            "PHYSICS.SIGMA_C": 0.5, "PHYSICS.LAMBDA": 2.0, "NUMERICS.N": 256,
            "OUTPUT.EMIT_PLOTS": True}
