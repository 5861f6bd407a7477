"""statusモジュールのテスト"""
import json
import os
import shutil
import tempfile

import pytest

from bfstar.status import errors as ie
from bfstar.status import warnings as iw
from bfstar.status.progress import (
    ProgressStatus, InitializingStatus, SolvingStatus, SweepingStatus,
    VerifyingStatus, TerminatingStatus,
    get_progress_status_msg, get_detailed_progress_status_from_str
)
from bfstar.status.status import RunProgress, RunStatus, STATUS_FILE_NAME



@pytest.fixture
def tmp_dir():
    d = tempfile.mkdtemp()
    yield d
    shutil.rmtree(d)


def test_run_progress():
    """RunProgressのテスト"""
    progress = RunProgress()
    assert progress.get() == (ProgressStatus.INITIALIZING, None)
    assert progress.is_completed() is False

    progress.set(ProgressStatus.SOLVING, SolvingStatus.ITERATING)
    progress.set_count(3, 50)
    assert (progress.count, progress.total) == (3, 50)

    # 同じ進捗を設定した場合、カウンタは初期化されない
    progress.set(ProgressStatus.SOLVING, SolvingStatus.ITERATING)
    assert progress.count == 3

    # 辞書形式との相互変換
    restored = RunProgress(**progress.asdict())
    assert restored.get() == (ProgressStatus.SOLVING, SolvingStatus.ITERATING)
    assert (restored.count, restored.total) == (3, 50)

    # 進捗が変わるとカウンタは 0 に戻る
    progress.set(ProgressStatus.TERMINATING, TerminatingStatus.COMPLETED)
    assert progress.count == 0 and progress.total == 0
    assert progress.is_completed() is True


def test_progress_messages():
    msg = get_progress_status_msg(ProgressStatus.SOLVING, SolvingStatus.ITERATING, 3, 50)
    assert "(3/50)" in msg
    msg = get_progress_status_msg(ProgressStatus.SWEEPING, SweepingStatus.SOLVING_POINT, 2, 17)
    assert "(2/17)" in msg
    # "({}/{})" を含まないメッセージはそのまま
    assert get_progress_status_msg(ProgressStatus.INITIALIZING, InitializingStatus.COMPLETED) \
        .endswith("(3/3)")
    assert get_progress_status_msg(ProgressStatus.VERIFYING, VerifyingStatus.COMPLETED) != ""


def test_detailed_status_from_str():
    assert get_detailed_progress_status_from_str("VERIFYING", "RUNGE") == VerifyingStatus.RUNGE
    with pytest.raises(ValueError):
        get_detailed_progress_status_from_str("UNKNOWN", "RUNGE")
    with pytest.raises(KeyError):
        get_detailed_progress_status_from_str("SOLVING", "RUNGE")


class TestRunStatus:
    def test_save_and_load(self, tmp_dir):
        status = RunStatus(os.path.join(tmp_dir, "out"))
        status.command = "solve"
        status.progress.set(ProgressStatus.SOLVING, SolvingStatus.ITERATING)
        status.progress.set_count(7, 50)
        status.current_error = ie.NotConverged(50, 1.5e-6)
        status.add_warning(iw.ResidualIncrease(2, 1e-3, 2e-3))
        status.summary = {"r_s": 1.16, "omega": 0.80}
        status.save()

        file_path = os.path.join(tmp_dir, "out", STATUS_FILE_NAME)
        assert status.file_path == file_path
        with open(file_path, "r", encoding="utf-8") as f:
            data = json.load(f)
        assert data["current_error"]["exit_code"] == 2

        loaded = RunStatus(os.path.join(tmp_dir, "out"))
        loaded.load()
        assert loaded.command == "solve"
        assert loaded.progress.get() == (ProgressStatus.SOLVING, SolvingStatus.ITERATING)
        assert loaded.progress.count == 7
        assert loaded.has_error
        assert isinstance(loaded.current_error, ie.NotConverged)
        assert loaded.current_error.error_message() == status.current_error.error_message()
        assert len(loaded.warnings) == 1
        assert isinstance(loaded.warnings[0], iw.ResidualIncrease)
        assert loaded.summary == {"r_s": 1.16, "omega": 0.80}
        assert loaded.updated_at != ""

    def test_load_missing_or_broken(self, tmp_dir):
        status = RunStatus(tmp_dir)
        status.load()
        assert status.has_error is False

        with open(os.path.join(tmp_dir, STATUS_FILE_NAME), "w", encoding="utf-8") as f:
            f.write("{broken")
        status.load()
        assert status.progress.get() == (ProgressStatus.INITIALIZING, None)

    def test_unknown_warning_is_skipped(self, tmp_dir):
        data = {"warnings": [{"name": "NoSuchWarning", "data": {}},
                             {"name": "OrderUndefined", "data": {"observable": "nu_1"}}]}
        with open(os.path.join(tmp_dir, STATUS_FILE_NAME), "w", encoding="utf-8") as f:
            json.dump(data, f)
        status = RunStatus(tmp_dir)
        status.load()
        assert [w.name for w in status.warnings] == ["OrderUndefined"]


class TestErrors:
    @pytest.mark.parametrize("error, exit_code", [
        (ie.UnexpectedError("boom"), 1),
        (ie.NotConverged(50, 1e-3), 2),
        (ie.SweepAborted("sigma_c", 0.45, 5), 2),
        (ie.VerificationFailed(["runge_order"]), 2),
        (ie.InvalidConfig("NUMERICS.N", 40, "out of range"), 3),
        (ie.ConfigFileNotFound("missing.ini"), 3),
        (ie.OutputWriteFailed("out/profile.txt", OSError("disk full")), 4),
    ])
    def test_from_json(self, error, exit_code):
        restored = ie.from_json(error.name, error.asdict())
        assert type(restored) is type(error)
        assert restored.exit_code == exit_code
        assert restored.error_message() == error.error_message()

    def test_unknown_error(self):
        assert isinstance(ie.from_json("NoSuchError", {}), ie.UnexpectedError)

    def test_solver_error_mapping(self):
        from bfstar.exceptions import MetricBreakdownError
        err = ie.get_solver_error(MetricBreakdownError(0.75))
        assert isinstance(err, ie.MetricBreakdown)
        assert err.exit_code == 2
        assert err.exception_name == "MetricBreakdownError"

    def test_invalid_config_message(self):
        err = ie.InvalidConfig("NUMERICS.N", 40, "value 4 out of range [8, inf)")
        assert "NUMERICS.N (line 40)" in err.error_message()


class TestWarnings:
    @pytest.mark.parametrize("warning", [
        iw.TrialStepBreakdown(3, 0.25, 1.5),
        iw.NegativeFermiMomentum(2, -1e-3),
        iw.SweepPointFailed("mu_c", 0.5, "NotConverged"),
        iw.OrderUndefined("phi_1"),
    ])
    def test_from_json(self, warning):
        restored = iw.from_json(warning.name, warning.asdict())
        assert restored.warning_message() == warning.warning_message()

    def test_unknown_warning(self):
        with pytest.raises(ValueError):
            iw.from_json("NoSuchWarning", {})
