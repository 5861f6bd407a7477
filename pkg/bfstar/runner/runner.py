"""
単一の解の計算・パラメータ掃引・検証を実行するクラス

Classes
-------
- `StarSolverRunner`: 設定に従って solve / sweep / verify を実行するクラス

Usage
-----

1a. with文を使用する場合

```python
from bfstar.runner import StarSolverRunner, RunConfig

config = RunConfig(app_dir, "bfstar/config/presets/reference.ini")
with StarSolverRunner(config, "solve") as runner:
    runner.run()
exit_code = runner.exit_code
```

1b. with文を使用しない場合

```python
runner = StarSolverRunner(config, "sweep")
runner.run_sweep()

# 終了時にcleanup()を呼び出す
runner.cleanup()
```

Notes
-----
- 各 run 系メソッドはエラー情報 (`BFSErrorData`) を返し、エラーがない場合は None を返す
- 出力ディレクトリには、結果のほかに `run_status.json` と `run_config.ini` を保存する
"""
from collections import deque
from concurrent.futures import ProcessPoolExecutor
import math
import traceback
from typing import Callable, Dict, List, Optional, Tuple

from bfstar.canm import (
    FieldState, SolveReport, TerminationReason, default_initial_guess, solve as canm_solve
)
from bfstar.diagnostics import (
    RungeTriple, boson_energy, farfield_decay, first_integral_residual, jacobian_audit,
    profile_relative_change, runge_order, shooting_deviation, surface_frequency,
    surface_residual
)
from bfstar.discretization import Grid, build_grid
from bfstar.exceptions import OrderUndefinedError, StarSolverError
from bfstar.model import PhysicalParams, get_model
from bfstar.status import RunStatus
from bfstar.status import errors as ie
from bfstar.status import progress as ps
from bfstar.status import warnings as iw
from bfstar.status.progress import (
    ProgressStatus,
    DetailedProgressStatus,
    InitializingStatus,
    SolvingStatus,
    SweepingStatus,
    VerifyingStatus,
    WritingStatus,
    TerminatingStatus,
)
from .runner_config import (
    InitialGuessConfig, LogLevel, NumericsConfig, RunConfig
)
from ._logger import Logger
from ._output_io import RunOutputIO



COMMANDS = ("solve", "sweep", "verify")
"""サブコマンド"""

MIN_BISECTION_STEP = 1e-6
"""掃引の刻みをこれ以上半分にしない幅"""

RUNGE_ORDER_RANGE = (3.5, 4.5)
"""Runge の次数の許容範囲"""
FARFIELD_RATIO_RANGE = (3.8, 4.3)
"""ν'(X)/ν'(2X) の許容範囲"""
FARFIELD_X_INF = (32.0, 64.0, 128.0, 256.0)
"""遠方の減衰を調べる X_∞ の列"""
FARFIELD_RELATIVE_CHANGE = 1e-4
"""X_∞ を倍にしたときの φ(1), σ(1) の相対変化の上限"""
FIRST_INTEGRAL_TOL = 1e-12
"""第一積分の残差の上限"""
JACOBIAN_TOL = 1e-6
"""Fréchet 微分と差分の相対誤差の上限"""
SHOOTING_TOL = 1e-3
"""シューティングとの x = 1 での差の上限"""
MAX_COLD_START_ITERATIONS = 20
"""既定の初期近似からの反復回数の上限"""

RUNGE_OBSERVABLES: Dict[str, Callable[[FieldState], float]] = {
    "nu_1": lambda s: float(s.surface[0]),
    "phi_1": lambda s: float(s.surface[1]),
    "sigma_1": lambda s: float(s.surface[2]),
    "r_s": lambda s: float(s.pair.r_s),
    "omega": lambda s: float(s.pair.omega),
}
"""Runge 則で調べる量 (x = 1 の節点での値と固有値)"""


def _build_grid(numerics:NumericsConfig, grading:Optional[str]=None) -> Grid:
    return build_grid(numerics.n, numerics.x_inf,
                      grading or numerics.grading, numerics.grading_strength)


def _initial_guess(params:PhysicalParams, grid:Grid, guess:InitialGuessConfig) -> FieldState:
    return default_initial_guess(params, grid, nu_c=guess.nu_c,
                                 phi_amplitude=guess.phi_amplitude,
                                 r_s=guess.r_s, omega=guess.omega)


def _solve_point(params:PhysicalParams, numerics:NumericsConfig, guess:InitialGuessConfig
                 ) -> Tuple[Optional[FieldState], Optional[SolveReport], str]:
    """既定の初期近似から1点を解く (並列掃引のワーカー)

    Returns
    -------
    (state, report, reason)
        失敗した場合は reason に理由が入る
    """
    try:
        grid = _build_grid(numerics)
        model = get_model(params.model)
        state, report = canm_solve(_initial_guess(params, grid, guess),
                                   numerics.canm_settings(), model)
    except StarSolverError as e:
        return None, None, f"{e.__class__.__name__}: {e}"
    if not report.converged:
        return state, report, report.termination_reason.value
    return state, report, ""


def _sweep_row(value:float, state:FieldState, report:SolveReport) -> dict:
    return {
        "value": float(value),
        "r_s": float(state.pair.r_s),
        "omega": float(state.pair.omega),
        "nu_0": float(state.center[0]),
        "nu_1": float(state.surface[0]),
        "phi_0": float(state.center[1]),
        "boson_energy": float(boson_energy(state)),
        "iterations": int(report.iterations),
    }


def _relative_change(a:float, b:float) -> float:
    return abs(b - a) / max(abs(a), abs(b), 1e-300)


#
# Runner
#

class StarSolverRunner:
    """
    設定に従って solve / sweep / verify を実行するクラス

    Properties
    ----------
    progress : Tuple[ProgressStatus, DetailedProgressStatus]
        進捗状況 (エラーが発生した場合はエラー発生時の進捗状況)
    current_error : Optional[ie.BFSErrorData]
        現在のエラー情報、エラーが発生していない場合は None
    has_error : bool
    is_canceled : bool
        処理がキャンセルされたか
    is_completed : bool
        全ての処理が完了したか、中断された場合は False
    exit_code : int
        コマンドラインの終了コード
    summary : dict
        計算結果の要約
    """

    def __init__(self, config:RunConfig, command:str="solve"):
        """
        Parameters
        ----------
        config : RunConfig
            実行設定
        command : str
            "solve", "sweep", "verify" のいずれか
        """
        if command not in COMMANDS:
            raise ValueError(f"unknown command: {command}")
        self.config = config
        self.command = command

        self._logger = Logger(self.config.default_log_path)
        """ロガー"""
        self._io = RunOutputIO(self.config.output.directory, self.config.output.delimiter)
        """出力ファイルの書き込み"""
        self._status = RunStatus(self.config.output.directory)
        """実行ステータス"""
        self._status.command = command
        self._status.config_file_path = self.config.config_file_path
        self._model = get_model(self.config.params.model)
        """A(φ), V(φ) のモデル"""
        self._completed = False
        """全ての処理が完了したか、中断された場合も False"""
        self._is_canceled = False
        """致命的なエラーが発生し、以降の処理を行えなくなった場合は True"""
        self._is_initialized = False
        """初期化処理が完了したか"""
        self._issued_warnings: List[iw.BFSWarningData] = []
        """実行中に発生した警告"""

        if (err:=self._initialize()):
            self.cancel(err)

    def __enter__(self) -> "StarSolverRunner":
        return self

    def __exit__(self, exc_type, exc_value, traceback_) -> None:
        self.cleanup()

    #
    # 初期化処理関連
    #

    def _initialize_inner(self) -> Optional[ie.BFSErrorData]:
        self._init_logger()
        if (err:=self._init_output_dir()):
            return err
        self._update_progress(ProgressStatus.INITIALIZING, InitializingStatus.COMPLETED)
        self._is_initialized = True
        return None

    def _initialize(self) -> Optional[ie.BFSErrorData]:
        """初期化処理

        Returns
        -------
        Optional[ie.BFSErrorData]
            エラー情報、エラーが発生していない場合は None
        """
        if not self.config.catch_errors_on_run:
            # デバッグ用: 想定外のエラーをキャッチしない
            return self._initialize_inner()

        try:
            return self._initialize_inner()
        except Exception as e:
            return ie.UnexpectedError(e, traceback.format_exc())

    def _init_logger(self) -> None:
        """ロガーの初期化"""
        s = self._logger.init_logger(self.config.log_path, self.config.log_encoding,
                                     init_log = self.config.log_init=="ALWAYS_ON_STARTUP",
                                     logging_to_console=self.config.logging_to_console)

        # LOG_PATH が不正な場合は警告
        if not s:
            self._update_issue(iw.InvalidLogFilePath(self.config.log_path))

        self._update_progress(ProgressStatus.INITIALIZING, InitializingStatus.INIT_LOGGER)
        self._log(f"設定ファイル: {self.config.config_file_path}")
        self._log(f"パラメータ: {self.config.params.asdict()}")

    def _init_output_dir(self) -> Optional[ie.BFSErrorData]:
        """出力ディレクトリの作成"""
        try:
            self._io.init_directories()
        except OSError as e:
            return ie.OutputWriteFailed(self.config.output.directory, e)
        self._update_progress(ProgressStatus.INITIALIZING, InitializingStatus.INIT_OUTPUT_DIR)
        self._log(f"出力先: {self.config.output.directory}")
        return None

    #
    # 進捗・エラー
    #

    def _log(self, message:str, level:LogLevel=LogLevel.INFO) -> None:
        self._logger.log(self._status.progress.get()[0], message, level)

    def _update_progress(self, status:ProgressStatus, sub_status:DetailedProgressStatus,
                         count:int=0, total:int=0) -> None:
        """進捗状況を更新し、ログとステータスファイルに反映する

        Parameters
        ----------
        status : ProgressStatus
            大枠の進捗状況
        sub_status : DetailedProgressStatus
            細かい進捗状況
        count, total : int
            "({}/{})" を含むメッセージの番号と全体数
        """
        message = ps.get_progress_status_msg(status, sub_status, count, total)
        self._logger.log(status, message, LogLevel.INFO)
        self._status.progress.set(status, sub_status)
        self._status.progress.set_count(count, total)
        self.save_status()

    def _update_issue(self, issue:"ie.BFSErrorData | iw.BFSWarningData") -> None:
        """エラー/警告情報を更新する

        Notes
        -----
        - 警告: 原因が発生した直後に呼び出す (canm の issue_callback もここにつながる)
        - エラー: `.cancel()` から間接的に呼び出す
        """
        if isinstance(issue, ie.BFSErrorData):
            level = LogLevel.ERROR
            message = issue.error_message()
            self._status.current_error = issue
        else:
            level = LogLevel.WARNING
            message = issue.warning_message()
            self._issued_warnings.append(issue)
            self._status.add_warning(issue)

        self._log(message, level)
        self.save_status()

    def save_status(self) -> bool:
        """実行ステータスを保存する。書き込めない場合は False"""
        try:
            self._status.save()
        except OSError:
            return False
        return True

    #
    # プロパティ
    #

    @property
    def progress(self) -> Tuple[ProgressStatus, Optional[DetailedProgressStatus]]:
        return self._status.progress.get()

    @property
    def current_error(self) -> Optional[ie.BFSErrorData]:
        return self._status.current_error

    @property
    def has_error(self) -> bool:
        return self._status.has_error

    @property
    def is_canceled(self) -> bool:
        return self._is_canceled

    @property
    def is_completed(self) -> bool:
        return self._completed

    @property
    def is_initialized(self) -> bool:
        return self._is_initialized

    @property
    def issued_warnings(self) -> List[iw.BFSWarningData]:
        """実行中に発生した警告"""
        return self._issued_warnings

    @property
    def exit_code(self) -> int:
        """終了コード (0: 成功, 1: 予期しないエラー, 2: 計算の失敗, 3: 設定の誤り, 4: 入出力の失敗)"""
        if self.current_error is None:
            return ie.EXIT_SUCCESS
        return self.current_error.exit_code

    @property
    def summary(self) -> dict:
        return self._status.summary

    @property
    def output_files(self) -> List[str]:
        """書き出したファイル"""
        return list(self._io.written)

    #
    # 実行
    #

    def cancel(self, error:ie.BFSErrorData) -> Optional[ie.BFSErrorData]:
        """処理をキャンセルする

        Parameters
        ----------
        error : ie.BFSErrorData
            キャンセルの理由となるエラー情報

        Returns
        -------
        ie.BFSErrorData
            エラー情報
        """
        self._is_canceled = True
        self._completed = False
        self._update_issue(error)
        return self.current_error

    def _guarded(self, func:Callable[[], Optional[ie.BFSErrorData]]) -> Optional[ie.BFSErrorData]:
        """run 系メソッドの共通処理

        `CATCH_ERRORS_ON_RUN` が有効な場合、想定外の例外を `UnexpectedError` にする
        """
        if self.is_canceled:
            return self.current_error
        if not self.is_initialized:
            return self.cancel(ie.NotInitializedError())

        if not self.config.catch_errors_on_run:
            # デバッグ用: 想定外のエラーをキャッチしない
            err = func()
        else:
            try:
                err = func()
            except Exception as e:
                tr = traceback.format_exc()
                if self.config.logging_to_console:
                    print(tr)
                return self.cancel(ie.UnexpectedError(e, tr))

        if err is not None:
            return self.cancel(err)

        self._completed = True
        self._update_progress(ProgressStatus.TERMINATING, TerminatingStatus.COMPLETED)
        return None

    def run(self) -> Optional[ie.BFSErrorData]:
        """コンストラクタで指定したサブコマンドを実行する"""
        return {
            "solve": self.run_single,
            "sweep": self.run_sweep,
            "verify": self.run_verify,
        }[self.command]()

    def run_single(self) -> Optional[ie.BFSErrorData]:
        """1つの解を計算し、プロファイルとレポートを書き出す"""
        return self._guarded(self._run_single)

    def run_sweep(self) -> Optional[ie.BFSErrorData]:
        """パラメータを掃引し、要約を書き出す"""
        return self._guarded(self._run_sweep)

    def run_verify(self) -> Optional[ie.BFSErrorData]:
        """Runge 則・遠方の減衰・第一積分・Jacobian・シューティングの検証を行う"""
        return self._guarded(self._run_verify)

    def cleanup(self) -> None:
        """終了処理"""
        if self._is_initialized and not self._completed and not self._is_canceled:
            self._update_progress(ProgressStatus.TERMINATING, TerminatingStatus.SAVE_STATUS)
        self.save_status()

    #
    # 内部処理 (計算)
    #

    def _solve(self, initial:FieldState, label:str="", show_progress:bool=False
               ) -> Tuple[FieldState, Optional[SolveReport], Optional[ie.BFSErrorData]]:
        """CANM の反復を実行し、失敗をエラー情報に変換する

        Returns
        -------
        (state, report, error)
            例外で中断した場合は report が None
        """
        settings = self.config.numerics.canm_settings()

        def on_iteration(k:int, delta0:float, tau:float, delta_tau:float, pair) -> None:
            if show_progress:
                self._update_progress(ProgressStatus.SOLVING, SolvingStatus.ITERATING,
                                      k, settings.max_iter)
            self._logger.log_iteration(self._status.progress.get()[0], label,
                                       k, delta0, tau, delta_tau, pair)

        try:
            state, report = canm_solve(initial, settings, self._model,
                                       on_iteration, self._update_issue)
        except StarSolverError as e:
            return initial, None, ie.get_solver_error(e)

        self._log(f"{label}{report.termination_reason.value}: "
                  f"iterations={report.iterations}, δ={report.final_residual:.3e}, "
                  f"wall_time={report.wall_time:.2f}s")
        if report.converged:
            return state, report, None
        if report.termination_reason == TerminationReason.DIVERGED:
            return state, report, ie.Diverged(report.iterations)
        return state, report, ie.NotConverged(report.iterations, report.final_residual)

    def _profile_header(self, params:PhysicalParams, numerics:Optional[NumericsConfig]=None) -> dict:
        numerics = numerics or self.config.numerics
        header = {"command": self.command, "model": params.model}
        header.update({k: v for k, v in params.asdict().items() if k != "model"})
        header.update({"n": numerics.n, "x_inf": numerics.x_inf, "grading": numerics.grading,
                       "eps": numerics.eps, "mu_coupling": numerics.mu_coupling})
        return header

    def _state_summary(self, state:FieldState, report:SolveReport) -> dict:
        return {
            "r_s": float(state.pair.r_s),
            "omega": float(state.pair.omega),
            "nu_1": float(state.surface[0]),
            "phi_1": float(state.surface[1]),
            "sigma_1": float(state.surface[2]),
            "nu_0": float(state.center[0]),
            "boson_energy": float(boson_energy(state)),
            "surface_frequency": float(surface_frequency(state)),
            "iterations": int(report.iterations),
            "converged": bool(report.converged),
            "final_residual": float(report.final_residual),
        }

    def _write_single_outputs(self, state:FieldState, report:SolveReport
                              ) -> Optional[ie.BFSErrorData]:
        """プロファイル・レポート・プロット用スクリプトを書き出す"""
        try:
            self._update_progress(ProgressStatus.WRITING, WritingStatus.PROFILES)
            self._io.write_profile("profile.txt", state, self._profile_header(state.params),
                                   self._model)
            self._update_progress(ProgressStatus.WRITING, WritingStatus.REPORT)
            self._io.write_json("solve_report.json", {
                "params": state.params.asdict(),
                "summary": self._state_summary(state, report),
                "report": report.asdict(),
            })
            if self.config.output.emit_plots:
                self._update_progress(ProgressStatus.WRITING, WritingStatus.PLOT_SCRIPTS)
                self._io.write_plot_script("plot_profile.py", ["profile.txt"], "profile")
        except OSError as e:
            return ie.OutputWriteFailed(e.filename or self._io.output_dir, e)
        return None

    def _write_run_config(self) -> Optional[ie.BFSErrorData]:
        """実行時の設定を run_config.ini として保存する"""
        self._update_progress(ProgressStatus.WRITING, WritingStatus.RUN_CONFIG)
        file_path = self._io.file_path("run_config.ini")
        try:
            self.config.save(file_path)
        except OSError as e:
            return ie.OutputWriteFailed(file_path, e)
        self._io.written.append(file_path)
        return None

    def _run_single(self) -> Optional[ie.BFSErrorData]:
        self._update_progress(ProgressStatus.SOLVING, SolvingStatus.INITIAL_GUESS)
        try:
            grid = _build_grid(self.config.numerics)
            initial = _initial_guess(self.config.params, grid, self.config.initial_guess)
        except StarSolverError as e:
            return ie.get_solver_error(e)

        state, report, err = self._solve(initial, show_progress=True)
        self._update_progress(ProgressStatus.SOLVING, SolvingStatus.COMPLETED)
        if report is not None:
            self._status.summary = self._state_summary(state, report)

        if err is not None:
            if report is not None:
                # 収束しなかった場合も反復の履歴は残す
                try:
                    self._io.write_json("solve_report.json", {
                        "params": state.params.asdict(), "report": report.asdict()})
                except OSError:
                    pass
            return err

        if (err := self._write_single_outputs(state, report)):
            return err
        return self._write_run_config()

    #
    # 内部処理 (掃引)
    #

    def _run_sweep(self) -> Optional[ie.BFSErrorData]:
        sweep = self.config.sweep
        if sweep is None:
            return ie.InvalidConfig("SWEEP.PARAMETER", None, "no sweep parameter is set")
        values = sweep.values()

        if sweep.parallel and len(values) > 1:
            result = self._sweep_parallel(values)
        else:
            result = self._sweep_sequential(values)
        if isinstance(result, ie.BFSErrorData):
            return result
        rows, reports, last = result
        self._update_progress(ProgressStatus.SWEEPING, SweepingStatus.COMPLETED)

        if not rows:
            return ie.SweepAborted(sweep.parameter, values[-1], len(values))

        turning = min(rows, key=lambda r: r["phi_0"])
        header = self._profile_header(self.config.params)
        header.pop(sweep.parameter if sweep.parameter != "lambda" else "lam", None)
        header.update({"parameter": sweep.parameter, "start": sweep.start, "stop": sweep.stop,
                       "step": sweep.step, "parallel": sweep.parallel,
                       "dilaton_turning_point": turning["value"]})
        self._status.summary = {
            "parameter": sweep.parameter,
            "points": len(rows),
            "failed": sum(1 for v in values if v not in {r["value"] for r in rows}),
            "dilaton_turning_point": turning["value"],
            "r_s_ratio": rows[0]["r_s"] / rows[-1]["r_s"],
        }

        try:
            self._update_progress(ProgressStatus.WRITING, WritingStatus.REPORT)
            self._io.write_sweep_summary("sweep_summary.txt", rows, header)
            self._io.write_json("sweep_report.json", {
                "parameter": sweep.parameter,
                "params": self.config.params.asdict(),
                "rows": rows,
                "reports": reports,
                "dilaton_turning_point": turning["value"],
            })
            if self.config.output.emit_plots:
                self._update_progress(ProgressStatus.WRITING, WritingStatus.PLOT_SCRIPTS)
                self._io.write_plot_script("plot_sweep.py", ["sweep_summary.txt"], "sweep")
                if sweep.keep_profiles:
                    self._io.write_plot_script(
                        "plot_profiles.py",
                        [self._point_profile_name(r["value"]) for r in rows], "profile")
        except OSError as e:
            return ie.OutputWriteFailed(e.filename or self._io.output_dir, e)

        if len(values) == 1 and last is not None:
            # 1点だけの掃引は solve と同じ出力も行う
            if (err := self._write_single_outputs(*last)):
                return err
        return self._write_run_config()

    def _point_profile_name(self, value:float) -> str:
        return f"profiles/profile_{self.config.sweep.parameter}_{value:.6g}.txt"

    def _keep_profile(self, value:float, state:FieldState) -> Optional[ie.BFSErrorData]:
        if not self.config.sweep.keep_profiles:
            return None
        try:
            self._io.write_profile(self._point_profile_name(value), state,
                                   self._profile_header(state.params), self._model)
        except OSError as e:
            return ie.OutputWriteFailed(e.filename or self._io.output_dir, e)
        return None

    def _sweep_sequential(self, values:List[float]):
        """前の解を初期近似とする継続法で掃引する

        失敗した点では、直前の成功点との中点を先に計算する (刻みの半減)。
        連続した失敗が MAX_FAILURES を超えると中断する。
        """
        sweep = self.config.sweep
        name = sweep.parameter
        try:
            grid = _build_grid(self.config.numerics)
        except StarSolverError as e:
            return ie.get_solver_error(e)

        queue = deque((v, True) for v in values)
        rows: List[dict] = []
        reports: List[dict] = []
        previous: Optional[Tuple[float, FieldState]] = None
        last = None
        consecutive = 0
        done = 0
        while queue:
            value, original = queue[0]
            sub = SweepingStatus.SOLVING_POINT if original else SweepingStatus.BISECTING
            self._update_progress(ProgressStatus.SWEEPING, sub, done + 1, len(values))
            params = self.config.params_for(name, value)
            if previous is not None:
                initial = previous[1].with_params(params)
            else:
                initial = _initial_guess(params, grid, self.config.initial_guess)

            state, report, err = self._solve(initial, label=f"[{name}={value:.6g}] ")
            if err is None:
                queue.popleft()
                consecutive = 0
                done += 1 if original else 0
                rows.append(_sweep_row(value, state, report))
                reports.append({"value": value, **report.asdict()})
                previous = (value, state)
                last = (state, report)
                if (err := self._keep_profile(value, state)):
                    return err
                continue

            consecutive += 1
            self._update_issue(iw.SweepPointFailed(name, value, err.error_message()))
            if consecutive > sweep.max_failures:
                return ie.SweepAborted(name, value, consecutive)
            if previous is not None and abs(value - previous[0]) / 2.0 > MIN_BISECTION_STEP:
                queue.appendleft(((previous[0] + value) / 2.0, False))
            else:
                # 半減できない場合はこの点を飛ばす
                queue.popleft()
                done += 1 if original else 0
        return rows, reports, last

    def _sweep_parallel(self, values:List[float]):
        """各点を既定の初期近似から独立に並列計算する"""
        sweep = self.config.sweep
        name = sweep.parameter
        rows: List[dict] = []
        reports: List[dict] = []
        with ProcessPoolExecutor() as executor:
            futures = [executor.submit(_solve_point, self.config.params_for(name, v),
                                       self.config.numerics, self.config.initial_guess)
                       for v in values]
            for i, (value, future) in enumerate(zip(values, futures)):
                self._update_progress(ProgressStatus.SWEEPING, SweepingStatus.SOLVING_POINT,
                                      i + 1, len(values))
                state, report, reason = future.result()
                if reason:
                    self._update_issue(iw.SweepPointFailed(name, value, reason))
                    continue
                self._log(f"[{name}={value:.6g}] converged: iterations={report.iterations}, "
                          f"R_s={state.pair.r_s:.10f}, Ω={state.pair.omega:.10f}")
                rows.append(_sweep_row(value, state, report))
                reports.append({"value": value, **report.asdict()})
                if (err := self._keep_profile(value, state)):
                    return err
        return rows, reports, None

    #
    # 内部処理 (検証)
    #

    def _run_verify(self) -> Optional[ie.BFSErrorData]:
        checks: List[dict] = []
        report: Dict[str, object] = {"params": self.config.params.asdict()}

        def check(name:str, value:float, lower:float, upper:float) -> None:
            passed = value is not None and math.isfinite(value) and lower <= value <= upper
            checks.append({"check": name, "value": value, "lower": lower,
                           "upper": upper, "passed": bool(passed)})
            self._logger.log_check(self._status.progress.get()[0], name, value, bool(passed))

        reference = self._verify_runge(check, report)
        base = reference[0] if reference else None
        self._verify_farfield(check, report, base)

        if reference:
            finest = reference[-1]
            self._update_progress(ProgressStatus.VERIFYING, VerifyingStatus.FIRST_INTEGRAL)
            check("first_integral", first_integral_residual(finest, self._model),
                  0.0, FIRST_INTEGRAL_TOL)
            report["surface_residual"] = surface_residual(finest, self._model)

        self._update_progress(ProgressStatus.VERIFYING, VerifyingStatus.JACOBIAN_AUDIT)
        audit = jacobian_audit(self.config.params, model=self._model)
        report["jacobian_audit"] = audit.asdict()
        for block, err in audit.max_errors.items():
            check(f"jacobian.{block}", err, 0.0, JACOBIAN_TOL)

        if reference:
            self._update_progress(ProgressStatus.VERIFYING, VerifyingStatus.SHOOTING)
            check("shooting", shooting_deviation(reference[0], self._model), 0.0, SHOOTING_TOL)

        self._update_progress(ProgressStatus.VERIFYING, VerifyingStatus.COMPLETED)
        report["checks"] = checks
        failed = [c["check"] for c in checks if not c["passed"]]
        self._status.summary = {"checks": len(checks), "failed": failed}

        try:
            self._update_progress(ProgressStatus.WRITING, WritingStatus.REPORT)
            self._io.write_json("verification_report.json", report)
            self._io.write_verification_table("verification_table.txt", checks)
        except OSError as e:
            return ie.OutputWriteFailed(e.filename or self._io.output_dir, e)
        if (err := self._write_run_config()):
            return err
        return ie.VerificationFailed(failed) if failed else None

    def _verify_runge(self, check, report:dict) -> List[FieldState]:
        """n, 2n, 4n の一様格子で解き、各量の Runge の次数を調べる"""
        numerics = self.config.numerics
        states: List[FieldState] = []
        previous: Optional[FieldState] = None
        sizes = [numerics.n, 2 * numerics.n, 4 * numerics.n]
        for i, n in enumerate(sizes):
            self._update_progress(ProgressStatus.VERIFYING, VerifyingStatus.RUNGE, i + 1, len(sizes))
            grid = _build_grid(self.config.with_numerics(n=n), "uniform")
            if previous is None:
                initial = _initial_guess(self.config.params, grid, self.config.initial_guess)
            else:
                initial = previous.resampled(grid, self._model)
            state, solve_report, err = self._solve(initial, label=f"[n={n}] ")
            if err is not None:
                check(f"runge.solve_n{n}", float("nan"), 0.0, 0.0)
                return states
            if previous is None:
                check("iterations.cold_start", float(solve_report.iterations),
                      0.0, float(MAX_COLD_START_ITERATIONS))
            states.append(state)
            previous = state

        runge = {}
        for name, observe in RUNGE_OBSERVABLES.items():
            triple = RungeTriple(*(observe(s) for s in states))
            try:
                p = runge_order(triple)
            except OrderUndefinedError:
                self._update_issue(iw.OrderUndefined(name))
                p = float("nan")
            runge[name] = {"coarse": triple.coarse, "medium": triple.medium,
                           "fine": triple.fine, "order": p}
            check(f"runge.{name}", p, *RUNGE_ORDER_RANGE)
        report["runge"] = runge
        report["refinement_relative_change"] = [
            profile_relative_change(states[0], states[1]),
            profile_relative_change(states[1], states[2]),
        ]
        return states

    def _verify_farfield(self, check, report:dict, base:Optional[FieldState]) -> None:
        """刻み幅を保ったまま X_∞ を倍にしていき、ν'(X_∞) の減衰を調べる"""
        numerics = self.config.numerics
        h = numerics.x_inf / numerics.n
        states: List[FieldState] = []
        previous = base
        for i, x_inf in enumerate(FARFIELD_X_INF):
            self._update_progress(ProgressStatus.VERIFYING, VerifyingStatus.FARFIELD,
                                  i + 1, len(FARFIELD_X_INF))
            n = max(int(round(x_inf / h)), 8)
            grid = _build_grid(self.config.with_numerics(n=n, x_inf=x_inf), "uniform")
            if previous is None:
                initial = _initial_guess(self.config.params, grid, self.config.initial_guess)
            else:
                initial = previous.resampled(grid, self._model)
            state, _, err = self._solve(initial, label=f"[X_inf={x_inf:g}] ")
            if err is not None:
                check(f"farfield.solve_x{x_inf:g}", float("nan"), 0.0, 0.0)
                break
            states.append(state)
            previous = state

        if len(states) < 2:
            return
        decay = farfield_decay(states)
        report["farfield"] = decay.asdict()
        for k, ratio in enumerate(decay.ratios):
            check(f"farfield.ratio_x{states[k].grid.x_inf:g}", ratio, *FARFIELD_RATIO_RANGE)
        for a, b in zip(states[:-1], states[1:]):
            tag = f"x{a.grid.x_inf:g}"
            check(f"farfield.phi_1_change_{tag}", _relative_change(a.surface[1], b.surface[1]),
                  0.0, FARFIELD_RELATIVE_CHANGE)
            check(f"farfield.sigma_1_change_{tag}", _relative_change(a.surface[2], b.surface[2]),
                  0.0, FARFIELD_RELATIVE_CHANGE)
