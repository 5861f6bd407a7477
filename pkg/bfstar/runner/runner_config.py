"""
実行設定

既定の config.ini に、ユーザ指定の設定ファイル (プリセット) と
コマンドライン引数の値を順に重ねて `RunConfig` を作る。

Classes
-------
- `LogLevel` : ログレベル
- `NumericsConfig` : 離散化と反復の設定
- `InitialGuessConfig` : 初期近似の設定
- `SweepConfig` : パラメータ掃引の設定
- `OutputConfig` : 出力の設定
- `RunConfig` : 実行設定全体

Functions
---------
- `parse_sweep_spec` : `name:start:stop:step` 形式の掃引指定を解析する
"""
from dataclasses import dataclass, replace
from enum import Enum
import math
import os
from os import path
from typing import Dict, List, Optional

import numpy as np

from bfstar.canm import CanmSettings
from bfstar.config import ConfigEditor, ConfigParseError, DEFAULT_CONFIG_PATH
from bfstar.discretization import GRADINGS
from bfstar.model import MODEL_REGISTRY, PhysicalParams, SWEEPABLE_PARAMETERS



class LogLevel(Enum):
    """ログレベル"""
    INFO = 1
    WARNING = 2
    ERROR = 3
MAX_LOG_LEVEL_LENGTH = max([len(s.name) for s in LogLevel])

MIN_INTERVALS = 8
"""分割数 N の下限"""

_SWEEP_TOL = 1e-9


def parse_sweep_spec(text:str) -> Dict[str, object]:
    """`sigma_c:0.1:0.9:0.05` 形式の掃引指定を設定の上書き値に変換する

    Returns
    -------
    dict
        `SECTION.KEY` をキーとする上書き値

    Raises
    ------
    ConfigParseError
        形式が不正な場合
    """
    parts = text.split(":")
    if len(parts) != 4:
        raise ConfigParseError(f"expected name:start:stop:step, got '{text}'", field="SWEEP")
    name = parts[0].strip().lower()
    try:
        start, stop, step = (float(p) for p in parts[1:])
    except ValueError as e:
        raise ConfigParseError(f"non-numeric sweep bounds in '{text}'", field="SWEEP") from e
    return {"SWEEP.PARAMETER": name, "SWEEP.START": start,
            "SWEEP.STOP": stop, "SWEEP.STEP": step}


@dataclass(frozen=True)
class NumericsConfig:
    """離散化と反復の設定"""
    n: int = 2048
    """区間 [0, X_∞] の分割数"""
    x_inf: float = 128.0
    """実際の無限遠 X_∞"""
    grading: str = "uniform"
    """格子の種類"""
    grading_strength: float = 2.0
    """condensed 格子の集中度"""
    eps: float = 1e-10
    """終了判定の閾値"""
    max_iter: int = 50
    """反復回数の上限"""
    tau_min: float = 1e-3
    """τ の下限"""
    mu_coupling: bool = False
    """μ の (ν, φ) 依存を線形化に含めるか"""

    def canm_settings(self) -> CanmSettings:
        return CanmSettings(eps=self.eps, max_iter=self.max_iter,
                            tau_min=self.tau_min, mu_coupling=self.mu_coupling)


@dataclass(frozen=True)
class InitialGuessConfig:
    """初期近似の設定"""
    nu_c: float = -1.0
    """ν の中心値"""
    phi_amplitude: float = -0.05
    """φ の振幅"""
    r_s: float = 1.0
    """R_s の初期値"""
    omega: float = 0.9
    """Ω の初期値"""


@dataclass(frozen=True)
class SweepConfig:
    """パラメータ掃引の設定"""
    parameter: str
    """掃引するパラメータ名"""
    start: float
    stop: float
    step: float
    parallel: bool = False
    """各点を独立に並列計算するか"""
    keep_profiles: bool = False
    """各点のプロファイルを保存するか"""
    max_failures: int = 4
    """連続して失敗できる回数"""

    def values(self) -> List[float]:
        """掃引する値の列 (start から step 刻みで stop まで)"""
        if abs(self.stop - self.start) <= _SWEEP_TOL * max(1.0, abs(self.start)):
            return [self.start]
        count = math.floor((self.stop - self.start) / self.step + _SWEEP_TOL) + 1
        return [float(v) for v in np.round(self.start + self.step * np.arange(count), 12)]


@dataclass(frozen=True)
class OutputConfig:
    """出力の設定"""
    directory: str
    """出力先ディレクトリ"""
    emit_plots: bool = False
    """プロット用スクリプトを出力するか"""
    delimiter: str = "\t"
    """区切り文字"""


class RunConfig:
    """実行設定全体

    Usage
    -----
    ```python
    config = RunConfig(app_dir, "bfstar/config/presets/reference.ini",
                       overrides={"NUMERICS.N": 4096}, output_dir="out")
    config.params.sigma_c
    config.numerics.canm_settings()
    ```
    """

    def __init__(self, app_dir:str, config_path:Optional[str]=None,
                 overrides:Optional[Dict[str, object]]=None,
                 output_dir:Optional[str]=None):
        """
        Parameters
        ----------
        app_dir : str
            {BASE_DIR} に置き換えるディレクトリ
        config_path : str, optional
            既定の設定に重ねる設定ファイル
        overrides : dict[str, object], optional
            `SECTION.KEY` をキーとする上書き値 (コマンドライン引数)
        output_dir : str, optional
            出力先 (--out)。環境変数・設定ファイルより優先される

        Raises
        ------
        FileNotFoundError
            config_path が読み込めない場合
        ConfigParseError
            設定値が不正な場合
        """
        editor = ConfigEditor(DEFAULT_CONFIG_PATH)
        if config_path is not None:
            user = ConfigEditor(config_path)
            if not user.is_loaded():
                raise FileNotFoundError(config_path)
            editor.merge(user)
        for field_name, value in (overrides or {}).items():
            section, key = field_name.split(".", 1)
            try:
                editor.set(section, key, value)
            except KeyError as e:
                raise ConfigParseError("unknown field", None, field_name) from e
            except ConfigParseError as e:
                raise ConfigParseError(e.message, None, field_name) from e

        self.editor = editor
        """上書き後の設定 (run_config.ini として保存する)"""
        self.config_file_path = config_path or DEFAULT_CONFIG_PATH
        """使用した設定ファイル"""
        self.app_dir = app_dir

        _c = editor
        self.model_name: str = _c["PHYSICS"]["MODEL"].value
        """A(φ), V(φ) のモデル名"""
        if self.model_name not in MODEL_REGISTRY:
            raise ConfigParseError(f"unknown model '{self.model_name}'",
                                   _c["PHYSICS"]["MODEL"].line, "PHYSICS.MODEL")
        for key in ("SIGMA_C", "MU_C", "LAMBDA", "GAMMA", "B"):
            self._check_physics(key, _c["PHYSICS"][key].value)
        self.params = PhysicalParams(
            sigma_c=_c["PHYSICS"]["SIGMA_C"].value,
            mu_c=_c["PHYSICS"]["MU_C"].value,
            lam=_c["PHYSICS"]["LAMBDA"].value,
            gamma=_c["PHYSICS"]["GAMMA"].value,
            b=_c["PHYSICS"]["B"].value,
            model=self.model_name)
        """物理パラメータ"""

        self.numerics = NumericsConfig(
            n=_c["NUMERICS"]["N"].value,
            x_inf=_c["NUMERICS"]["X_INF"].value,
            grading=_c["NUMERICS"]["GRADING"].value,
            grading_strength=_c["NUMERICS"]["GRADING_STRENGTH"].value,
            eps=_c["NUMERICS"]["EPS"].value,
            max_iter=_c["NUMERICS"]["MAX_ITER"].value,
            tau_min=_c["NUMERICS"]["TAU_MIN"].value,
            mu_coupling=_c["NUMERICS"]["MU_COUPLING"].value)
        """離散化と反復の設定"""
        if self.numerics.n < MIN_INTERVALS:
            raise ConfigParseError(f"N must be >= {MIN_INTERVALS}",
                                   _c["NUMERICS"]["N"].line, "NUMERICS.N")
        if not (math.isfinite(self.numerics.x_inf) and self.numerics.x_inf > 1.0):
            raise ConfigParseError("X_INF must be a finite value > 1",
                                   _c["NUMERICS"]["X_INF"].line, "NUMERICS.X_INF")
        if self.numerics.grading not in GRADINGS:
            raise ConfigParseError(f"unknown grading '{self.numerics.grading}'",
                                   _c["NUMERICS"]["GRADING"].line, "NUMERICS.GRADING")

        self.initial_guess = InitialGuessConfig(
            nu_c=_c["INITIAL_GUESS"]["NU_C"].value,
            phi_amplitude=_c["INITIAL_GUESS"]["PHI_AMPLITUDE"].value,
            r_s=_c["INITIAL_GUESS"]["R_S"].value,
            omega=_c["INITIAL_GUESS"]["OMEGA"].value)
        """初期近似の設定"""

        self.sweep: Optional[SweepConfig] = None
        """掃引の設定、PARAMETER が空の場合は None"""
        if (name := _c["SWEEP"]["PARAMETER"].value.strip().lower()) != "":
            self.sweep = self._build_sweep(name)

        env_name = _c["OUTPUT"]["OUTPUT_DIR_ENV_NAME"].value
        directory = _c["OUTPUT"]["OUTPUT_DIR"].value
        if env_name != "" and os.environ.get(env_name, "") != "":
            directory = os.environ[env_name]
        if output_dir is not None:
            directory = output_dir
        self.output = OutputConfig(
            directory=path.abspath(directory.replace("{BASE_DIR}", app_dir)),
            emit_plots=_c["OUTPUT"]["EMIT_PLOTS"].value,
            delimiter=_c["OUTPUT"]["DELIMITER"].value.replace("\\t", "\t") or "\t")
        """出力の設定 (優先順位: --out, 環境変数, OUTPUT_DIR)"""

        self.log_init = _c["LOGGING"]["LOG_INIT"].value
        """
        ログの初期化をいつ行うか
        - "NEVER": 初期化しない
        - "ALWAYS_ON_STARTUP": 常に起動時に初期化
        """
        self.log_path = _c["LOGGING"]["LOG_PATH"].value.replace("{BASE_DIR}", app_dir)
        """ログファイルのパス"""
        self.default_log_path = path.join(app_dir, "bfstar.log")
        """ログファイルのパス (上記のパスが不正な場合に使用)"""
        self.log_encoding = _c["LOGGING"]["LOG_ENCODING"].value
        """ログファイルのエンコーディング"""

        self.logging_to_console = _c["DEBUGGING"]["LOG_TO_CONSOLE"].value
        """ログ出力をコンソールにも行うか"""
        self.catch_errors_on_run = _c["DEBUGGING"]["CATCH_ERRORS_ON_RUN"].value
        """run 系メソッドの実行時に予期しないエラーを catch するか"""

    def _check_physics(self, key:str, value:float):
        field_name = f"PHYSICS.{key}"
        line = self.editor["PHYSICS"][key].line
        if not math.isfinite(value):
            raise ConfigParseError("value must be finite", line, field_name)
        if key == "SIGMA_C" and value <= 0.0:
            raise ConfigParseError(
                "SIGMA_C must be > 0 (pure-fermion and vacuum-adjacent configurations "
                "need a different conditioning of the eigenvalue conditions)", line, field_name)
        if key in ("MU_C", "B") and value <= 0.0:
            raise ConfigParseError(f"{key} must be > 0", line, field_name)
        if key in ("LAMBDA", "GAMMA") and value < 0.0:
            raise ConfigParseError(f"{key} must be >= 0", line, field_name)

    def _build_sweep(self, name:str) -> SweepConfig:
        _s = self.editor["SWEEP"]
        if name not in SWEEPABLE_PARAMETERS:
            raise ConfigParseError(f"unknown sweep parameter '{name}'",
                                   _s["PARAMETER"].line, "SWEEP.PARAMETER")
        sweep = SweepConfig(parameter=name,
                            start=_s["START"].value, stop=_s["STOP"].value,
                            step=_s["STEP"].value,
                            parallel=_s["PARALLEL"].value,
                            keep_profiles=_s["KEEP_PROFILES"].value,
                            max_failures=_s["MAX_FAILURES"].value)
        bounds = (sweep.start, sweep.stop, sweep.step)
        if not all(math.isfinite(v) for v in bounds):
            raise ConfigParseError("sweep bounds must be finite", _s["STEP"].line, "SWEEP.STEP")
        single = abs(sweep.stop - sweep.start) <= _SWEEP_TOL * max(1.0, abs(sweep.start))
        if not single and (sweep.step == 0.0 or (sweep.stop - sweep.start) * sweep.step < 0.0):
            raise ConfigParseError("empty or non-monotone sweep range",
                                   _s["STEP"].line, "SWEEP.STEP")
        for value in sweep.values():
            self._check_physics(name.upper(), value)
        return sweep

    def params_for(self, name:str, value:float) -> PhysicalParams:
        """掃引の1点のパラメータ"""
        return self.params.with_value(name, value)

    def with_numerics(self, **changes) -> NumericsConfig:
        """一部を変更した離散化の設定 (検証の格子列用)"""
        return replace(self.numerics, **changes)

    def save(self, file_path:str) -> None:
        """上書き後の設定をコメント・型ヒント付きで保存する"""
        self.editor.save(file_path)
