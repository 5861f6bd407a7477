"""
bfstar.status.errors
エラー情報を提供するモジュール

Classes
-------
- `BFSErrorData` : エラー情報 (抽象クラス)
- `UnexpectedError` : 未知のエラーが発生した場合のエラー情報
- `ConfigFileNotFound` : 設定ファイルが見つからない場合のエラー情報
- `InvalidConfig` : 設定値が不正な場合のエラー情報
- `OutputWriteFailed` : 出力ファイルの書き込みに失敗した場合のエラー情報
- `SolverErrorData` : 数値計算の失敗 (抽象クラス)
- `NotConverged` : 反復回数の上限に達した場合のエラー情報
- `Diverged` : 反復が発散した場合のエラー情報
- `MetricBreakdown` : e^λ が正にならなかった場合のエラー情報
- `LinearSolveFailed` : 選点系の分解に失敗した場合のエラー情報
- `DegenerateEigenDirection` : (ρ, ω) の 2x2 系が特異な場合のエラー情報
- `SweepAborted` : 掃引が連続して失敗した場合のエラー情報
- `VerificationFailed` : 検証の判定に失敗した場合のエラー情報

Classes (DeveloperErrorData)
---------------------------
- `DeveloperErrorData` : 開発者側に問題がある場合のエラー情報 (抽象クラス)
- `NotInitializedError` : 初期化されていない場合のエラー情報 (開発者エラー)

Functions
---------
- `get_solver_error` : 数値計算層の例外からエラー情報を取得
- `from_json` : JSONからエラー情報を生成

Notes
-----
- `exit_code` はコマンドラインの終了コード
  (1: 予期しないエラー, 2: 計算の失敗, 3: 設定の誤り, 4: 入出力の失敗)
"""
from abc import ABCMeta, abstractmethod
from copy import deepcopy
from typing import Dict, List, Optional, Union

from ..exceptions import (
    StarSolverError, MetricBreakdownError, LinearSolveError,
    DegenerateEigenDirectionError
)



EXIT_SUCCESS = 0
EXIT_UNEXPECTED = 1
EXIT_SOLVER_FAILURE = 2
EXIT_CONFIG_ERROR = 3
EXIT_IO_ERROR = 4


#
# エラー全般
#

class BFSErrorData(metaclass=ABCMeta):
    """エラー情報"""
    exit_code: int = EXIT_UNEXPECTED
    """終了コード"""

    def __init__(self, e:Union[Exception, str, dict, None]=None):
        """コンストラクタ

        Parameters
        ----------
        e : Exception | str | dict | None
            例外、またはエラーメッセージ
            dict の場合はエラー詳細を格納した辞書
        """
        self._details: dict = {}

        if e is None:
            return

        if isinstance(e, str):
            e_name = "UnexpectedError"
            e_args = e
        elif isinstance(e, Exception):
            e_name = e.__class__.__name__
            e_args = str(e.args[0]) if e.args else ""
        elif isinstance(e, dict):
            e_name = e.get("exception_name", "UnexpectedError")
            e_args = e.get("args", "")

        self._details["e"] = {
            "exception_name": e_name,
            "args": e_args
        }

    @property
    def exception_name(self) -> Optional[str]:
        """例外名"""
        if "e" not in self._details:
            return None
        return self._details["e"]["exception_name"]

    @property
    def args(self) -> Optional[str]:
        """例外の引数"""
        if "e" not in self._details:
            return None
        return self._details["e"]["args"]

    @property
    def name(self) -> str:
        """エラー名"""
        return self.__class__.__name__

    def asdict(self) -> dict:
        """エラー情報を辞書形式で取得

        Returns
        -------
        dict
            エラー情報 (`from_json` の `kwargs` として使える)
        """
        return deepcopy(self._details)

    @abstractmethod
    def error_message(self) -> str:
        """エラーメッセージ"""

class UnexpectedError(BFSErrorData):
    """未知のエラーが発生した場合のエラー情報"""
    def __init__(self, e: Union[Exception, str, dict, None]=None,
                 tr: str="") -> None:
        """未知のエラーが発生した場合のエラー情報

        Parameters
        ----------
        e : Exception | str | dict | None
            例外、またはエラーメッセージ
        tr : str
            追加のトレースバック情報
        """
        super().__init__(e)
        self._details["tr"] = tr

    def error_message(self) -> str:
        if self.exception_name is None:
            return "未知のエラーが発生しました。"

        return "以下のエラーが発生しました: " \
               f"{self.exception_name}: {self.args}"



#
# 設定・入出力
#

class ConfigFileNotFound(BFSErrorData):
    """設定ファイルが見つからない場合のエラー情報"""
    exit_code = EXIT_CONFIG_ERROR

    def __init__(self, file_path:str, e:Union[Exception, str, dict, None]=None):
        super().__init__(e)
        self._details["file_path"] = file_path

    def error_message(self) -> str:
        return f"設定ファイル {self._details['file_path']} を読み込めません。"

class InvalidConfig(BFSErrorData):
    """設定値が不正な場合のエラー情報"""
    exit_code = EXIT_CONFIG_ERROR

    def __init__(self, field:str="", line:Optional[int]=None,
                 e:Union[Exception, str, dict, None]=None):
        """設定値が不正な場合のエラー情報

        Parameters
        ----------
        field : str
            `SECTION.KEY` 形式の項目名
        line : int, optional
            設定ファイル上の行番号 (CLI 引数の場合は None)
        """
        super().__init__(e)
        self._details["field"] = field
        self._details["line"] = line

    def error_message(self) -> str:
        where = f"{self._details['field']}"
        if self._details["line"] is not None:
            where += f" (line {self._details['line']})"
        return f"設定値が不正です: {where}: {self.args}"

class OutputWriteFailed(BFSErrorData):
    """出力ファイルの書き込みに失敗した場合のエラー情報"""
    exit_code = EXIT_IO_ERROR

    def __init__(self, file_path:str, e:Union[Exception, str, dict, None]=None):
        super().__init__(e)
        self._details["file_path"] = file_path

    def error_message(self) -> str:
        return f"ファイル {self._details['file_path']} に書き込めませんでした: {self.args}"



#
# 数値計算
#

class SolverErrorData(BFSErrorData):
    """数値計算の失敗 (抽象クラス)"""
    exit_code = EXIT_SOLVER_FAILURE

    def error_message(self) -> str:
        return f"計算に失敗しました: {self.args}"

class NotConverged(SolverErrorData):
    """反復回数の上限に達した場合のエラー情報"""
    def __init__(self, iterations:int, residual:float,
                 e:Union[Exception, str, dict, None]=None):
        super().__init__(e)
        self._details["iterations"] = iterations
        self._details["residual"] = residual

    def error_message(self) -> str:
        return f"{self._details['iterations']} 回の反復で収束しませんでした " \
               f"(残差 {self._details['residual']:.3e})。"

class Diverged(SolverErrorData):
    """反復が発散した場合のエラー情報"""
    def __init__(self, iterations:int, e:Union[Exception, str, dict, None]=None):
        super().__init__(e)
        self._details["iterations"] = iterations

    def error_message(self) -> str:
        return f"反復 {self._details['iterations']} 回目で発散しました " \
               "(τ を最小値まで縮めても試行状態が評価できません)。"

class MetricBreakdown(SolverErrorData):
    """e^λ が正にならなかった場合のエラー情報"""
    def __init__(self, x:Optional[float]=None, e:Union[Exception, str, dict, None]=None):
        super().__init__(e)
        self._details["x"] = x

    def error_message(self) -> str:
        return f"e^λ が正になりません (x = {self._details['x']})。初期近似を見直して下さい。"

class LinearSolveFailed(SolverErrorData):
    """選点系の分解に失敗した場合のエラー情報"""
    def __init__(self, pivot_node:Optional[int]=None,
                 e:Union[Exception, str, dict, None]=None):
        super().__init__(e)
        self._details["pivot_node"] = pivot_node

    def error_message(self) -> str:
        return f"選点系を解けませんでした (節点 {self._details['pivot_node']} 付近): {self.args}"

class DegenerateEigenDirection(SolverErrorData):
    """(ρ, ω) を決める 2x2 系が特異な場合のエラー情報"""
    def __init__(self, determinant:float=0.0, e:Union[Exception, str, dict, None]=None):
        super().__init__(e)
        self._details["determinant"] = determinant

    def error_message(self) -> str:
        return f"固有値の補正を決める 2x2 系が特異です (det = {self._details['determinant']:.3e})。"

class SweepAborted(SolverErrorData):
    """掃引が連続して失敗した場合のエラー情報"""
    def __init__(self, parameter:str, value:float, failures:int,
                 e:Union[Exception, str, dict, None]=None):
        super().__init__(e)
        self._details["parameter"] = parameter
        self._details["value"] = value
        self._details["failures"] = failures

    def error_message(self) -> str:
        return f"{self._details['parameter']} = {self._details['value']} で " \
               f"{self._details['failures']} 回続けて失敗したため掃引を中止しました。"

class VerificationFailed(SolverErrorData):
    """検証の判定に失敗した場合のエラー情報"""
    def __init__(self, failed_checks:List[str], e:Union[Exception, str, dict, None]=None):
        super().__init__(e)
        self._details["failed_checks"] = list(failed_checks)

    def error_message(self) -> str:
        return "以下の検証項目が基準を満たしませんでした: " \
               + ", ".join(self._details["failed_checks"])


def get_solver_error(e:StarSolverError) -> BFSErrorData:
    """数値計算層の例外に対応するエラー情報を取得する

    Parameters
    ----------
    e : StarSolverError
        例外

    Returns
    -------
    BFSErrorData
        エラー情報 (対応がない例外は `SolverErrorData` の汎用形)
    """
    if isinstance(e, MetricBreakdownError):
        return MetricBreakdown(e.x, e)
    if isinstance(e, LinearSolveError):
        return LinearSolveFailed(e.pivot_node, e)
    if isinstance(e, DegenerateEigenDirectionError):
        return DegenerateEigenDirection(e.determinant, e)
    return _GenericSolverError(e)

class _GenericSolverError(SolverErrorData):
    """その他の数値計算層の例外"""



#
# 開発者エラー
#

class DeveloperErrorData(BFSErrorData):
    """開発者側に問題がある場合のエラー情報 (抽象クラス)"""
    def error_message(self) -> str:
        return "開発者側の問題により処理を続行できません。"

class NotInitializedError(DeveloperErrorData):
    """初期化されていない場合のエラー情報 (開発者エラー)"""
    def error_message(self) -> str:
        return "初期化されていません。"



#
# JSONとの変換
#

_class_registry: Dict[str, type] = {
    "UnexpectedError": UnexpectedError,
    "ConfigFileNotFound": ConfigFileNotFound,
    "InvalidConfig": InvalidConfig,
    "OutputWriteFailed": OutputWriteFailed,
    "NotConverged": NotConverged,
    "Diverged": Diverged,
    "MetricBreakdown": MetricBreakdown,
    "LinearSolveFailed": LinearSolveFailed,
    "DegenerateEigenDirection": DegenerateEigenDirection,
    "SweepAborted": SweepAborted,
    "VerificationFailed": VerificationFailed,
    "_GenericSolverError": _GenericSolverError,
    # 開発者エラー
    "NotInitializedError": NotInitializedError,
}
"""エラークラスの登録 (JSONとの変換用)"""

def from_json(name:str, kwargs:dict) -> BFSErrorData:
    """JSONからエラー情報を生成

    Parameters
    ----------
    name : str
        エラークラス名
    kwargs : dict
        エラー情報
        BFSErrorData.asdict() で取得した辞書

    Returns
    -------
    BFSErrorData
        エラー情報
    """
    if name not in _class_registry:
        return UnexpectedError(f"Invalid error class name: {name}")
    return _class_registry[name](**kwargs)
