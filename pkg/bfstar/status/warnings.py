"""
bfstar.status.warnings

警告情報を提供するモジュール

Classes
-------
- `BFSWarningData` : 警告情報 (抽象クラス)
- `UnexpectedWarning` : 予期しないエラーが発生した場合の警告情報
- `InvalidConfigFilePath` : コンフィグファイルのパスが不正な場合の警告情報
- `InvalidLogFilePath` : ログファイルのパスが不正な場合の警告情報
- `TrialStepBreakdown` : 試行ステップで e^λ が破綻し τ を半分にした場合の警告情報
- `ResidualIncrease` : 採用したステップで残差が増加した場合の警告情報
- `NegativeFermiMomentum` : 収束解の星の内部で μ < 0 となった場合の警告情報
- `SweepPointFailed` : 掃引の1点の計算に失敗した場合の警告情報
- `OrderUndefined` : Runge の次数が定義できない場合の警告情報

Functions
---------
- `from_json` : JSONから警告情報を生成
"""
from abc import ABCMeta, abstractmethod
from copy import deepcopy
from typing import Optional, Union, Dict



class BFSWarningData(metaclass=ABCMeta):
    """警告情報"""
    def __init__(self, e:Union[Exception, str, dict, None]=None):
        """コンストラクタ

        Parameters
        ----------
        e : Exception | str | dict | None
            例外、エラーメッセージ、エラー情報
            dictの場合は、エラー情報を格納した辞書
        """
        self._details: dict = {}

        if isinstance(e, str):
            e_name = "UnexpectedError"
            e_args = e
        elif isinstance(e, Exception):
            e_name = e.__class__.__name__
            e_args = str(e.args[0]) if e.args else ""
        elif isinstance(e, dict):
            e_name = e.get("exception_name", "UnexpectedError")
            e_args = e.get("args", "")
        else:
            e_name = None
            e_args = None

        self._details["e"] = {
            "exception_name": e_name,
            "args": e_args
        }

    @property
    def exception_name(self) -> Optional[str]:
        """例外名"""
        return self._details["e"]["exception_name"]

    @property
    def args(self) -> Optional[str]:
        """例外の引数"""
        return self._details["e"]["args"]

    @property
    def name(self) -> str:
        """警告名"""
        return self.__class__.__name__

    def asdict(self) -> dict:
        """警告情報を辞書形式で取得"""
        return deepcopy(self._details)

    @abstractmethod
    def warning_message(self) -> str:
        """警告メッセージの取得

        Returns
        -------
        str
            警告メッセージ
        """

class UnexpectedWarning(BFSWarningData):
    """予期しないエラーが発生した場合の警告情報"""
    def warning_message(self) -> str:
        if self.exception_name is None:
            return "予期しないエラーが発生しました。"

        return f"予期しないエラーが発生しました。" \
                f"例外: {self.exception_name} - {self.args}"



#
# ファイルパス
#

class InvalidConfigFilePath(BFSWarningData):
    """指定されたコンフィグファイルのパスが不正な場合の警告情報"""
    def __init__(self, file_path:str, e:Union[Exception, str, dict, None]=None):
        """指定されたコンフィグファイルのパスが不正な場合の警告情報

        Parameters
        ----------
        file_path : str
            コンフィグファイルのパス
        """
        super().__init__(e)
        self._details["file_path"] = file_path

    def warning_message(self) -> str:
        return f"指定されたコンフィグファイルのパス ({self._details['file_path']}) が不正です。" \
               "デフォルトのコンフィグファイルを使用します。"

class InvalidLogFilePath(BFSWarningData):
    """指定されたログファイルのパスが不正な場合の警告情報"""
    def __init__(self, file_path:str, e:Union[Exception, str, dict, None]=None):
        super().__init__(e)
        self._details["file_path"] = file_path

    def warning_message(self) -> str:
        return f"指定されたログファイルのパス ({self._details['file_path']}) が不正です。" \
               "デフォルトのログファイルを使用します。"



#
# 反復
#

class TrialStepBreakdown(BFSWarningData):
    """試行ステップで e^λ が破綻し、τ を半分にした場合の警告情報"""
    def __init__(self, iteration:int, tau:float, x:Optional[float]=None,
                 e:Union[Exception, str, dict, None]=None):
        """試行ステップで e^λ が破綻した場合の警告情報

        Parameters
        ----------
        iteration : int
            反復番号 (1 始まり)
        tau : float
            破綻した試行ステップの τ
        x : float, optional
            破綻した座標
        """
        super().__init__(e)
        self._details["iteration"] = iteration
        self._details["tau"] = tau
        self._details["x"] = x

    def warning_message(self) -> str:
        return f"反復 {self._details['iteration']}: τ = {self._details['tau']:.4g} の試行状態が" \
               "評価できないため τ を半分にします。"

class ResidualIncrease(BFSWarningData):
    """採用したステップで残差が増加した場合の警告情報"""
    def __init__(self, iteration:int, delta0:float, delta_tau:float,
                 e:Union[Exception, str, dict, None]=None):
        super().__init__(e)
        self._details["iteration"] = iteration
        self._details["delta0"] = delta0
        self._details["delta_tau"] = delta_tau

    def warning_message(self) -> str:
        return f"反復 {self._details['iteration']}: 残差が増加しました " \
               f"({self._details['delta0']:.3e} -> {self._details['delta_tau']:.3e})。"

class NegativeFermiMomentum(BFSWarningData):
    """星の内部で μ < 0 となった場合の警告情報"""
    def __init__(self, count:int, minimum:float, e:Union[Exception, str, dict, None]=None):
        super().__init__(e)
        self._details["count"] = count
        self._details["minimum"] = minimum

    def warning_message(self) -> str:
        return f"星の内部の {self._details['count']} 個の節点で μ < 0 です " \
               f"(最小値 {self._details['minimum']:.3e})。非物理的な解の可能性があります。"



#
# 掃引・検証
#

class SweepPointFailed(BFSWarningData):
    """掃引の1点の計算に失敗した場合の警告情報"""
    def __init__(self, parameter:str, value:float, reason:str="",
                 e:Union[Exception, str, dict, None]=None):
        super().__init__(e)
        self._details["parameter"] = parameter
        self._details["value"] = value
        self._details["reason"] = reason

    def warning_message(self) -> str:
        return f"{self._details['parameter']} = {self._details['value']:.6g} の計算に失敗しました" \
               f" ({self._details['reason']})。"

class OrderUndefined(BFSWarningData):
    """Runge の次数が定義できない場合の警告情報"""
    def __init__(self, observable:str, e:Union[Exception, str, dict, None]=None):
        super().__init__(e)
        self._details["observable"] = observable

    def warning_message(self) -> str:
        return f"{self._details['observable']} の Runge の次数が定義できません (差が単調でない)。"



#
# JSONとの変換
#

_class_registry: Dict[str, type] = {
    "UnexpectedWarning": UnexpectedWarning,
    "InvalidConfigFilePath": InvalidConfigFilePath,
    "InvalidLogFilePath": InvalidLogFilePath,
    "TrialStepBreakdown": TrialStepBreakdown,
    "ResidualIncrease": ResidualIncrease,
    "NegativeFermiMomentum": NegativeFermiMomentum,
    "SweepPointFailed": SweepPointFailed,
    "OrderUndefined": OrderUndefined,
}
"""警告情報のクラスを登録 (JSONとの変換用)"""

def from_json(name:str, kwargs:dict) -> BFSWarningData:
    """JSONから警告情報を生成

    Parameters
    ----------
    name : str
        警告情報のクラス名
    kwargs : dict
        警告情報の引数

    Returns
    -------
    BFSWarningData
        警告情報
    """
    if name not in _class_registry:
        raise ValueError(f"Invalid warning class name: {name}")
    return _class_registry[name](**kwargs)
