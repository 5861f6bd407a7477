"""
進捗状況を表す列挙型とメッセージを定義

Functions
---------
- `get_progress_status_msg`: ProgressStatusと各進捗状況に対応するメッセージを取得
- `get_detailed_progress_status_from_str`: 進捗状況の文字列からDetailedProgressStatusを取得

Classes
-------
- `ProgressStatus`: 進捗状況 (大枠)
- `DetailedProgressStatus`: 進捗状況 (詳細、継承用)
- `InitializingStatus`: 進捗状況 (ProgressStatus.INITIALIZING)
- `SolvingStatus`: 進捗状況 (ProgressStatus.SOLVING)
- `SweepingStatus`: 進捗状況 (ProgressStatus.SWEEPING)
- `VerifyingStatus`: 進捗状況 (ProgressStatus.VERIFYING)
- `WritingStatus`: 進捗状況 (ProgressStatus.WRITING)
- `TerminatingStatus`: 進捗状況 (ProgressStatus.TERMINATING)

Constants
----------
- `MAX_STATUS_LENGTH`: 進捗状況の最大文字数
- `PROGRESS_STATUS_MSG`: 進捗状況メッセージ
"""
from enum import Enum, auto



#
# 進捗状況 (全体)
#

class ProgressStatus(Enum):
    """進捗状況 (大枠)"""
    # 設定読み込み・事前準備
    INITIALIZING = 0
    # 単一の解の計算
    SOLVING = auto()
    # パラメータ掃引
    SWEEPING = auto()
    # 検証 (Runge 則など)
    VERIFYING = auto()
    # 結果の書き出し
    WRITING = auto()
    # 終了処理
    TERMINATING = auto()
MAX_STATUS_LENGTH = max([len(s.name) for s in ProgressStatus])

PROGRESS_STATUS_MSG = {
    ProgressStatus.INITIALIZING: "初期化中...",
    ProgressStatus.SOLVING: "解を計算中...",
    ProgressStatus.SWEEPING: "パラメータを掃引中...",
    ProgressStatus.VERIFYING: "検証中...",
    ProgressStatus.WRITING: "結果を書き出し中...",
    ProgressStatus.TERMINATING: "終了処理中..."
}

class DetailedProgressStatus(Enum):
    """進捗状況 (詳細)

    Notes
    -----
    - 以下のEnumクラスで継承して使用
      - InitializingStatus
      - SolvingStatus
      - SweepingStatus
      - VerifyingStatus
      - WritingStatus
      - TerminatingStatus"""

class InitializingStatus(DetailedProgressStatus):
    """進捗状況 (ProgressStatus.INITIALIZING)"""
    INIT_LOGGER = 1
    INIT_OUTPUT_DIR = auto()
    COMPLETED = auto()

_cnt = len(InitializingStatus)
INITIALIZING_STATUS_MSG = {
    InitializingStatus.INIT_LOGGER: f"ロガーを初期化中... (1/{_cnt})",
    InitializingStatus.INIT_OUTPUT_DIR: f"出力ディレクトリを初期化中... (2/{_cnt})",
    InitializingStatus.COMPLETED: f"初期化が完了しました (3/{_cnt})"
}

class SolvingStatus(DetailedProgressStatus):
    """進捗状況 (ProgressStatus.SOLVING)"""
    INITIAL_GUESS = 1
    ITERATING = auto()
    COMPLETED = auto()

SOLVING_STATUS_MSG = {
    SolvingStatus.INITIAL_GUESS: "初期近似を生成中...",
    SolvingStatus.ITERATING: "CANM 反復中... ({}/{})",
    SolvingStatus.COMPLETED: "反復が終了しました",
}

class SweepingStatus(DetailedProgressStatus):
    """進捗状況 (ProgressStatus.SWEEPING)"""
    SOLVING_POINT = 1
    BISECTING = auto()
    COMPLETED = auto()

SWEEPING_STATUS_MSG = {
    SweepingStatus.SOLVING_POINT: "掃引点を計算中... ({}/{})",
    SweepingStatus.BISECTING: "刻みを半分にして再計算中... ({}/{})",
    SweepingStatus.COMPLETED: "掃引が終了しました",
}

class VerifyingStatus(DetailedProgressStatus):
    """進捗状況 (ProgressStatus.VERIFYING)"""
    RUNGE = 1
    FARFIELD = auto()
    FIRST_INTEGRAL = auto()
    JACOBIAN_AUDIT = auto()
    SHOOTING = auto()
    COMPLETED = auto()

_cnt = len(VerifyingStatus)
VERIFYING_STATUS_MSG = {
    VerifyingStatus.RUNGE: "Runge 則の格子で計算中... ({}/{})",
    VerifyingStatus.FARFIELD: "X_∞ を倍にして計算中... ({}/{})",
    VerifyingStatus.FIRST_INTEGRAL: f"第一積分の残差を評価中... (3/{_cnt})",
    VerifyingStatus.JACOBIAN_AUDIT: f"Jacobian を差分と比較中... (4/{_cnt})",
    VerifyingStatus.SHOOTING: f"シューティングと比較中... (5/{_cnt})",
    VerifyingStatus.COMPLETED: f"検証が終了しました (6/{_cnt})",
}

class WritingStatus(DetailedProgressStatus):
    """進捗状況 (ProgressStatus.WRITING)"""
    PROFILES = 1
    REPORT = auto()
    PLOT_SCRIPTS = auto()
    RUN_CONFIG = auto()

_cnt = len(WritingStatus)
WRITING_STATUS_MSG = {
    WritingStatus.PROFILES: f"プロファイルを書き出し中... (1/{_cnt})",
    WritingStatus.REPORT: f"レポートを書き出し中... (2/{_cnt})",
    WritingStatus.PLOT_SCRIPTS: f"プロット用スクリプトを書き出し中... (3/{_cnt})",
    WritingStatus.RUN_CONFIG: f"実行時の設定を保存中... (4/{_cnt})",
}

class TerminatingStatus(DetailedProgressStatus):
    """進捗状況 (ProgressStatus.TERMINATING)"""
    SAVE_STATUS = 1
    COMPLETED = auto()

_cnt = len(TerminatingStatus)
TERMINATING_STATUS_MSG = {
    TerminatingStatus.SAVE_STATUS: f"ステータスを保存中... (1/{_cnt})",
    TerminatingStatus.COMPLETED: f"すべての処理が完了しました (2/{_cnt})",
}

_STATUS_TABLE = {
    ProgressStatus.INITIALIZING: (InitializingStatus, INITIALIZING_STATUS_MSG),
    ProgressStatus.SOLVING: (SolvingStatus, SOLVING_STATUS_MSG),
    ProgressStatus.SWEEPING: (SweepingStatus, SWEEPING_STATUS_MSG),
    ProgressStatus.VERIFYING: (VerifyingStatus, VERIFYING_STATUS_MSG),
    ProgressStatus.WRITING: (WritingStatus, WRITING_STATUS_MSG),
    ProgressStatus.TERMINATING: (TerminatingStatus, TERMINATING_STATUS_MSG),
}


def get_progress_status_msg(status:ProgressStatus, sub_status:DetailedProgressStatus,
                            sub_count:int = 0, sub_total_count:int = 0) -> str:
    """ProgressStatusと各進捗状況に対応するメッセージを取得する

    Parameters
    ----------
    status : ProgressStatus
        大枠の進捗状況
    sub_status : DetailedProgressStatus
        細かい進捗状況
    sub_count : int, default 0
        現在の番号 (反復回数・掃引点など、"({}/{})" を含むメッセージで使用)
    sub_total_count : int, default 0
        全体数"""
    _, messages = _STATUS_TABLE[status]
    msg = messages.get(sub_status, "")
    if "{}" in msg:
        return msg.format(sub_count, sub_total_count)
    return msg

def get_detailed_progress_status_from_str(
        status:str, sub_status:str
        ) -> DetailedProgressStatus:
    """進捗状況の文字列からDetailedProgressStatusを取得する

    Parameters
    ----------
    status : str
        大枠の進捗状況
    sub_status : str
        細かい進捗状況

    Returns
    -------
    DetailedProgressStatus
        進捗状況 (詳細)"""
    for s, (cls, _) in _STATUS_TABLE.items():
        if s.name == status:
            return cls[sub_status]

    # 指定された進捗状況が存在しない場合
    raise ValueError(f"Invalid status: {status} / {sub_status}")
