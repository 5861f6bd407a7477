"""
実行ステータスの管理

出力ディレクトリに `run_status.json` として、最後の進捗状況、発生中のエラー、
発行された警告、計算結果の要約を保存する。

Classes
-------
- `RunProgress`: 進捗状況を管理するクラス
- `RunStatus`: 実行ステータスを管理するクラス
"""
from datetime import datetime
import json
from os import path, makedirs
from typing import List, Optional, Tuple, Union

from .progress import (
    ProgressStatus, DetailedProgressStatus, TerminatingStatus,
    get_detailed_progress_status_from_str
)
from .errors import BFSErrorData, from_json as error_from_json
from .warnings import BFSWarningData, from_json as warning_from_json


STATUS_FILE_NAME = "run_status.json"
"""ステータスファイル名"""


class RunProgress:
    """進捗状況を管理するクラス

    Usage
    -----
    ```python
    progress = RunProgress()
    progress.set(ProgressStatus.SOLVING, SolvingStatus.ITERATING)
    progress.set_count(3, 50)
    data = progress.asdict()
    restored = RunProgress(**data)
    ```
    """
    def __init__(self, *,
                 outline: Union[ProgressStatus, str] = ProgressStatus.INITIALIZING,
                 detail: Union[DetailedProgressStatus, str, None] = None,
                 count: int = 0, total: int = 0) -> None:
        """コンストラクタ

        Parameters
        ----------
        outline : ProgressStatus | str
            大まかな進捗状況、文字列の場合は `ProgressStatus` に変換される
        detail : DetailedProgressStatus | str | None
            詳細な進捗状況、文字列の場合は `DetailedProgressStatus` に変換される
        count, total : int
            反復回数・掃引点などの現在値と全体数
        """
        po = ProgressStatus[outline] if isinstance(outline, str) else outline
        if isinstance(detail, str):
            pd = get_detailed_progress_status_from_str(po.name, detail)
        else:
            pd = detail

        self._outline: ProgressStatus = po
        self._detail: Optional[DetailedProgressStatus] = pd
        self.count = count
        """現在の番号"""
        self.total = total
        """全体数"""

    def get(self) -> Tuple[ProgressStatus, Optional[DetailedProgressStatus]]:
        """進捗状況を取得する"""
        return self._outline, self._detail

    def set(self, outline: ProgressStatus,
            detail: Optional[DetailedProgressStatus]) -> None:
        """進捗状況を設定する。変化した場合はカウンタを 0 に戻す"""
        if self._outline == outline and self._detail == detail:
            return
        self._outline = outline
        self._detail = detail
        self.count = 0
        self.total = 0

    def set_count(self, count: int, total: int) -> None:
        self.count = count
        self.total = total

    def is_completed(self) -> bool:
        """すべての処理が完了しているか"""
        return self.get() == (ProgressStatus.TERMINATING, TerminatingStatus.COMPLETED)

    def asdict(self) -> dict:
        return {
            "outline": self._outline.name,
            "detail": None if self._detail is None else self._detail.name,
            "count": self.count,
            "total": self.total,
        }


class RunStatus:
    """実行ステータスを管理するクラス

    Attributes
    ----------
    progress : RunProgress
        最後の進捗状況
    current_error : BFSErrorData | None
        発生中のエラー
    warnings : list[BFSWarningData]
        発行された警告
    summary : dict
        計算結果の要約 (R_s, Ω, 反復回数など)
    command : str
        実行したサブコマンド
    config_file_path : str
        使用した設定ファイル
    """

    def __init__(self, dir_path: str):
        """コンストラクタ

        Parameters
        ----------
        dir_path : str
            ステータスファイルを保存するディレクトリ
        """
        self._dir_path = dir_path
        self._file_path = path.join(dir_path, STATUS_FILE_NAME)

        self.progress = RunProgress()
        """最後の進捗状況"""
        self.current_error: Optional[BFSErrorData] = None
        """発生中のエラー、エラーがない場合は None"""
        self.warnings: List[BFSWarningData] = []
        """発行された警告"""
        self.summary: dict = {}
        """計算結果の要約"""
        self.command = ""
        """実行したサブコマンド"""
        self.config_file_path = ""
        """使用した設定ファイル"""
        self.updated_at = ""
        """最終更新日時 ("YYYY/MM/DD HH:MM:SS")"""

    @property
    def file_path(self) -> str:
        return self._file_path

    @property
    def has_error(self) -> bool:
        """エラーが発生しているか"""
        return self.current_error is not None

    def add_warning(self, warning: BFSWarningData) -> None:
        self.warnings.append(warning)

    def load(self) -> None:
        """ステータスファイルを読み込む

        Notes
        -----
        - ファイルが存在しない、または JSON として読めない場合は何もしない
        - 不完全なデータは読み込める部分だけを利用する
        """
        if not path.exists(self._file_path):
            return
        try:
            with open(self._file_path, "r", encoding="utf-8") as f:
                data = json.load(f)
        except (json.JSONDecodeError, OSError):
            return
        self._load(data)

    def _load(self, data: dict) -> None:
        if (rp := data.get("progress")):
            try:
                self.progress = RunProgress(**rp)
            except (KeyError, ValueError, TypeError):
                pass

        if (ce := data.get("current_error")):
            self.current_error = error_from_json(ce["name"], ce["data"])

        self.warnings = []
        for w in data.get("warnings", []):
            try:
                self.warnings.append(warning_from_json(w["name"], w["data"]))
            except (KeyError, ValueError, TypeError):
                # 未知の警告は読み飛ばす
                continue

        self.summary = data.get("summary", {})
        self.command = data.get("command", "")
        self.config_file_path = data.get("config_file_path", "")
        self.updated_at = data.get("updated_at", "")

    def asdict(self) -> dict:
        current_error = None
        if self.current_error is not None:
            current_error = {
                "name": self.current_error.name,
                "data": self.current_error.asdict(),
                "exit_code": self.current_error.exit_code,
            }
        return {
            "progress": self.progress.asdict(),
            "current_error": current_error,
            "warnings": [{"name": w.name, "data": w.asdict()} for w in self.warnings],
            "summary": self.summary,
            "command": self.command,
            "config_file_path": self.config_file_path,
            "updated_at": self.updated_at,
        }

    def save(self) -> None:
        """ステータスファイルに保存する"""
        if not path.exists(self._dir_path):
            makedirs(self._dir_path)
        self.updated_at = datetime.now().strftime("%Y/%m/%d %H:%M:%S")
        with open(self._file_path, "w", encoding="utf-8") as f:
            json.dump(self.asdict(), f, ensure_ascii=False, indent=2)
