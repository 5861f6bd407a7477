"""
実行ログ

Classes
-------
- `Logger` : 実行ログをファイル (とコンソール) に書き出す

Functions
---------
- `format_line` : ログ1行の文字列
"""
import datetime
import sys
from os import makedirs, path
from typing import Optional

from bfstar.model import SpectralPair
from bfstar.status.progress import ProgressStatus, MAX_STATUS_LENGTH
from .runner_config import LogLevel, MAX_LOG_LEVEL_LENGTH


TIME_FORMAT = "%Y/%m/%d %H:%M:%S"



def format_line(level:LogLevel, status:ProgressStatus, message:str,
                now:Optional[datetime.datetime]=None) -> str:
    """`[LEVEL]   YYYY/MM/DD HH:MM:SS, STATUS,       message` の形式の1行"""
    stamp = (now or datetime.datetime.now()).strftime(TIME_FORMAT)
    head = f"[{level.name}]".ljust(MAX_LOG_LEVEL_LENGTH + 3)
    return f"{head}{stamp}, " + f"{status.name},".ljust(MAX_STATUS_LENGTH + 2) + message


class Logger:
    """実行ログ

    ファイルを開くのは書き込みのたびで、ハンドルは保持しない。
    コンソールへは INFO を標準出力、WARNING 以上を標準エラーに出す。
    """
    def __init__(self, default_log_path:str):
        """
        Parameters
        ----------
        default_log_path : str
            `init_logger` に渡したパスに書けないときのログファイル
        """
        self._default_log_path = default_log_path
        self._path: Optional[str] = None
        self._encoding = "utf-8"
        self._to_console = False

    @property
    def log_path(self) -> Optional[str]:
        """書き込み先、初期化前は None"""
        return self._path

    def init_logger(self, log_path:str, encoding:str="utf-8",
                    init_log:bool=False, logging_to_console:bool=False) -> bool:
        """書き込み先を決める

        Parameters
        ----------
        log_path : str
            ログファイル。ディレクトリがなければ作る
        encoding : str, default "utf-8"
        init_log : bool, default False
            True なら既存の内容を消す
        logging_to_console : bool, default False

        Returns
        -------
        bool
            `log_path` を使えたか。False なら既定のファイルに切り替えている
        """
        self._encoding = encoding
        self._to_console = logging_to_console
        mode = "w" if init_log else "a"
        if self._touch(log_path, mode):
            self._path = log_path
            return True
        self._path = self._default_log_path
        if init_log and path.exists(self._default_log_path):
            self._touch(self._default_log_path, mode)
        return False

    def _touch(self, file_path:str, mode:str) -> bool:
        try:
            directory = path.dirname(file_path)
            if directory:
                makedirs(directory, exist_ok=True)
            with open(file_path, mode, encoding=self._encoding):
                pass
        except OSError:
            return False
        return True

    def log(self, status:ProgressStatus, message:str,
            level:LogLevel=LogLevel.INFO) -> bool:
        """1行書き出す

        Returns
        -------
        bool
            ファイルに書けたか (初期化前は False)
        """
        text = format_line(level, status, message)
        if self._to_console:
            print(text, file=sys.stdout if level == LogLevel.INFO else sys.stderr)
        if self._path is None:
            return False
        try:
            with open(self._path, "a", encoding=self._encoding) as f:
                f.write(text + "\n")
        except OSError:
            return False
        return True

    def log_iteration(self, status:ProgressStatus, label:str, k:int, delta0:float,
                      tau:float, delta_tau:float, pair:SpectralPair) -> bool:
        """CANM の1反復を書き出す"""
        return self.log(status, f"{label}k={k}, δ(0)={delta0:.3e}, τ_opt={tau:.4f}, "
                                f"δ(τ_opt)={delta_tau:.3e}, "
                                f"R_s={pair.r_s:.10f}, Ω={pair.omega:.10f}")

    def log_check(self, status:ProgressStatus, name:str, value:Optional[float],
                  passed:bool) -> bool:
        """検証項目の判定を書き出す。不合格は WARNING"""
        return self.log(status, f"{name}: {value} ({'OK' if passed else 'NG'})",
                        LogLevel.INFO if passed else LogLevel.WARNING)
