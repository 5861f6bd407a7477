"""
bfstar.status パッケージ

実行の進捗状況・エラー・警告を管理するクラスを提供する

Modules
-------
- `errors`: エラー情報 (終了コード付き)
- `progress`: 進捗状況の列挙型とメッセージ
- `status`: 実行ステータスの保存・読み込み
- `warnings`: 警告情報
"""
from .status import RunProgress, RunStatus, STATUS_FILE_NAME
