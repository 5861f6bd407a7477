"""
設定ファイルの読み書き

Modules
-------
- config_editor
  - 型ヒント・コメント付き INI ファイルの読み込み、変更、保存

Files
-----
- config.ini
  - 既定の設定
- presets/*.ini
  - 既定の設定に重ねる構成 (既定値と異なる項目のみ)
"""
from os import path

from .config_editor import (
    ConfigEditor,
    ConfigParseError,
    ConfigSection,
    ConfigVariable,
    RangeType,
    check_range,
    get_range_string,
    parse_config_file,
)


DEFAULT_CONFIG_PATH = path.join(path.dirname(path.abspath(__file__)), "config.ini")
"""既定の設定ファイルのパス"""

PRESET_DIR = path.join(path.dirname(path.abspath(__file__)), "presets")
"""プリセットのディレクトリ"""
