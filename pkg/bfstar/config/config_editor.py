"""
設定ファイル (INI) の読み込み、変更、保存を行うモジュール

configparser に、コメント (説明) ・タグ・型ヒントの読み書きと、
値の型変換・範囲チェックを追加したもの。
変換できない値、範囲外の値、不正な行は ConfigParseError として報告し、
ファイルの行番号と `SECTION.KEY` を保持する。

Classes
-------
- RangeType
  - 変数の範囲の種類
- ConfigVariable
  - 設定ファイルの変数
- ConfigSection
  - 設定ファイルのセクション
- ConfigEditor
  - 設定ファイルの読み込み・変更・保存
- ConfigParseError
  - 設定ファイルの解析エラー

Functions
---------
- parse_config_file
  - 設定ファイルを解析して ConfigData を返す
- get_range_string
  - 範囲の種類と値を文字列に変換する
- check_range
  - 値が範囲内に収まっているか確認

Usage
-----
```python
from bfstar.config.config_editor import ConfigEditor

editor = ConfigEditor("config.ini")
sigma_c = editor["PHYSICS"]["SIGMA_C"].value
editor["NUMERICS"]["N"] = 256
editor.save("run_config.ini")
```
"""
from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from enum import Enum, auto
import math
import re
from typing import Dict, Iterator, List, Optional, Tuple, Union


ConfigValueType = Union[bool, int, float, str]
"""ConfigVariable の value, default の型"""


VARIABLE_TYPES = {
    "bool": bool,
    "int": int,
    "float": float,
    "string": str,
}
"""型ヒントの文字列から型への変換表"""

TYPE_TO_STR = {v: k for k, v in VARIABLE_TYPES.items()}
"""型から型ヒントの文字列への変換表"""

_SECTION_RE = re.compile(r"^\[([\w]+)\]\s*$")
_KEY_RE = re.compile(r"^([\w]+)\s*=(.*)$")
_TAGS_RE = re.compile(r"^; #tags# (.*)$")
_TYPE_RE = re.compile(r"type: *([\w]+);")
_RANGE_RE = re.compile(r'range: *([\{\[\(][-+"\w\., ]*[\}\]\)]);')
_DEFAULT_RE = re.compile(r'default: *("(.*)"|[^;]*);')


class ConfigParseError(Exception):
    """設定ファイルの解析エラー

    Attributes
    ----------
    message : str
        エラー内容
    line : int, optional
        ファイル中の行番号 (1 始まり)
    field : str
        対象の項目 (`SECTION.KEY`)
    """
    def __init__(self, message: str, line: Optional[int] = None, field: str = ""):
        self.message = message
        self.line = line
        self.field = field
        super().__init__(str(self))

    def __str__(self) -> str:
        where = []
        if self.line is not None:
            where.append(f"line {self.line}")
        if self.field:
            where.append(self.field)
        return f"{', '.join(where)}: {self.message}" if where else self.message


class RangeType(Enum):
    """変数の範囲の種類"""
    NONE = auto()
    """範囲指定なし"""
    LIST_NE_NE = auto()
    """(min, max)"""
    LIST_NE_E = auto()
    """(min, max]"""
    LIST_E_NE = auto()
    """[min, max)"""
    LIST_E_E = auto()
    """[min, max]"""
    SET = auto()
    """{value1, value2, ...}"""


@dataclass
class ConfigVariable:
    """設定ファイルの変数

    Attributes
    ----------
    value : ConfigValueType
        変数の値
    description : list[str]
        変数の説明 (変数の上の連続したコメント行)
    type : type
        bool, int, float, str のいずれか
    range_type : RangeType
        範囲の種類
    range : list
        範囲 ([min, max]) または集合、指定なしの場合は空リスト
    default : ConfigValueType, optional
        デフォルト値
    tags : dict[str, str | float]
        タグ
    line : int, optional
        値が記述されている行番号
    """
    value: ConfigValueType = None
    description: List[str] = field(default_factory=list)
    type: type = str
    range_type: RangeType = RangeType.NONE
    range: list = field(default_factory=list)
    default: Optional[ConfigValueType] = None
    tags: Dict[str, Union[str, float]] = field(default_factory=dict)
    line: Optional[int] = None


class ConfigSection:
    """設定ファイルのセクション

    キーは大文字小文字を区別しない。値として ConfigVariable 以外を代入した場合は
    既存の変数の value を置き換える。
    """
    def __init__(self):
        self._variables: Dict[str, ConfigVariable] = {}
        self.description: List[str] = []
        """セクションの説明"""
        self.tags: Dict[str, Union[str, float]] = {}
        """セクションのタグ"""

    def __getitem__(self, key: str) -> ConfigVariable:
        return self._variables[key.upper()]

    def __setitem__(self, key: str, value: Union[ConfigVariable, ConfigValueType]):
        if isinstance(value, ConfigVariable):
            self._variables[key.upper()] = value
        else:
            self._variables[key.upper()].value = value

    def __delitem__(self, key: str):
        del self._variables[key.upper()]

    def __contains__(self, key: str) -> bool:
        return key.upper() in self._variables

    def __iter__(self) -> Iterator[str]:
        return iter(self._variables)

    def __len__(self) -> int:
        return len(self._variables)

    def keys(self):
        return self._variables.keys()

    def values(self):
        return self._variables.values()

    def items(self):
        return self._variables.items()


class ConfigData:
    """設定ファイル全体の内容"""
    def __init__(self):
        self._sections: Dict[str, ConfigSection] = {}
        self.description: List[str] = []
        """ファイル冒頭のコメント"""
        self.tags: Dict[str, Union[str, float]] = {}
        """ファイルのタグ"""

    def __getitem__(self, key: str) -> ConfigSection:
        return self._sections[key.upper()]

    def __setitem__(self, key: str, value: ConfigSection):
        self._sections[key.upper()] = value

    def __contains__(self, key: str) -> bool:
        return key.upper() in self._sections

    def __iter__(self) -> Iterator[str]:
        return iter(self._sections)

    def __len__(self) -> int:
        return len(self._sections)

    def keys(self):
        return self._sections.keys()

    def values(self):
        return self._sections.values()

    def items(self):
        return self._sections.items()


def _convert(text: str, type_: type, line: Optional[int], field_name: str) -> ConfigValueType:
    """文字列を指定の型に変換する。失敗した場合は ConfigParseError"""
    text = text.strip()
    if type_ is bool:
        lowered = text.lower()
        if lowered in configparser.ConfigParser.BOOLEAN_STATES:
            return configparser.ConfigParser.BOOLEAN_STATES[lowered]
        raise ConfigParseError(f"cannot convert '{text}' to bool", line, field_name)
    if type_ is str:
        return text
    try:
        return type_(text)
    except ValueError as e:
        raise ConfigParseError(
            f"cannot convert '{text}' to {TYPE_TO_STR[type_]}", line, field_name) from e


def _parse_range_hint(range_hint: str, type_: type, line: int,
                      field_name: str) -> Tuple[RangeType, list]:
    """範囲指定のヒント (`(0, inf)`, `{"a", "b"}` など) を解析する"""
    if range_hint.startswith("{"):
        range_type = RangeType.SET
    else:
        range_type = {
            ("[", "]"): RangeType.LIST_E_E,
            ("[", ")"): RangeType.LIST_E_NE,
            ("(", "]"): RangeType.LIST_NE_E,
            ("(", ")"): RangeType.LIST_NE_NE,
        }.get((range_hint[0], range_hint[-1]), RangeType.NONE)

    items = [s.strip() for s in range_hint[1:-1].split(",")]
    if range_type == RangeType.SET:
        return range_type, [_convert(s.strip('"'), type_, line, field_name) for s in items]
    if range_type == RangeType.NONE or len(items) != 2:
        raise ConfigParseError(f"malformed range hint '{range_hint}'", line, field_name)
    # 空欄は無限大
    lower = items[0] if items[0] != "" else "-inf"
    upper = items[1] if items[1] != "" else "inf"
    # 整数型でも無限大を扱うため、範囲の端は float で保持する
    bound_type = float if type_ in (int, float) else type_
    return range_type, [_convert(lower, bound_type, line, field_name),
                        _convert(upper, bound_type, line, field_name)]


def _parse_type_hint(comment: str, line: int, field_name: str
                     ) -> Tuple[type, RangeType, list, Optional[ConfigValueType]]:
    """型ヒント行から型、範囲、デフォルト値を取得する"""
    type_ = str
    if (m := _TYPE_RE.search(comment)) is not None:
        if m.group(1) not in VARIABLE_TYPES:
            raise ConfigParseError(f"unknown type '{m.group(1)}'", line, field_name)
        type_ = VARIABLE_TYPES[m.group(1)]

    if type_ is bool:
        range_type, range_ = RangeType.SET, [False, True]
    elif (m := _RANGE_RE.search(comment)) is not None:
        range_type, range_ = _parse_range_hint(m.group(1), type_, line, field_name)
    else:
        range_type, range_ = RangeType.NONE, []

    default = None
    if (m := _DEFAULT_RE.search(comment)) is not None:
        if m.group(2) is not None:
            default = m.group(2)
        else:
            default = _convert(m.group(1), type_, line, field_name)
    return type_, range_type, range_, default


def _parse_comments(lines: List[str]) -> Tuple[List[str], Dict[str, Union[str, float]]]:
    """コメント行を説明とタグに分ける"""
    description = []
    tags: Dict[str, Union[str, float]] = {}
    for line in lines:
        if (m := _TAGS_RE.match(line)) is not None:
            for tag in m.group(1).split(";"):
                if "=" not in tag:
                    continue
                k, v = tag.strip().split("=", 1)
                tags[k] = v[1:-1] if v.startswith('"') else float(v)
        else:
            description.append(line.lstrip(";").rstrip())
    return description, tags


def get_range_string(range_type: RangeType, range_: list) -> str:
    """範囲の種類と値を型ヒント用の文字列に変換する

    Examples
    --------
    >>> get_range_string(RangeType.LIST_NE_E, [0, math.inf])
    '(0, inf]'
    """
    if range_type == RangeType.NONE:
        return ""
    if range_type == RangeType.SET:
        if range_ == [False, True]:
            return "{0, 1}"
        return "{" + ", ".join(f'"{v}"' if isinstance(v, str) else str(v)
                               for v in range_) + "}"

    def fmt(v):
        if isinstance(v, float) and math.isfinite(v) and v.is_integer():
            return str(int(v))
        return str(v)

    left = "[" if range_type in (RangeType.LIST_E_E, RangeType.LIST_E_NE) else "("
    right = "]" if range_type in (RangeType.LIST_E_E, RangeType.LIST_NE_E) else ")"
    return f"{left}{fmt(range_[0])}, {fmt(range_[1])}{right}"


def check_range(value: Union[ConfigValueType, ConfigVariable],
                range_type: Optional[RangeType] = None,
                range_: Optional[list] = None) -> bool:
    """値が範囲内に収まっているか確認

    Args
    ----
    value : ConfigValueType | ConfigVariable
        値、ConfigVariable を渡した場合は自身の範囲で判定する
    range_type : RangeType, optional
    range_ : list, optional

    Returns
    -------
    result : bool
        範囲内であれば True
    """
    if isinstance(value, ConfigVariable):
        value, range_type, range_ = value.value, value.range_type, value.range
    if range_type is None or range_type == RangeType.NONE:
        return True
    if range_type == RangeType.SET:
        return value in range_
    lo, hi = range_
    if range_type == RangeType.LIST_NE_NE:
        return lo < value < hi
    if range_type == RangeType.LIST_NE_E:
        return lo < value <= hi
    if range_type == RangeType.LIST_E_NE:
        return lo <= value < hi
    return lo <= value <= hi


def parse_config_file(config_path: str, encoding: str = "utf-8") -> Optional[ConfigData]:
    """設定ファイルを解析する

    Args
    ----
    config_path : str
        設定ファイルのパス
    encoding : str
        設定ファイルのエンコーディング

    Returns
    -------
    data : ConfigData | None
        ファイルが存在しない・読み込めない場合は None

    Raises
    ------
    ConfigParseError
        不正な行、変換できない値、範囲外の値がある場合
    """
    try:
        with open(config_path, "r", encoding=encoding) as f:
            lines = [line.rstrip("\n") for line in f.readlines()]
    except (FileNotFoundError, UnicodeDecodeError, PermissionError, IsADirectoryError):
        return None

    # configparser による構文チェック (重複キーなど)
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string("\n".join(lines), source=str(config_path))
    except configparser.Error as e:
        raise ConfigParseError(str(e).splitlines()[0], getattr(e, "lineno", None)) from e

    data = ConfigData()
    section: Optional[ConfigSection] = None
    section_name = ""
    pending: List[str] = []
    header_done = False

    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if line == "":
            if not header_done:
                data.description, data.tags = _parse_comments(pending)
                header_done = True
            pending = []
            continue
        if line.startswith(";") or line.startswith("#"):
            pending.append(line)
            continue
        if not header_done:
            # 冒頭コメントの直後に空行なしでセクションが始まる場合
            header_done = True

        if (m := _SECTION_RE.match(line)) is not None:
            section_name = m.group(1).upper()
            section = ConfigSection()
            section.description, section.tags = _parse_comments(pending)
            data[section_name] = section
            pending = []
            continue

        if (m := _KEY_RE.match(line)) is None or section is None:
            raise ConfigParseError(f"malformed line '{line}'", lineno, section_name)

        key = m.group(1).upper()
        field_name = f"{section_name}.{key}"
        hint = pending[-1] if pending and _TYPE_RE.search(pending[-1]) else ""
        comments = pending[:-1] if hint else pending
        type_, range_type, range_, default = _parse_type_hint(hint, lineno, field_name)

        var = ConfigVariable(type=type_, range_type=range_type, range=range_,
                             default=default, line=lineno)
        var.description, var.tags = _parse_comments(comments)
        var.value = _convert(m.group(2), type_, lineno, field_name)
        if not check_range(var):
            raise ConfigParseError(
                f"value {var.value} out of range {get_range_string(range_type, range_)}",
                lineno, field_name)
        section[key] = var
        pending = []

    return data


class ConfigEditor:
    """設定ファイルの読み込み、変更、保存を行うクラス

    Usage
    -----
    - 読込: `editor = ConfigEditor("config.ini")` / `editor.load("config.ini")`
    - 取得: `editor["SECTION"]["KEY"].value` / `editor.get("SECTION", "KEY")`
    - 設定: `editor["SECTION"]["KEY"] = value` / `editor.set("SECTION", "KEY", value)`
    - 保存: `editor.save("other.ini")` (省略時は元のファイルに上書き)
    """

    def __init__(self, path: Optional[str] = None, encoding: str = "utf-8"):
        self._path = path
        self._encoding = encoding
        self._data: Optional[ConfigData] = None
        if path is not None:
            self._data = parse_config_file(path, encoding)

    def __getitem__(self, key: str) -> ConfigSection:
        return self._data[key]

    def __contains__(self, key: str) -> bool:
        return self._data is not None and key in self._data

    def __iter__(self) -> Iterator[str]:
        return iter(self._data)

    def __len__(self) -> int:
        return len(self._data)

    @property
    def path(self) -> Optional[str]:
        """読み込んだファイルのパス"""
        return self._path

    def load(self, path: Optional[str] = None, encoding: str = "utf-8"):
        """設定ファイルを読み込む (path 省略時は前回のパスを再読込)"""
        self._path = path if path is not None else self._path
        self._encoding = encoding
        self._data = parse_config_file(self._path, encoding)

    def is_loaded(self) -> bool:
        """設定ファイルが読み込まれているか"""
        return self._data is not None

    def keys(self):
        return self._data.keys()

    def values(self):
        return self._data.values()

    def items(self):
        return self._data.items()

    def get(self, section: str, key: str) -> ConfigValueType:
        return self._data[section][key].value

    def set(self, section: str, key: str, value: ConfigValueType):
        """値を設定する。型変換と範囲チェックを行う

        Raises
        ------
        ConfigParseError
            変換できない値、または範囲外の値
        """
        var = self._data[section][key]
        field_name = f"{section.upper()}.{key.upper()}"
        if not isinstance(value, var.type) or (var.type is int and isinstance(value, bool)):
            value = _convert(str(value), var.type, None, field_name)
        if not check_range(value, var.range_type, var.range):
            raise ConfigParseError(
                f"value {value} out of range {get_range_string(var.range_type, var.range)}",
                None, field_name)
        var.value = value

    def merge(self, other: "ConfigEditor"):
        """別の設定ファイルの値で上書きする

        other の値は self の型ヒントに従って変換・範囲チェックされる。
        プリセットのように、既定値と異なる項目だけを記述したファイルを重ねるために使う。

        Raises
        ------
        ConfigParseError
            self に存在しない項目、変換できない値、範囲外の値
        """
        for section_name, section in other.items():
            for key, var in section.items():
                field_name = f"{section_name}.{key}"
                if section_name not in self._data or key not in self._data[section_name]:
                    raise ConfigParseError("unknown field", var.line, field_name)
                try:
                    self.set(section_name, key, var.value)
                except ConfigParseError as e:
                    raise ConfigParseError(e.message, var.line, field_name) from e

    @staticmethod
    def _comment_text(description: List[str], tags: dict) -> str:
        text = "".join(f";{line}\n" for line in description)
        if tags:
            text += "; #tags#" + "".join(
                f' {k}="{v}";' if isinstance(v, str) else f" {k}={v};"
                for k, v in tags.items()) + "\n"
        return text

    def _write(self, f):
        f.write(self._comment_text(self._data.description, self._data.tags))
        for name, section in self._data.items():
            f.write("\n")
            f.write(self._comment_text(section.description, section.tags))
            f.write(f"[{name}]\n")
            for key, var in section.items():
                f.write(self._comment_text(var.description, var.tags))
                f.write(f"; type: {TYPE_TO_STR[var.type]};")
                if var.range_type != RangeType.NONE and var.type is not bool:
                    f.write(f" range: {get_range_string(var.range_type, var.range)};")
                if var.default is not None:
                    if var.type is str:
                        f.write(f' default: "{var.default}";')
                    elif var.type is bool:
                        f.write(f" default: {int(var.default)};")
                    else:
                        f.write(f" default: {var.default};")
                f.write("\n")
                value = int(var.value) if var.type is bool else var.value
                f.write(f"{key}={value}\n")

    def save(self, path: Optional[str] = None, encoding: Optional[str] = None):
        """コメント・型ヒント付きで保存する

        Args
        ----
        path : str, optional
            保存先、省略時は元のファイルに上書き
        encoding : str, optional
        """
        path = path if path is not None else self._path
        encoding = encoding if encoding is not None else self._encoding
        with open(path, "w", encoding=encoding) as f:
            self._write(f)
