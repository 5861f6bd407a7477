"""config_editor と RunConfig のテスト"""
import math
import os
import shutil
import tempfile

import pytest

from bfstar.config import ConfigEditor, ConfigParseError, PRESET_DIR, RangeType
from bfstar.runner import RunConfig, parse_sweep_spec

DATA_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "data")
SIMPLE_CONFIG = os.path.join(DATA_DIR, "simple_config.ini")



@pytest.fixture
def config() -> ConfigEditor:
    return ConfigEditor(SIMPLE_CONFIG)

@pytest.fixture
def tmp_dir():
    d = tempfile.mkdtemp()
    yield d
    shutil.rmtree(d)


def _write(dir_path:str, name:str, text:str) -> str:
    file_path = os.path.join(dir_path, name)
    with open(file_path, "w", encoding="utf-8") as f:
        f.write(text)
    return file_path


# 正しいファイルを指定した場合の読み込みテスト
def test_load_valid_file():
    config_editor = ConfigEditor()
    config_editor.load(SIMPLE_CONFIG)
    assert config_editor.is_loaded() is True

# 正しくないファイル/ディレクトリを指定した場合の読み込みテスト
def test_load_invalid_file():
    config_editor = ConfigEditor()
    config_editor.load("invalid_file")
    assert config_editor.is_loaded() is False

    config_editor.load(DATA_DIR)
    assert config_editor.is_loaded() is False

# 冒頭・セクションへのコメントの取得テスト
def test_load_section_comments(config):
    assert config.is_loaded()
    assert config["SECTION1"].description == [" セクション1のコメント1"]
    assert config["SECTION1"].tags == {"icon": "api"}
    assert config["SECTION2"].description == []
    assert config["SECTION2"].tags == {}

# 各キーへのコメントの取得テスト
def test_load_variable_comments(config):
    assert config["SECTION1"]["VAR_1"].description == [" 変数1のコメント1", " 変数1のコメント2"]
    assert config["SECTION1"]["VAR_1"].tags == {"tag1": "value1", "tag2": 0.0}
    assert config["SECTION1"]["VAR_2"].description == [" 変数2のコメント1", " 変数2のコメント2"]
    assert config["SECTION1"]["VAR_2"].tags == {}
    assert config["SECTION2"]["VAR_3"].description == [" 変数3のコメント1"]

# コメントによる型ヒントの取得テスト
def test_load_variable_type_hint(config):
    assert config["SECTION1"]["VAR_1"].type == str
    assert config["SECTION1"]["VAR_2"].type == int
    assert config["SECTION2"]["VAR_3"].type == float
    assert config["SECTION2"]["VAR_4"].type == bool

    var_2 = config["SECTION1"]["VAR_2"]
    assert var_2.range_type == RangeType.LIST_NE_E
    assert var_2.range == [0.0, 100.0]
    assert var_2.default == 10
    var_3 = config["SECTION2"]["VAR_3"]
    assert var_3.range_type == RangeType.LIST_NE_NE
    assert var_3.range == [0.0, math.inf]
    var_4 = config["SECTION2"]["VAR_4"]
    assert var_4.range_type == RangeType.SET
    assert var_4.range == [False, True]
    assert var_4.value is True

# 大文字小文字を区別しない
def test_case_insensitive_keys(config):
    assert config["SECTION1"]["var_1"].value == "value1"
    assert "var_2" in config["SECTION1"]

# 値の設定 (型変換と範囲チェック)
def test_set(config):
    config.set("SECTION1", "VAR_2", "42")
    assert config.get("SECTION1", "VAR_2") == 42
    config.set("SECTION2", "VAR_4", "0")
    assert config.get("SECTION2", "VAR_4") is False

    with pytest.raises(ConfigParseError) as e:
        config.set("SECTION1", "VAR_2", 0)
    assert e.value.field == "SECTION1.VAR_2"
    with pytest.raises(ConfigParseError):
        config.set("SECTION1", "VAR_2", "abc")
    with pytest.raises(ConfigParseError):
        config.set("SECTION2", "VAR_3", -1.0)

# 保存して読み込み直すと同じ内容になる
def test_save_and_reload(config, tmp_dir):
    config.set("SECTION1", "VAR_2", 55)
    saved_path = os.path.join(tmp_dir, "saved.ini")
    config.save(saved_path)

    reloaded = ConfigEditor(saved_path)
    assert reloaded.is_loaded()
    assert reloaded.get("SECTION1", "VAR_2") == 55
    for section_name, section in config.items():
        for key, var in section.items():
            other = reloaded[section_name][key]
            assert other.value == var.value
            assert other.type == var.type
            assert other.range_type == var.range_type
            assert other.range == var.range
            assert other.default == var.default
            assert other.description == var.description
            assert other.tags == var.tags
    assert reloaded["SECTION1"].tags == {"icon": "api"}

# 不正な値は行番号と SECTION.KEY を示す
def test_invalid_value_reports_line(tmp_dir):
    file_path = _write(tmp_dir, "bad.ini", "[A]\n; type: int;\nX=abc\n")
    with pytest.raises(ConfigParseError) as e:
        ConfigEditor(file_path)
    assert e.value.line == 3
    assert e.value.field == "A.X"
    assert "line 3" in str(e.value)

def test_out_of_range_value(tmp_dir):
    file_path = _write(tmp_dir, "bad.ini", "[A]\n; type: float; range: (0, 1);\nX=2.0\n")
    with pytest.raises(ConfigParseError) as e:
        ConfigEditor(file_path)
    assert e.value.field == "A.X"

# 既存にない項目は merge できない
def test_merge(config, tmp_dir):
    good = ConfigEditor(_write(tmp_dir, "good.ini", "[SECTION1]\nVAR_2=30\n"))
    config.merge(good)
    # merge 側の型ヒントがなくても元の型に変換される
    assert config.get("SECTION1", "VAR_2") == 30

    unknown = ConfigEditor(_write(tmp_dir, "unknown.ini", "[SECTION1]\nVAR_9=1\n"))
    with pytest.raises(ConfigParseError) as e:
        config.merge(unknown)
    assert e.value.field == "SECTION1.VAR_9"
    assert e.value.line == 2


class TestRunConfig:
    """既定値・プリセット・上書きを重ねた実行設定"""

    @pytest.fixture(autouse=True)
    def no_env(self, monkeypatch):
        monkeypatch.delenv("BFSTAR_OUTPUT_DIR", raising=False)

    def test_defaults(self, tmp_dir):
        config = RunConfig(tmp_dir)
        assert config.params.sigma_c == 0.8
        assert config.params.mu_c == 1.0
        assert config.params.lam == 0.01
        assert config.numerics.n == 2048
        assert config.numerics.x_inf == 128.0
        assert config.numerics.eps == 1e-10
        assert config.numerics.mu_coupling is False
        assert config.initial_guess.omega == 0.9
        assert config.sweep is None
        assert config.output.directory == os.path.abspath(os.path.join(tmp_dir, "output"))
        assert config.output.delimiter == "\t"
        assert config.log_path == os.path.join(tmp_dir, "bfstar.log")

    def test_overrides(self, tmp_dir):
        config = RunConfig(tmp_dir, overrides={"PHYSICS.SIGMA_C": 0.3, "NUMERICS.N": 512})
        assert config.params.sigma_c == 0.3
        assert config.numerics.n == 512
        settings = config.numerics.canm_settings()
        assert settings.eps == 1e-10
        assert config.with_numerics(n=128).n == 128
        assert config.numerics.n == 512

    @pytest.mark.parametrize("overrides", [
        {"NUMERICS.N": 4},
        {"NUMERICS.X_INF": 1.0},
        {"PHYSICS.SIGMA_C": 0.0},
        {"PHYSICS.MU_C": -1.0},
        {"NUMERICS.GRADING": "geometric"},
    ])
    def test_invalid_overrides(self, tmp_dir, overrides):
        with pytest.raises(ConfigParseError) as e:
            RunConfig(tmp_dir, overrides=overrides)
        assert e.value.field == next(iter(overrides))

    def test_unknown_field(self, tmp_dir):
        with pytest.raises(ConfigParseError) as e:
            RunConfig(tmp_dir, overrides={"PHYSICS.FOO": 1.0})
        assert e.value.field == "PHYSICS.FOO"

    def test_missing_file(self, tmp_dir):
        with pytest.raises(FileNotFoundError):
            RunConfig(tmp_dir, os.path.join(tmp_dir, "missing.ini"))

    def test_reference_preset(self, tmp_dir):
        config = RunConfig(tmp_dir, os.path.join(PRESET_DIR, "reference.ini"))
        assert config.params.sigma_c == 0.8
        assert config.params.gamma == 1.0
        assert config.numerics.n == 2048
        assert config.numerics.grading == "uniform"

    def test_sigma_c_family_preset(self, tmp_dir):
        config = RunConfig(tmp_dir, os.path.join(PRESET_DIR, "sigma_c_family.ini"))
        assert config.params.mu_c == 0.5
        assert config.params.lam == 10.0
        assert config.sweep is not None
        values = config.sweep.values()
        assert len(values) == 17
        assert values[0] == 0.1
        assert values[-1] == pytest.approx(0.9)
        assert config.params_for("sigma_c", values[3]).sigma_c == values[3]

    def test_sweep_spec(self, tmp_dir):
        overrides = parse_sweep_spec("lambda:0:1:0.5")
        assert overrides == {"SWEEP.PARAMETER": "lambda", "SWEEP.START": 0.0,
                             "SWEEP.STOP": 1.0, "SWEEP.STEP": 0.5}
        config = RunConfig(tmp_dir, overrides=overrides)
        assert config.sweep.values() == [0.0, 0.5, 1.0]
        assert config.params_for("lambda", 0.5).lam == 0.5

    def test_descending_sweep(self, tmp_dir):
        config = RunConfig(tmp_dir, overrides=parse_sweep_spec("sigma_c:0.5:0.3:-0.1"))
        assert config.sweep.values() == pytest.approx([0.5, 0.4, 0.3])

    @pytest.mark.parametrize("spec", ["sigma_c:0.1:0.9", "sigma_c:a:0.9:0.1"])
    def test_bad_sweep_spec(self, spec):
        with pytest.raises(ConfigParseError):
            parse_sweep_spec(spec)

    def test_sweep_out_of_range(self, tmp_dir):
        # σ_c = 0 を含む範囲は扱えない
        with pytest.raises(ConfigParseError):
            RunConfig(tmp_dir, overrides=parse_sweep_spec("sigma_c:0.2:0.0:-0.1"))

    def test_output_dir_precedence(self, tmp_dir, monkeypatch):
        env_dir = os.path.join(tmp_dir, "env")
        cli_dir = os.path.join(tmp_dir, "cli")
        monkeypatch.setenv("BFSTAR_OUTPUT_DIR", env_dir)
        assert RunConfig(tmp_dir).output.directory == os.path.abspath(env_dir)
        assert RunConfig(tmp_dir, output_dir=cli_dir).output.directory == os.path.abspath(cli_dir)

    def test_save(self, tmp_dir):
        config = RunConfig(tmp_dir, overrides={"NUMERICS.N": 256})
        saved = os.path.join(tmp_dir, "run_config.ini")
        config.save(saved)
        assert RunConfig(tmp_dir, saved).numerics.n == 256
