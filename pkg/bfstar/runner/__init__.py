"""
solve / sweep / verify の実行

Modules
-------
- `runner` : 実行クラス
- `runner_config` : 実行設定
"""
from .runner import StarSolverRunner, COMMANDS
from .runner_config import (
    LogLevel, RunConfig, NumericsConfig, InitialGuessConfig, SweepConfig, OutputConfig,
    parse_sweep_spec
)
