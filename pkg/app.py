"""
アプリケーションのエントリーポイント

Usage
-----
```
python app.py solve --config bfstar/config/presets/reference.ini --n 4096
python app.py sweep --sweep sigma_c:0.1:0.9:0.05 --out out/sigma_c
python app.py verify --config bfstar/config/presets/reference.ini --n 256
```
"""
import argparse
import os
import sys
from typing import Dict, List, Optional

from bfstar.config import ConfigParseError
from bfstar.runner import COMMANDS, RunConfig, StarSolverRunner, parse_sweep_spec
from bfstar.status import errors as ie



OVERRIDE_FLAGS = {
    "sigma_c": "PHYSICS.SIGMA_C",
    "mu_c": "PHYSICS.MU_C",
    "lambda_": "PHYSICS.LAMBDA",
    "gamma": "PHYSICS.GAMMA",
    "b": "PHYSICS.B",
    "n": "NUMERICS.N",
    "x_inf": "NUMERICS.X_INF",
    "eps": "NUMERICS.EPS",
    "max_iter": "NUMERICS.MAX_ITER",
}
"""コマンドライン引数と上書きする設定項目の対応"""


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bfstar",
        description="Boson-fermion stars in scalar-tensor gravity with a massive dilaton")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", help="config file layered over the defaults")
    parser.add_argument("--sigma-c", dest="sigma_c", type=float)
    parser.add_argument("--mu-c", dest="mu_c", type=float)
    parser.add_argument("--lambda", dest="lambda_", type=float)
    parser.add_argument("--gamma", type=float)
    parser.add_argument("--b", type=float)
    parser.add_argument("--n", type=int, help="number of intervals")
    parser.add_argument("--x-inf", dest="x_inf", type=float, help="actual infinity")
    parser.add_argument("--eps", type=float, help="termination threshold")
    parser.add_argument("--max-iter", dest="max_iter", type=int)
    parser.add_argument("--sweep", help="name:start:stop:step")
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--emit-plots", dest="emit_plots", action="store_true",
                        help="write matplotlib scripts next to the tables")
    return parser


def overrides_from_args(args:argparse.Namespace) -> Dict[str, object]:
    """コマンドライン引数を `SECTION.KEY` をキーとする上書き値に変換する

    Raises
    ------
    ConfigParseError
        --sweep の形式が不正な場合
    """
    overrides: Dict[str, object] = {}
    for attr, field_name in OVERRIDE_FLAGS.items():
        if (value := getattr(args, attr)) is not None:
            overrides[field_name] = value
    if args.sweep:
        overrides.update(parse_sweep_spec(args.sweep))
    if args.emit_plots:
        overrides["OUTPUT.EMIT_PLOTS"] = True
    return overrides


def main(argv:Optional[List[str]]=None) -> int:
    """
    アプリケーションのエントリーポイント

    Returns
    -------
    int
        終了コード
    """
    args = build_parser().parse_args(argv)
    app_dir = os.path.dirname(os.path.abspath(__file__))

    try:
        config = RunConfig(app_dir, args.config, overrides_from_args(args), args.out)
    except FileNotFoundError as e:
        err = ie.ConfigFileNotFound(args.config, e)
        print(err.error_message(), file=sys.stderr)
        return err.exit_code
    except ConfigParseError as e:
        err = ie.InvalidConfig(e.field, e.line, e)
        print(err.error_message(), file=sys.stderr)
        return err.exit_code

    if args.command == "sweep" and config.sweep is None:
        err = ie.InvalidConfig("SWEEP.PARAMETER", None, "sweep needs --sweep or SWEEP.PARAMETER")
        print(err.error_message(), file=sys.stderr)
        return err.exit_code

    with StarSolverRunner(config, args.command) as runner:
        err = runner.run()
    if err is not None:
        print(err.error_message(), file=sys.stderr)
    return runner.exit_code



if __name__ == "__main__":
    sys.exit(main())
