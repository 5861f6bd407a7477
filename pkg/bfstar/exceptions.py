"""
数値計算層で送出される例外

Classes
-------
- `StarSolverError` : 数値計算層の例外 (基底クラス)
- `MetricBreakdownError` : e^λ の閉じた式の分母/分子が正でない場合
- `FermiDomainError` : フェルミ運動量が負の場合
- `InvalidDomainError` : 計算領域の指定が不正な場合
- `OutOfRangeError` : スプラインの評価点が領域外の場合
- `LinearSolveError` : 選点系の LU 分解に失敗した場合
- `DegenerateEigenDirectionError` : (ρ, ω) を決める 2x2 系が特異な場合
- `OrderUndefinedError` : Runge の次数が定義できない場合

Notes
-----
runner パッケージではこれらの例外を捕捉し、
`bfstar.status.errors` のエラー情報に変換して扱う。
"""
from typing import Optional



class StarSolverError(Exception):
    """数値計算層の例外 (基底クラス)"""


class MetricBreakdownError(StarSolverError):
    """e^λ の閉じた式が正値にならない (非物理的な反復解)"""
    def __init__(self, x:Optional[float]=None, message:str=""):
        self.x = x
        """破綻が検出された座標 x (不明な場合は None)"""
        if not message:
            message = "metric breakdown: e^lambda is not positive" \
                      + (f" at x={x:.6g}" if x is not None else "")
        super().__init__(message)


class FermiDomainError(StarSolverError):
    """フェルミ運動量 μ が負"""


class InvalidDomainError(StarSolverError):
    """計算領域 (X_∞, 分割数など) が不正"""


class OutOfRangeError(StarSolverError):
    """評価点が [0, X_∞] の外にある"""


class LinearSolveError(StarSolverError):
    """選点系の分解・求解に失敗"""
    def __init__(self, message:str, pivot_node:Optional[int]=None):
        self.pivot_node = pivot_node
        """ピボットが消失した格子点の番号 (不明な場合は None)"""
        if pivot_node is not None:
            message = f"{message} (pivot at node {pivot_node})"
        super().__init__(message)


class DegenerateEigenDirectionError(StarSolverError):
    """(ρ, ω) についての 2x2 系の行列式がほぼ 0"""
    def __init__(self, determinant:float):
        self.determinant = determinant
        """2x2 系の行列式"""
        super().__init__(f"degenerate eigen-direction: det={determinant:.3e}")


class OrderUndefinedError(StarSolverError):
    """Runge の次数を計算できない (差分の比が正でない)"""
