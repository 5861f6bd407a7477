"""
計算格子 Δ

x = 1 (星の表面) を必ず節点に含む [0, X_∞] 上の格子を作る。

Classes
-------
- `Grid` : 節点列と補助量 (不変)

Functions
---------
- `build_grid` : 一様/集中格子の生成
"""
from dataclasses import dataclass, field
import math

import numpy as np

from ..exceptions import InvalidDomainError



GRADINGS = ("uniform", "condensed")
"""格子の種類"""

GAUSS_THETA = np.array([0.5 - math.sqrt(3.0) / 6.0, 0.5 + math.sqrt(3.0) / 6.0])
"""各小区間内の Gauss 点の相対座標 θ₁, θ₂"""


@dataclass(frozen=True)
class Grid:
    """[0, X_∞] 上の格子"""
    nodes: np.ndarray
    """x_0 = 0 < ... < x_N = X_∞"""
    n_star: int
    """x_{N_s} = 1 となる節点番号 N_s"""
    steps: np.ndarray = field(init=False, repr=False)
    """h_i = x_{i+1} - x_i"""
    gauss_points: np.ndarray = field(init=False, repr=False)
    """選点 ξ_ij, 形状 (N, 2)"""

    def __post_init__(self):
        nodes = np.array(self.nodes, dtype=float)
        nodes.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        steps = np.diff(nodes)
        steps.setflags(write=False)
        object.__setattr__(self, "steps", steps)
        gp = nodes[:-1, None] + GAUSS_THETA[None, :] * steps[:, None]
        gp.setflags(write=False)
        object.__setattr__(self, "gauss_points", gp)
        if nodes[0] != 0.0 or nodes[self.n_star] != 1.0 or np.any(steps <= 0):
            raise InvalidDomainError("grid must start at 0, contain x = 1 and be increasing")

    @property
    def n(self) -> int:
        """小区間の数 N"""
        return len(self.nodes) - 1

    @property
    def x_inf(self) -> float:
        """計算領域の右端 X_∞"""
        return float(self.nodes[-1])

    @property
    def interior_nodes(self) -> np.ndarray:
        """星の内部と表面 (x <= 1) の節点"""
        return self.nodes[:self.n_star + 1]

    def contains_nested(self, coarse:"Grid") -> bool:
        """`coarse` の節点がすべてこの格子の節点に含まれるか"""
        return bool(np.all(np.isin(coarse.nodes, self.nodes)))


def build_grid(n:int, x_inf:float, grading:str="uniform", strength:float=2.0) -> Grid:
    """格子を生成する

    Parameters
    ----------
    n : int
        小区間の数 (>= 2。実行設定では 8 以上に制限される)
    x_inf : float
        右端 X_∞ (> 1)
    grading : str
        "uniform" または "condensed"
    strength : float
        "condensed" での集中の強さ (> 0)

    Returns
    -------
    Grid

    Raises
    ------
    InvalidDomainError
        引数が不正な場合
    """
    if not math.isfinite(x_inf) or x_inf <= 1.0:
        raise InvalidDomainError(f"x_inf must be greater than 1: {x_inf}")
    if n < 2:
        raise InvalidDomainError(f"too few subintervals: {n}")
    if grading not in GRADINGS:
        raise InvalidDomainError(f"unknown grading: {grading}")

    if grading == "uniform":
        n_s = min(max(1, round(n / x_inf)), n - 1)
        inner = np.linspace(0.0, 1.0, n_s + 1)
        outer = np.linspace(1.0, x_inf, n - n_s + 1)
    else:
        if strength <= 0:
            raise InvalidDomainError(f"grading strength must be positive: {strength}")
        n_s = min(max(2, round(0.25 * n)), n - 1)
        t = np.linspace(0.0, 1.0, n_s + 1)
        inner = 0.5 * (1.0 + np.tanh(strength * (2.0 * t - 1.0)) / math.tanh(strength))
        t = np.linspace(0.0, 1.0, n - n_s + 1)
        outer = 1.0 + (x_inf - 1.0) * np.expm1(strength * t) / math.expm1(strength)
    inner[0], inner[-1] = 0.0, 1.0
    outer[0], outer[-1] = 1.0, x_inf
    return Grid(np.concatenate([inner, outer[1:]]), n_s)
