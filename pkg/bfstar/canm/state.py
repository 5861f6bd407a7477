"""
反復の状態とレポート

Classes
-------
- `FieldState` : 場 (ν, φ, σ) のスプライン、μ、固有値の組
- `TerminationReason` : 反復の終了理由
- `SolveReport` : 反復の履歴

Functions
---------
- `mu_from_fields` : 第一積分から μ を計算 (任意の点)
- `mu_update` : 節点での μ を計算
- `eigen_conditions` : 固有値を決める2つの条件の残差
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np

from ..discretization.spline import SplineFunction
from ..model.functions import DilatonModel, get_model
from ..model.params import PhysicalParams, SpectralPair



def mu_from_fields(x, y_values, y_center, params:PhysicalParams,
                   model:Optional[DilatonModel]=None) -> np.ndarray:
    """第一積分 (1+μ) A(φ)² e^ν = 一定 から μ を計算する

    Parameters
    ----------
    x : np.ndarray
        評価点、形状 (m,)
    y_values : np.ndarray
        評価点での (ν, φ, σ)、形状 (m, 3)
    y_center : np.ndarray
        x = 0 での (ν, φ, σ)

    Returns
    -------
    np.ndarray
        生の μ (負の値もそのまま)。x >= 1 では 0
    """
    if model is None:
        model = get_model(params.model)
    x = np.asarray(x, dtype=float)
    y_values = np.atleast_2d(y_values)
    log_ratio = 2.0 * (np.log(model.coupling(y_center[1])) - np.log(model.coupling(y_values[:, 1])))
    mu = (1.0 + params.mu_c) * np.exp(log_ratio + y_center[0] - y_values[:, 0]) - 1.0
    mu = np.where(x >= 1.0, 0.0, mu)
    return np.where(x == 0.0, params.mu_c, mu)


def mu_update(y:SplineFunction, params:PhysicalParams,
              model:Optional[DilatonModel]=None) -> np.ndarray:
    """節点での μ を第一積分から計算する

    Returns
    -------
    np.ndarray
        形状 (N+1,)。μ[0] = μ_c, μ[N_s] = 0 で、x > 1 の節点は 0
    """
    grid = y.grid
    mu = mu_from_fields(grid.nodes, y.values, y.values[0], params, model)
    mu[0] = params.mu_c
    mu[grid.n_star:] = 0.0
    return mu


def eigen_conditions(y:SplineFunction, params:PhysicalParams,
                     model:Optional[DilatonModel]=None) -> Tuple[float, float]:
    """固有値を決める条件の残差

    Returns
    -------
    Tuple[float, float]
        (σ_c - σ(0), ν(1) - ν(0) + 2 ln(A(φ(1))/A(φ(0))) - ln(1+μ_c))。
        2つめは表面で μ = 0 となる条件
    """
    if model is None:
        model = get_model(params.model)
    y0 = y.values[0]
    y1 = y.values[y.grid.n_star]
    surface = y1[0] - y0[0] + 2.0 * float(np.log(model.coupling(y1[1])) - np.log(model.coupling(y0[1]))) \
        - np.log1p(params.mu_c)
    return params.sigma_c - y0[2], float(surface)


@dataclass
class FieldState:
    """CANM の反復の状態"""
    y: SplineFunction
    """(ν, φ, σ) のスプライン"""
    mu: np.ndarray
    """節点での μ (形状 (N+1,)、生の値)"""
    pair: SpectralPair
    """(R_s, Ω)"""
    params: PhysicalParams

    @property
    def grid(self):
        return self.y.grid

    @classmethod
    def from_spline(cls, y:SplineFunction, pair:SpectralPair, params:PhysicalParams,
                    model:Optional[DilatonModel]=None) -> "FieldState":
        """μ を第一積分から計算して状態を作る"""
        return cls(y, mu_update(y, params, model), pair, params)

    def with_params(self, params:PhysicalParams) -> "FieldState":
        """パラメータを置き換える (継続法の初期近似用)

        σ(0) = σ_c はそのままでは満たされないので、σ を定数倍して合わせる。
        """
        y = self.y.copy()
        if self.y.values[0, 2] != 0.0 and params.sigma_c != self.params.sigma_c:
            scale = params.sigma_c / self.y.values[0, 2]
            y.values[:, 2] *= scale
            y.moments[:, 2] *= scale
        return FieldState.from_spline(y, self.pair, params, get_model(params.model))

    def resampled(self, grid, model:Optional[DilatonModel]=None) -> "FieldState":
        """別の格子に移した状態 (格子を細かくする・X_∞ を変える場合の初期近似用)

        元の区間の外側の節点は 0 とする。境界条件のずれは次の反復で補正される。
        """
        x = grid.nodes
        inside = x <= self.grid.x_inf
        values = np.zeros((grid.n + 1, 3))
        moments = np.zeros((grid.n + 1, 3))
        if np.any(inside):
            val, d1, _ = self.y.evaluate(x[inside])
            values[inside] = val
            moments[inside] = d1
        y = SplineFunction(grid, values, moments)
        return FieldState.from_spline(y, self.pair, self.params, model)

    def node_value(self, index:int) -> np.ndarray:
        return self.y.values[index].copy()

    @property
    def surface(self) -> np.ndarray:
        """x = 1 での (ν, φ, σ)"""
        return self.node_value(self.grid.n_star)

    @property
    def center(self) -> np.ndarray:
        """x = 0 での (ν, φ, σ)"""
        return self.node_value(0)


class TerminationReason(Enum):
    """反復の終了理由"""
    CONVERGED = "converged"
    MAX_ITERATIONS = "max_iterations"
    DIVERGED = "diverged"
    STAGNATED = "stagnated"
    """ε の近くで δ が減少しなくなった"""


@dataclass
class SolveReport:
    """CANM の反復の履歴"""
    iterations: int = 0
    """反復回数"""
    residual_history: List[float] = field(default_factory=list)
    """各反復の δ(τ_opt)。先頭は初期状態の δ"""
    tau_history: List[float] = field(default_factory=list)
    """各反復の τ_opt"""
    eigen_history: List[Tuple[float, float]] = field(default_factory=list)
    """各反復後の (R_s, Ω)。先頭は初期値"""
    converged: bool = False
    termination_reason: Optional[TerminationReason] = None
    wall_time: float = 0.0
    """経過時間 [s]"""

    @property
    def final_residual(self) -> float:
        return self.residual_history[-1] if self.residual_history else float("nan")

    def asdict(self) -> dict:
        """JSON に書き出せる辞書"""
        return {
            "iterations": self.iterations,
            "residual_history": [float(v) for v in self.residual_history],
            "tau_history": [float(v) for v in self.tau_history],
            "eigen_history": [[float(a), float(b)] for a, b in self.eigen_history],
            "converged": self.converged,
            "termination_reason": self.termination_reason.value if self.termination_reason else None,
            "wall_time": self.wall_time,
        }

    @classmethod
    def from_dict(cls, d:dict) -> "SolveReport":
        reason = d.get("termination_reason")
        return cls(
            iterations=d["iterations"],
            residual_history=list(d["residual_history"]),
            tau_history=list(d["tau_history"]),
            eigen_history=[tuple(e) for e in d["eigen_history"]],
            converged=d["converged"],
            termination_reason=TerminationReason(reason) if reason else None,
            wall_time=d.get("wall_time", 0.0))
