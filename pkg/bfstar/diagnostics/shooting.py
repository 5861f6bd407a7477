"""
初期値問題としての積分 (選点法とは独立な検証用)

中心の級数展開 y ≈ y(0) + y''(0) x² / 2 から出発し、固定した (R_s, Ω) で
x y'' + y' = F と第一積分の微分形 μ' = -(1+μ)(ν' + 2α φ') を
`scipy.integrate.solve_ivp` (RK45) で x = 1 まで積分する。

Classes
-------
- `ShootingResult` : 積分結果

Functions
---------
- `shoot` : 中心値から積分
- `shooting_deviation` : 収束解との x = 1 での差
"""
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.integrate import solve_ivp

from ..canm.state import FieldState
from ..model.functions import DilatonModel, get_model
from ..model.params import PhysicalParams, SpectralPair
from ..model.rhs import center_second_derivative, rhs_F
from ..model.stress import metric_lambda



DEFAULT_X0 = 1e-4
"""積分の開始点"""


@dataclass
class ShootingResult:
    """積分結果"""
    x: np.ndarray
    y: np.ndarray
    """(ν, φ, σ)、形状 (m, 3)"""
    yp: np.ndarray
    """x 微分、形状 (m, 3)"""
    mu: np.ndarray
    success: bool
    message: str = ""

    @property
    def end(self) -> np.ndarray:
        """最後の点での (ν, φ, σ)"""
        return self.y[-1]

    def exp_lambda(self, pair:SpectralPair, params:PhysicalParams,
                   model:Optional[DilatonModel]=None) -> np.ndarray:
        """各点での e^λ"""
        return metric_lambda(self.x, self.y, self.yp, self.mu, pair, params, model)


def shoot(params:PhysicalParams, pair:SpectralPair, nu0:float, phi0:float,
          x_end:float=1.0, x0:float=DEFAULT_X0, rtol:float=1e-10, atol:float=1e-12,
          n_eval:int=101, model:Optional[DilatonModel]=None) -> ShootingResult:
    """中心値 (ν0, φ0, σ_c) から x_end まで積分する

    Parameters
    ----------
    params : PhysicalParams
    pair : SpectralPair
        固定する (R_s, Ω)
    nu0, phi0 : float
        中心での ν, φ
    x_end : float
        積分の終点 (<= 1)
    x0 : float
        積分の開始点
    n_eval : int
        出力する点の数

    Returns
    -------
    ShootingResult
    """
    if model is None:
        model = get_model(params.model)
    if not 0.0 < x0 < x_end <= 1.0:
        raise ValueError(f"invalid integration range: ({x0}, {x_end})")
    y0 = np.array([nu0, phi0, params.sigma_c])
    ypp = center_second_derivative(y0, pair, params, model)
    mu_x0 = (1.0 + params.mu_c) * np.exp(
        -(ypp[0] + 2.0 * float(model.alpha(phi0)) * ypp[1]) * 0.5 * x0 * x0) - 1.0
    start = np.concatenate([y0 + 0.5 * ypp * x0 * x0, ypp * x0, [mu_x0]])

    def ode(x, s):
        y, yp, mu = s[0:3], s[3:6], s[6]
        F = rhs_F(x, y, yp, mu, pair, params, model)
        ypp = (F - yp) / x
        dmu = -(1.0 + mu) * (yp[0] + 2.0 * float(model.alpha(y[1])) * yp[1])
        return np.concatenate([yp, ypp, [dmu]])

    t_eval = np.linspace(x0, x_end, n_eval)
    sol = solve_ivp(ode, (x0, x_end), start, method="RK45", t_eval=t_eval, rtol=rtol, atol=atol)
    return ShootingResult(sol.t, sol.y[0:3].T, sol.y[3:6].T, sol.y[6], bool(sol.success), sol.message)


def shooting_deviation(state:FieldState, model:Optional[DilatonModel]=None) -> float:
    """収束解の (R_s, Ω, ν(0), φ(0)) で積分し、x = 1 での (ν, φ, σ) の差の最大値を返す"""
    y0 = state.y.values[0]
    res = shoot(state.params, state.pair, float(y0[0]), float(y0[1]), model=model)
    if not res.success:
        return float("inf")
    return float(np.max(np.abs(res.end - state.surface)))
