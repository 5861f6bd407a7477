"""
第一積分 (1+μ) A(φ)² e^ν = 一定 の残差と派生量

Functions
---------
- `first_integral_residual` : 星の内部の節点での第一積分の残差の最大値
- `surface_residual` : 表面で μ = 0 となる条件の残差
- `boson_energy` : Ω e^{-ν(0)/2}
- `surface_frequency` : Ω e^{-ν(1)/2}
"""
from typing import Optional

import numpy as np

from ..canm.state import FieldState, eigen_conditions
from ..model.functions import DilatonModel, get_model



def first_integral_residual(state:FieldState, model:Optional[DilatonModel]=None) -> float:
    """星の内部 (0 <= x < 1) の節点で
    |ln[(1+μ(x)) A²(φ(x)) / ((1+μ_c) A²(φ(0)))] + ν(x) - ν(0)| の最大値

    μ は `state.mu` (節点値) を使う。1 + μ <= 0 の節点は inf とする。
    """
    if model is None:
        model = get_model(state.params.model)
    n_s = state.grid.n_star
    y = state.y.values[:n_s]
    mu = state.mu[:n_s]
    y0 = state.y.values[0]
    one_mu = 1.0 + mu
    if np.any(one_mu <= 0):
        return float("inf")
    log_a = np.log(model.coupling(y[:, 1])) - np.log(model.coupling(y0[1]))
    res = np.log(one_mu) - np.log1p(state.params.mu_c) + 2.0 * log_a + y[:, 0] - y0[0]
    return float(np.max(np.abs(res)))


def surface_residual(state:FieldState, model:Optional[DilatonModel]=None) -> float:
    """表面 x = 1 で μ = 0 となる条件の残差の絶対値"""
    return abs(eigen_conditions(state.y, state.params, model)[1])


def boson_energy(state:FieldState) -> float:
    """ボソンのエネルギー Ω e^{-ν(0)/2}"""
    return float(state.pair.omega * np.exp(-0.5 * state.y.values[0, 0]))


def surface_frequency(state:FieldState) -> float:
    """表面での振動数 Ω e^{-ν(1)/2}

    ν → ν + c, Ω → Ω e^{c/2} の変換 (ν(X_∞) = 0 とする位置の違い) で変わらない
    """
    return float(state.pair.omega * np.exp(-0.5 * state.surface[0]))
