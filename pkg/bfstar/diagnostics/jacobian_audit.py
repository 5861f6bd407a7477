"""
Fréchet 微分と差分近似の比較

中心差分 D(h) = (F(p+h) - F(p-h)) / 2h に Richardson 補外
(4 D(h/2) - D(h)) / 3 を施した値を参照値とする。

Classes
-------
- `JacobianAuditReport` : 微分ブロックごとの最大相対誤差

Functions
---------
- `finite_difference_blocks` : 差分による微分
- `random_states` : 検査用のランダムな状態
- `jacobian_audit` : ランダムな状態で解析的な微分を検査
"""
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from ..model.functions import DilatonModel, get_model
from ..model.params import PhysicalParams, SpectralPair
from ..model.rhs import FrechetBlocks, frechet_derivatives, rhs_F



BLOCK_NAMES = FrechetBlocks._fields
"""検査するブロックの名前"""


def _richardson(f:Callable[[float], np.ndarray], h:float) -> np.ndarray:
    d_h = (f(h) - f(-h)) / (2.0 * h)
    d_h2 = (f(0.5 * h) - f(-0.5 * h)) / h
    return (4.0 * d_h2 - d_h) / 3.0


def finite_difference_blocks(x:float, y:np.ndarray, yp:np.ndarray, mu:float,
                             pair:SpectralPair, params:PhysicalParams,
                             model:Optional[DilatonModel]=None,
                             step:float=1e-6) -> FrechetBlocks:
    """1点での F の微分を差分で近似する"""
    if model is None:
        model = get_model(params.model)
    y = np.asarray(y, dtype=float)
    yp = np.asarray(yp, dtype=float)
    F = lambda y_, yp_, mu_, pair_: rhs_F(x, y_, yp_, mu_, pair_, params, model)
    e = np.eye(3)
    dF_dy = np.stack([_richardson(lambda h: F(y + h * e[j], yp, mu, pair), step)
                      for j in range(3)], axis=-1)
    dF_dyp = np.stack([_richardson(lambda h: F(y, yp + h * e[j], mu, pair), step)
                       for j in range(3)], axis=-1)
    dF_dR = _richardson(lambda h: F(y, yp, mu, pair.shifted(h, 0.0)), step)
    dF_dOmega = _richardson(lambda h: F(y, yp, mu, pair.shifted(0.0, h)), step)
    dF_dmu = _richardson(lambda h: F(y, yp, mu + h, pair), step)
    return FrechetBlocks(dF_dy, dF_dyp, dF_dR, dF_dOmega, dF_dmu)


def random_states(n:int, rng:np.random.Generator
                  ) -> List[Tuple[float, np.ndarray, np.ndarray, float, SpectralPair]]:
    """検査用の (x, y, y', μ, (R_s, Ω)) を n 個生成する

    x ∈ (0.05, 1.5)、場とその微分は小さい振幅、μ は星の内部で (0.1, 2)
    """
    states = []
    for _ in range(n):
        x = rng.uniform(0.05, 1.5)
        y = np.array([rng.uniform(-1.0, 0.0), rng.uniform(-0.1, 0.1), rng.uniform(0.0, 0.8)])
        yp = rng.uniform(-0.2, 0.2, size=3)
        mu = rng.uniform(0.1, 2.0) if x < 1.0 else 0.0
        pair = SpectralPair(rng.uniform(0.8, 1.4), rng.uniform(0.6, 1.0))
        states.append((x, y, yp, mu, pair))
    return states


@dataclass
class JacobianAuditReport:
    """差分との比較結果"""
    n_states: int
    max_errors: Dict[str, float] = field(default_factory=dict)
    """ブロックごとの最大相対誤差 (ブロックの最大値ノルムで規格化)"""

    def passed(self, tol:float=1e-6) -> bool:
        return all(v <= tol for v in self.max_errors.values())

    def asdict(self) -> dict:
        return {"n_states": self.n_states, "max_errors": dict(self.max_errors)}


def jacobian_audit(params:PhysicalParams, n_states:int=50, seed:int=0, step:float=1e-6,
                   model:Optional[DilatonModel]=None) -> JacobianAuditReport:
    """ランダムな状態で解析的な微分と差分を比較する"""
    if model is None:
        model = get_model(params.model)
    rng = np.random.default_rng(seed)
    report = JacobianAuditReport(n_states, {name: 0.0 for name in BLOCK_NAMES})
    for x, y, yp, mu, pair in random_states(n_states, rng):
        exact = frechet_derivatives(x, y, yp, mu, pair, params, model)
        approx = finite_difference_blocks(x, y, yp, mu, pair, params, model, step)
        for name, a, b in zip(BLOCK_NAMES, exact, approx):
            scale = max(float(np.max(np.abs(b))), 1e-8)
            err = float(np.max(np.abs(a - b))) / scale
            report.max_errors[name] = max(report.max_errors[name], err)
    return report
