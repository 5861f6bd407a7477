"""
エネルギー運動量テンソルの成分と e^λ の閉じた式

Classes
-------
- `StressComponents` : フェルミオン/ボソンのテンソル成分とトレース

Functions
---------
- `stress_components` : テンソル成分を計算
- `metric_lambda` : アインシュタイン方程式 G₁¹ から e^λ を計算
- `effective_mu` : 星の外と負の値を 0 にした μ

Notes
-----
- y' はすべて x についての微分 (動径微分は y'/R_s)
- 成分の符号は T_0 がエネルギー密度、T_1 が動径圧力の符号反転になる規約
"""
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..exceptions import MetricBreakdownError
from .fermi import fermi_state, FermiState
from .functions import DilatonModel, boson_potential, get_model
from .params import PhysicalParams, SpectralPair



@dataclass
class StressComponents:
    """テンソル成分の組 (各要素は評価点ごとの配列)"""
    t0_f: np.ndarray
    """T^F_0 = bA⁴g(μ)"""
    t1_f: np.ndarray
    """T^F_1 = T^F_2 = -bA⁴f(μ)"""
    t0_b: np.ndarray
    t1_b: np.ndarray
    t2_b: np.ndarray
    trace_f: np.ndarray
    """T^F_0 + 3 T^F_1"""
    trace_b: np.ndarray
    """T^B_0 + T^B_1 + 2 T^B_2"""
    t1: np.ndarray
    """T_1 = T^F_0 + T^F_1 + T^B_0 + T^B_1"""

    @property
    def t2_f(self) -> np.ndarray:
        return self.t1_f


@dataclass
class _MatterTerms:
    """e^λ を含まない物質項 (rhs と Jacobian の共通部分)"""
    a2: np.ndarray
    """A(φ)²"""
    alpha: np.ndarray
    alpha_prime: np.ndarray
    en: np.ndarray
    """e^{-ν}"""
    kt: np.ndarray
    """Ω² A² e^{-ν} σ² / 2"""
    pot: np.ndarray
    """A⁴ W(σ²)"""
    dw: np.ndarray
    """W'(σ²)"""
    fm: np.ndarray
    """bA⁴f(μ)"""
    gm: np.ndarray
    """bA⁴g(μ)"""
    fermi: FermiState
    v: np.ndarray
    dv: np.ndarray
    ddv: np.ndarray


def _as_points(y, yp, *others):
    """評価点の軸を先頭に持つ配列へ揃える"""
    y = np.asarray(y, dtype=float)
    yp = np.asarray(yp, dtype=float)
    scalar = y.ndim == 1
    y2 = np.atleast_2d(y)
    yp2 = np.broadcast_to(np.atleast_2d(yp), y2.shape)
    m = y2.shape[0]
    rest = [np.broadcast_to(np.atleast_1d(np.asarray(o, dtype=float)), (m,)) for o in others]
    return scalar, y2, yp2, rest


def _matter_terms(y:np.ndarray, mu:np.ndarray, omega:float,
                  params:PhysicalParams, model:DilatonModel) -> _MatterTerms:
    nu, phi, sigma = y[:, 0], y[:, 1], y[:, 2]
    a2 = model.coupling(phi)**2
    a4 = a2 * a2
    en = np.exp(-nu)
    s2 = sigma * sigma
    w, dw = boson_potential(s2, params.lam)
    fs = fermi_state(mu)
    v, dv = model.potential(phi)
    return _MatterTerms(
        a2=a2, alpha=model.alpha(phi), alpha_prime=model.alpha_prime(phi), en=en,
        kt=0.5 * omega**2 * a2 * en * s2, pot=a4 * w, dw=dw,
        fm=params.b * a4 * fs.f, gm=params.b * a4 * fs.g, fermi=fs,
        v=v, dv=dv, ddv=model.potential_second(phi))


def _closure(x:np.ndarray, yp:np.ndarray, mt:_MatterTerms, r_s:float, gamma:float):
    """e^λ = N / D の分子 N と分母 D"""
    p = -mt.fm + 0.5 * gamma**2 * mt.v - mt.kt - mt.pot
    num = 1.0 + x * yp[:, 0] - x * x * yp[:, 1]**2 - 0.5 * mt.a2 * x * x * yp[:, 2]**2
    den = 1.0 - r_s**2 * x * x * p
    return num, den, p


def effective_mu(x, mu) -> np.ndarray:
    """物理量の評価に使う μ (星の外と負の値は 0)"""
    return np.where(np.asarray(x) > 1.0, 0.0, np.maximum(mu, 0.0))


def _check_closure(x:np.ndarray, num:np.ndarray, den:np.ndarray):
    bad = ~((num > 0) & (den > 0))
    if np.any(bad):
        raise MetricBreakdownError(x=float(x[np.argmax(bad)]))


def stress_components(y, yp, mu, exp_lambda, pair:SpectralPair, params:PhysicalParams,
                      model:Optional[DilatonModel]=None) -> StressComponents:
    """エネルギー運動量テンソルの成分を計算する

    Parameters
    ----------
    y, yp : np.ndarray
        (ν, φ, σ) とその x 微分。形状 (3,) または (m, 3)
    mu : float | np.ndarray
        フェルミ運動量 (星の外では 0 を渡す)
    exp_lambda : float | np.ndarray
        e^λ (> 0)
    pair : SpectralPair
    params : PhysicalParams
    model : DilatonModel, optional
        省略時は `params.model`

    Returns
    -------
    StressComponents

    Raises
    ------
    FermiDomainError
        μ < 0 の場合
    """
    if model is None:
        model = get_model(params.model)
    scalar, y2, yp2, (mu, el) = _as_points(y, yp, mu, exp_lambda)
    mt = _matter_terms(y2, mu, pair.omega, params, model)
    kin = 0.5 * mt.a2 / el * (yp2[:, 2] / pair.r_s)**2
    t0_f, t1_f = mt.gm, -mt.fm
    t0_b = mt.kt + kin - mt.pot
    t1_b = -mt.kt - kin - mt.pot
    t2_b = -mt.kt + kin - mt.pot
    comps = StressComponents(
        t0_f=t0_f, t1_f=t1_f, t0_b=t0_b, t1_b=t1_b, t2_b=t2_b,
        trace_f=mt.gm - 3.0 * mt.fm,
        trace_b=-2.0 * mt.kt + 2.0 * kin - 4.0 * mt.pot,
        t1=mt.gm - mt.fm - 2.0 * mt.pot)
    if scalar:
        for name in comps.__dataclass_fields__:
            setattr(comps, name, getattr(comps, name)[0])
    return comps


def metric_lambda(x, y, yp, mu, pair:SpectralPair, params:PhysicalParams,
                  model:Optional[DilatonModel]=None):
    """G₁¹ の式を e^λ について解いた値

    Parameters
    ----------
    x : float | np.ndarray
        スケールされた動径座標 x = r / R_s
    y, yp : np.ndarray
        (ν, φ, σ) とその x 微分
    mu : float | np.ndarray
        フェルミ運動量 (負の値は 0 として扱う)

    Returns
    -------
    float | np.ndarray
        e^λ

    Raises
    ------
    MetricBreakdownError
        分子または分母が正でない場合
    """
    if model is None:
        model = get_model(params.model)
    scalar, y2, yp2, (x, mu) = _as_points(y, yp, x, mu)
    mt = _matter_terms(y2, effective_mu(x, mu), pair.omega, params, model)
    num, den, _ = _closure(x, yp2, mt, pair.r_s, params.gamma)
    _check_closure(x, num, den)
    el = num / den
    return float(el[0]) if scalar else el
