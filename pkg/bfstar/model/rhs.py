"""
スケールされた右辺 F とその Fréchet 微分

方程式系は x y'' + y' = F(x, y, y'; R_s, Ω, μ) の形に書かれる。
F は動径座標の式に r = R_s x を代入して R_s² x を掛けたもので、
x = 0 では正則な状態 (y'(0) = 0) に対して 0 になる。

Classes
-------
- `FrechetBlocks` : F の微分をまとめたもの

Functions
---------
- `rhs_F` : 右辺 F
- `frechet_derivatives` : ∂F/∂y, ∂F/∂y', dF/dR_s, ∂F/∂Ω, ∂F/∂μ
- `evaluate` : F と微分を一度に評価 (選点での組み立て用)
- `center_second_derivative` : 中心での y''
"""
from typing import NamedTuple, Optional

import numpy as np

from .functions import DilatonModel, get_model
from .params import PhysicalParams, SpectralPair
from .stress import _as_points, _check_closure, _closure, _matter_terms, effective_mu



class FrechetBlocks(NamedTuple):
    """F の微分 (μ は固定)"""
    dF_dy: np.ndarray
    """形状 (m, 3, 3)、[点, 式, 成分]"""
    dF_dyp: np.ndarray
    """形状 (m, 3, 3)"""
    dF_dR: np.ndarray
    """x 座標系での全微分 dF/dR_s, 形状 (m, 3)"""
    dF_dOmega: np.ndarray
    """形状 (m, 3)"""
    dF_dmu: np.ndarray
    """形状 (m, 3)。星の外と μ <= 0 では 0"""


def _sources(mt, sigma, omega, gamma):
    """源泉項 S と K, Q (e^λ と r 依存を除いた部分)"""
    g2 = gamma * gamma
    kk = mt.gm - mt.fm - 2.0 * mt.pot + g2 * mt.v
    q = mt.gm - 3.0 * mt.fm - 2.0 * mt.kt - 4.0 * mt.pot
    s = np.stack([
        mt.gm + 3.0 * mt.fm + 4.0 * mt.kt + 2.0 * mt.pot - g2 * mt.v,
        0.5 * mt.alpha * q + 0.25 * g2 * mt.dv,
        -2.0 * mt.a2 * mt.dw * sigma - omega**2 * mt.en * sigma,
    ], axis=-1)
    return s, kk, q


class Evaluation(NamedTuple):
    F: np.ndarray
    exp_lambda: np.ndarray
    blocks: Optional[FrechetBlocks]


def evaluate(x, y, yp, mu, pair:SpectralPair, params:PhysicalParams,
             model:Optional[DilatonModel]=None, derivatives:bool=True) -> Evaluation:
    """F (と微分) を評価点ごとに計算する

    Parameters
    ----------
    x : np.ndarray
        形状 (m,)
    y, yp : np.ndarray
        形状 (m, 3)
    mu : np.ndarray
        形状 (m,)。生の値を渡してよい (負値と x > 1 は 0 として扱う)
    derivatives : bool
        False の場合 `blocks` は None

    Raises
    ------
    MetricBreakdownError
        e^λ の閉じた式が正にならない場合
    """
    if model is None:
        model = get_model(params.model)
    _, y, p, (x, mu_raw) = _as_points(y, yp, x, mu)
    mu = effective_mu(x, mu_raw)
    r_s, omega, gamma = pair.r_s, pair.omega, params.gamma
    r2 = r_s * r_s
    g2 = gamma * gamma
    sigma = y[:, 2]
    mt = _matter_terms(y, mu, omega, params, model)
    al, a2 = mt.alpha, mt.a2
    num, den, pres = _closure(x, p, mt, r_s, gamma)
    _check_closure(x, num, den)
    lam = num / den

    s, kk, q = _sources(mt, sigma, omega, gamma)
    xc = x[:, None]
    g = -p + r2 * xc * s + 0.5 * r2 * xc * xc * p * kk[:, None]
    extra = np.zeros_like(g)
    extra[:, 1] = 0.5 * al * a2 * x * p[:, 2]**2
    extra[:, 2] = -2.0 * al * x * p[:, 1] * p[:, 2]
    F = lam[:, None] * g + extra
    if not derivatives:
        return Evaluation(F, lam, None)

    m = x.shape[0]
    zero = np.zeros(m)
    # 物質項の y 微分 (列: ν, φ, σ)
    kt_y = np.stack([-mt.kt, 2.0 * al * mt.kt, omega**2 * a2 * mt.en * sigma], axis=-1)
    pot_y = np.stack([zero, 4.0 * al * mt.pot, 2.0 * sigma * a2 * a2 * mt.dw], axis=-1)
    fm_y = np.stack([zero, 4.0 * al * mt.fm, zero], axis=-1)
    gm_y = np.stack([zero, 4.0 * al * mt.gm, zero], axis=-1)
    v_y = np.stack([zero, mt.dv, zero], axis=-1)
    dv_y = np.stack([zero, mt.ddv, zero], axis=-1)
    al_y = np.stack([zero, mt.alpha_prime, zero], axis=-1)
    dw2 = -0.5 * params.lam

    p_y = -fm_y + 0.5 * g2 * v_y - kt_y - pot_y
    k_y = gm_y - fm_y - 2.0 * pot_y + g2 * v_y
    q_y = gm_y - 3.0 * fm_y - 2.0 * kt_y - 4.0 * pot_y
    s_y = np.stack([
        gm_y + 3.0 * fm_y + 4.0 * kt_y + 2.0 * pot_y - g2 * v_y,
        0.5 * al[:, None] * q_y + 0.5 * q[:, None] * al_y + 0.25 * g2 * dv_y,
        np.stack([omega**2 * mt.en * sigma,
                  -4.0 * al * a2 * mt.dw * sigma,
                  -2.0 * a2 * (mt.dw + 2.0 * sigma * sigma * dw2) - omega**2 * mt.en], axis=-1),
    ], axis=1)

    n_y = np.stack([zero, -al * a2 * x * x * p[:, 2]**2, zero], axis=-1)
    d_y = -r2 * (x * x)[:, None] * p_y
    lam_y = (n_y - lam[:, None] * d_y) / den[:, None]
    g_y = r2 * x[:, None, None] * s_y + 0.5 * r2 * (x * x)[:, None, None] * p[:, :, None] * k_y[:, None, :]
    extra_y = np.zeros((m, 3, 3))
    extra_y[:, 1, 1] = 0.5 * (mt.alpha_prime * a2 + 2.0 * al * al * a2) * x * p[:, 2]**2
    extra_y[:, 2, 1] = -2.0 * mt.alpha_prime * x * p[:, 1] * p[:, 2]
    dF_dy = g[:, :, None] * lam_y[:, None, :] + lam[:, None, None] * g_y + extra_y

    n_p = np.stack([x, -2.0 * x * x * p[:, 1], -a2 * x * x * p[:, 2]], axis=-1)
    lam_p = n_p / den[:, None]
    eye = np.eye(3)
    g_p = (-1.0 + 0.5 * r2 * x * x * kk)[:, None, None] * eye
    extra_p = np.zeros((m, 3, 3))
    extra_p[:, 1, 2] = al * a2 * x * p[:, 2]
    extra_p[:, 2, 1] = -2.0 * al * x * p[:, 2]
    extra_p[:, 2, 2] = -2.0 * al * x * p[:, 1]
    dF_dyp = g[:, :, None] * lam_p[:, None, :] + lam[:, None, None] * g_p + extra_p

    d_r = -2.0 * r_s * x * x * pres
    lam_r = -lam * d_r / den
    g_r = 2.0 * r_s * xc * s + r_s * xc * xc * p * kk[:, None]
    dF_dR = lam_r[:, None] * g + lam[:, None] * g_r

    kt_o = omega * a2 * mt.en * sigma * sigma
    d_o = r2 * x * x * kt_o
    lam_o = -lam * d_o / den
    s_o = np.stack([4.0 * kt_o, -al * kt_o, -2.0 * omega * mt.en * sigma], axis=-1)
    dF_dOmega = lam_o[:, None] * g + lam[:, None] * r2 * xc * s_o

    active = (mu_raw > 0) & (x < 1.0)
    a4b = params.b * a2 * a2
    fm_m = np.where(active, a4b * mt.fermi.df, 0.0)
    gm_m = np.where(active, a4b * mt.fermi.dg, 0.0)
    d_m = r2 * x * x * fm_m
    lam_m = -lam * d_m / den
    s_m = np.stack([gm_m + 3.0 * fm_m, 0.5 * al * (gm_m - 3.0 * fm_m), zero], axis=-1)
    dF_dmu = lam_m[:, None] * g \
        + lam[:, None] * (r2 * xc * s_m + 0.5 * r2 * xc * xc * p * (gm_m - fm_m)[:, None])

    return Evaluation(F, lam, FrechetBlocks(dF_dy, dF_dyp, dF_dR, dF_dOmega, dF_dmu))


def rhs_F(x, y, yp, mu, pair:SpectralPair, params:PhysicalParams,
          model:Optional[DilatonModel]=None) -> np.ndarray:
    """右辺 F を計算する

    Parameters
    ----------
    x : float | np.ndarray
        スケールされた動径座標
    y, yp : np.ndarray
        (ν, φ, σ) とその x 微分。形状 (3,) または (m, 3)
    mu : float | np.ndarray
        フェルミ運動量 (x > 1 では 0 として扱う)

    Returns
    -------
    np.ndarray
        形状 (3,) または (m, 3)
    """
    scalar = np.asarray(y).ndim == 1
    F = evaluate(x, y, yp, mu, pair, params, model, derivatives=False).F
    return F[0] if scalar else F


def frechet_derivatives(x, y, yp, mu, pair:SpectralPair, params:PhysicalParams,
                        model:Optional[DilatonModel]=None) -> FrechetBlocks:
    """μ を固定した F の微分を計算する

    e^λ の (y, y', R_s, Ω) 依存は連鎖律で含まれる。
    入力が1点 (y の形状が (3,)) の場合は先頭の軸を落として返す。
    """
    scalar = np.asarray(y).ndim == 1
    blocks = evaluate(x, y, yp, mu, pair, params, model).blocks
    if scalar:
        return FrechetBlocks(*(b[0] for b in blocks))
    return blocks


def center_second_derivative(y0, pair:SpectralPair, params:PhysicalParams,
                             model:Optional[DilatonModel]=None) -> np.ndarray:
    """正則な中心での y''(0) = R_s² S(0) / 3

    Parameters
    ----------
    y0 : np.ndarray
        x = 0 での (ν, φ, σ)。μ は μ_c とする
    """
    if model is None:
        model = get_model(params.model)
    y0 = np.atleast_2d(np.asarray(y0, dtype=float))
    mt = _matter_terms(y0, np.array([params.mu_c]), pair.omega, params, model)
    s, _, _ = _sources(mt, y0[:, 2], pair.omega, params.gamma)
    return pair.r_s**2 * s[0] / 3.0
