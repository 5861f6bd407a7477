"""
フェルミ気体の状態関数 f(μ), g(μ)

Functions
---------
- `fermi_state` : (f, g, f', f+g, g') を返す
"""
from typing import NamedTuple

import numpy as np

from ..exceptions import FermiDomainError



class FermiState(NamedTuple):
    """フェルミ気体の状態関数の値"""
    f: np.ndarray
    """圧力に対応する f(μ)"""
    g: np.ndarray
    """エネルギー密度に対応する g(μ)"""
    df: np.ndarray
    """f'(μ) = μ² / (2√(μ(1+μ)))"""
    f_plus_g: np.ndarray
    """f + g = μ√(μ(1+μ))"""
    dg: np.ndarray
    """g'(μ) = 3√(μ(1+μ)) / 2"""


def fermi_state(mu) -> FermiState:
    """フェルミ気体の状態関数を評価する

    Parameters
    ----------
    mu : float | np.ndarray
        フェルミ運動量 (>= 0)

    Returns
    -------
    FermiState
        各要素は `mu` と同じ形状

    Raises
    ------
    FermiDomainError
        負の μ が含まれる場合
    """
    mu = np.asarray(mu, dtype=float)
    if np.any(mu < 0) or not np.all(np.isfinite(mu)):
        raise FermiDomainError(f"Fermi momentum must be finite and non-negative: min={np.min(mu)}")
    s = np.sqrt(mu * (1.0 + mu))
    ash = np.arcsinh(np.sqrt(mu))
    f = ((2.0 * mu - 3.0) * s + 3.0 * ash) / 8.0
    g = ((6.0 * mu + 3.0) * s - 3.0 * ash) / 8.0
    with np.errstate(divide="ignore", invalid="ignore"):
        df = np.where(s > 0, mu * mu / (2.0 * np.where(s > 0, s, 1.0)), 0.0)
    # 小さい μ では打ち消し誤差のため級数で置き換える
    small = mu < 1e-4
    if np.any(small):
        f = np.where(small, 0.2 * mu**2.5 - mu**3.5 / 14.0, f)
        g = np.where(small, mu**1.5 + 0.3 * mu**2.5, g)
    return FermiState(f, g, df, mu * s, 1.5 * s)
