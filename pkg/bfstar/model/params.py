"""
物理パラメータとスペクトル対

Classes
-------
- `PhysicalParams` : 5つの無次元パラメータ (σ_c, μ_c, Λ, γ, b) とモデル関数の選択
- `SpectralPair` : 固有値として扱う (R_s, Ω) の組

Functions
---------
- `field_vector` : (ν, φ, σ) を並べた3成分ベクトルを生成
"""
from dataclasses import dataclass, replace, asdict
import math

import numpy as np



SWEEPABLE_PARAMETERS = ("sigma_c", "mu_c", "lambda", "gamma", "b")
"""掃引可能なパラメータ名 (設定ファイル・CLI での名前)"""


@dataclass(frozen=True)
class PhysicalParams:
    """星の構造を決める無次元パラメータ

    Notes
    -----
    - `lam` は Λ (`lambda` は予約語のため)
    - 設定ファイル・CLI 上の名前は `SWEEPABLE_PARAMETERS` を参照
    """
    sigma_c: float
    """中心でのボソン密度 σ_c (>= 0)"""
    mu_c: float
    """中心でのフェルミ運動量 μ_c (> 0)"""
    lam: float = 0.0
    """ボソンの自己結合 Λ (>= 0)"""
    gamma: float = 1.0
    """ディラトンとボソンの質量比 γ = m_D / m_B (>= 0)"""
    b: float = 1.0
    """フェルミオンのスケール b = κ_* ε̃_0 / m_B² (> 0)"""
    model: str = "exponential"
    """モデル関数 A(φ), V(φ) の名前 (`bfstar.model.functions.MODEL_REGISTRY`)"""

    def __post_init__(self):
        for name in ("sigma_c", "mu_c", "lam", "gamma", "b"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.mu_c <= 0:
            raise ValueError("mu_c must be positive (a fermionic surface must exist)")
        if self.sigma_c < 0:
            raise ValueError("sigma_c must be non-negative")
        if self.lam < 0 or self.gamma < 0:
            raise ValueError("lambda and gamma must be non-negative")
        if self.b <= 0:
            raise ValueError("b must be positive")

    def get(self, name:str) -> float:
        """設定ファイル上の名前でパラメータを取得する"""
        return getattr(self, "lam" if name == "lambda" else name)

    def with_value(self, name:str, value:float) -> "PhysicalParams":
        """設定ファイル上の名前で1つのパラメータを置き換えた新しいインスタンスを返す"""
        if name not in SWEEPABLE_PARAMETERS:
            raise KeyError(f"unknown parameter: {name}")
        return replace(self, **{"lam" if name == "lambda" else name: float(value)})

    def asdict(self) -> dict:
        """辞書形式で取得"""
        return asdict(self)


@dataclass(frozen=True)
class SpectralPair:
    """固有値の組 (R_s, Ω)"""
    r_s: float
    """星の半径 R_s (> 0)"""
    omega: float
    """ボソン場の振動数 Ω"""

    def __post_init__(self):
        if not (math.isfinite(self.r_s) and math.isfinite(self.omega)):
            raise ValueError("spectral pair must be finite")
        if self.r_s <= 0:
            raise ValueError("r_s must be positive")

    def shifted(self, d_r_s:float, d_omega:float) -> "SpectralPair":
        """(R_s + d_r_s, Ω + d_omega) を返す"""
        return SpectralPair(self.r_s + d_r_s, self.omega + d_omega)


def field_vector(nu, phi, sigma) -> np.ndarray:
    """(ν, φ, σ) を最後の軸に並べた配列を返す

    Parameters
    ----------
    nu, phi, sigma : float | np.ndarray
        同じ形状 (またはブロードキャスト可能) の値

    Returns
    -------
    np.ndarray
        形状 (..., 3) の配列
    """
    nu, phi, sigma = np.broadcast_arrays(np.asarray(nu, dtype=float),
                                         np.asarray(phi, dtype=float),
                                         np.asarray(sigma, dtype=float))
    return np.stack([nu, phi, sigma], axis=-1)
