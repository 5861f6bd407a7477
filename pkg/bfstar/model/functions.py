"""
ディラトンの結合関数・ポテンシャルとボソンのポテンシャル

Classes
-------
- `DilatonModel` : 結合関数 A(φ) とポテンシャル V(φ) の抽象基底クラス
- `ExponentialDilaton` : A(φ) = exp(φ/√3), V(φ) = (1 - A⁻¹)² のモデル

Functions
---------
- `get_model` : 名前からモデルを取得
- `coupling_A` : 既定モデルの A(φ)
- `alpha` : 既定モデルの α(φ) = d ln A / dφ
- `dilaton_potential` : 既定モデルの (V, V')
- `boson_potential` : (W, W') (W' = dW/d(σ²))

Notes
-----
いずれの関数も numpy 配列を受け付け、要素ごとに評価する。
"""
from abc import ABCMeta, abstractmethod
import math
from typing import Dict, Tuple, Type

import numpy as np



class DilatonModel(metaclass=ABCMeta):
    """A(φ), V(φ) を与えるモデルの基底クラス

    Notes
    -----
    - `name` クラス属性が `MODEL_REGISTRY` のキーになる
    - 導関数はすべて φ についての微分
    """
    name: str = ""

    @abstractmethod
    def coupling(self, phi):
        """A(φ)"""
        raise NotImplementedError()

    @abstractmethod
    def alpha(self, phi):
        """α(φ) = d ln A / dφ"""
        raise NotImplementedError()

    @abstractmethod
    def alpha_prime(self, phi):
        """dα/dφ"""
        raise NotImplementedError()

    @abstractmethod
    def potential(self, phi) -> Tuple[np.ndarray, np.ndarray]:
        """(V, V')"""
        raise NotImplementedError()

    @abstractmethod
    def potential_second(self, phi):
        """V''"""
        raise NotImplementedError()


class ExponentialDilaton(DilatonModel):
    """A(φ) = exp(φ/√3), V(φ) = (1 - e^{-φ/√3})²"""
    name = "exponential"

    _K = 1.0 / math.sqrt(3.0)

    def coupling(self, phi):
        return np.exp(self._K * np.asarray(phi, dtype=float))

    def alpha(self, phi):
        return np.full_like(np.asarray(phi, dtype=float), self._K)

    def alpha_prime(self, phi):
        return np.zeros_like(np.asarray(phi, dtype=float))

    def potential(self, phi):
        e = np.exp(-self._K * np.asarray(phi, dtype=float))
        return (1.0 - e)**2, 2.0 * self._K * (1.0 - e) * e

    def potential_second(self, phi):
        e = np.exp(-self._K * np.asarray(phi, dtype=float))
        return 2.0 * self._K**2 * (2.0 * e * e - e)


MODEL_REGISTRY: Dict[str, Type[DilatonModel]] = {
    ExponentialDilaton.name: ExponentialDilaton,
}
"""モデル名とクラスの対応"""


def get_model(name:str="exponential") -> DilatonModel:
    """名前からモデルのインスタンスを取得する

    Raises
    ------
    KeyError
        未登録の名前が指定された場合
    """
    try:
        return MODEL_REGISTRY[name]()
    except KeyError:
        raise KeyError(f"unknown dilaton model: {name}") from None


_DEFAULT = ExponentialDilaton()


def coupling_A(phi):
    """既定モデルの A(φ) = exp(φ/√3)"""
    return _DEFAULT.coupling(phi)


def alpha(phi):
    """既定モデルの α(φ) = 1/√3"""
    return _DEFAULT.alpha(phi)


def dilaton_potential(phi):
    """既定モデルの (V(φ), V'(φ))"""
    return _DEFAULT.potential(phi)


def boson_potential(sigma_sq, lam:float):
    """ボソンのポテンシャル

    Parameters
    ----------
    sigma_sq : float | np.ndarray
        σ² (>= 0)
    lam : float
        自己結合 Λ

    Returns
    -------
    Tuple
        (W, W'), W = -(σ² + Λσ⁴/2)/2, W' = dW/d(σ²) = -(1 + Λσ²)/2
    """
    s2 = np.asarray(sigma_sq, dtype=float)
    if np.any(s2 < 0):
        raise ValueError("sigma_sq must be non-negative")
    return -0.5 * (s2 + 0.5 * lam * s2 * s2), -0.5 * (1.0 + lam * s2)
