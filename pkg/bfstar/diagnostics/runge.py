"""
Runge 則による収束次数の推定

(y_h - y_{h/2}) / (y_{h/2} - y_{h/4}) = 2^p
"""
from dataclasses import dataclass
import math

from ..exceptions import OrderUndefinedError



@dataclass(frozen=True)
class RungeTriple:
    """刻み h, h/2, h/4 の格子で計算した1つの量"""
    coarse: float
    medium: float
    fine: float


def runge_order(t:RungeTriple) -> float:
    """Runge の次数 p = log2((coarse - medium) / (medium - fine))

    Raises
    ------
    OrderUndefinedError
        分母が 0、または差の比が正でない場合
    """
    num = t.coarse - t.medium
    den = t.medium - t.fine
    if den == 0.0 or not math.isfinite(num / den) or num / den <= 0.0:
        raise OrderUndefinedError(f"Runge ratio is undefined for {t}")
    return math.log2(num / den)
