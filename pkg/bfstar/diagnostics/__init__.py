"""
検証用の診断

Modules
-------
- `runge` : Runge 則による次数
- `farfield` : ν'(X_∞) の減衰則と質量の推定
- `first_integral` : 第一積分の残差とボソンのエネルギー
- `shooting` : 初期値問題としての積分との比較
- `jacobian_audit` : Fréchet 微分と差分の比較
- `refinement` : 格子を細かくしたときの変化
"""
from .runge import RungeTriple, runge_order
from .farfield import FarfieldSample, FarfieldReport, farfield_decay
from .first_integral import (
    first_integral_residual, surface_residual, boson_energy, surface_frequency
)
from .shooting import ShootingResult, shoot, shooting_deviation
from .jacobian_audit import JacobianAuditReport, finite_difference_blocks, jacobian_audit
from .refinement import profile_relative_change, shared_node_indices
