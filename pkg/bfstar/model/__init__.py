"""
物理モデル (結合関数・ポテンシャル・状態方程式・右辺とその微分)

Modules
-------
- `params` : パラメータのデータクラス
- `functions` : A(φ), V(φ), W(σ²)
- `fermi` : フェルミ気体の f(μ), g(μ)
- `stress` : テンソル成分と e^λ
- `rhs` : 右辺 F と Fréchet 微分
"""
from .params import PhysicalParams, SpectralPair, field_vector, SWEEPABLE_PARAMETERS
from .functions import (
    DilatonModel, ExponentialDilaton, MODEL_REGISTRY, get_model,
    coupling_A, alpha, dilaton_potential, boson_potential
)
from .fermi import fermi_state, FermiState
from .stress import StressComponents, stress_components, metric_lambda, effective_mu
from .rhs import FrechetBlocks, evaluate, rhs_F, frechet_derivatives, center_second_derivative
