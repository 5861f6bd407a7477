"""
既定の初期近似

ν₀ = ν_c e^{-x²}, φ₀ = a e^{-x²}, σ₀ = σ_c e^{-x²}
"""
from typing import Optional

import numpy as np

from ..discretization.mesh import Grid
from ..discretization.spline import SplineFunction
from ..model.functions import get_model
from ..model.params import PhysicalParams, SpectralPair
from .state import FieldState



DEFAULT_NU_C = -1.0
DEFAULT_PHI_AMPLITUDE = -0.05
DEFAULT_R_S = 1.0
DEFAULT_OMEGA = 0.9


def default_initial_guess(params:PhysicalParams, grid:Grid,
                          nu_c:float=DEFAULT_NU_C, phi_amplitude:float=DEFAULT_PHI_AMPLITUDE,
                          r_s:float=DEFAULT_R_S, omega:float=DEFAULT_OMEGA,
                          x_inf:Optional[float]=None) -> FieldState:
    """ガウス型の初期近似を作る

    Parameters
    ----------
    params : PhysicalParams
    grid : Grid
    nu_c, phi_amplitude : float
        ν, φ の中心値
    r_s, omega : float
        (R_s, Ω) の初期値
    x_inf : float, optional
        指定する場合は `grid.x_inf` と一致しなければならない

    Returns
    -------
    FieldState
        y'(0) = 0, σ(0) = σ_c を満たす状態 (μ は第一積分から計算)
    """
    if x_inf is not None and x_inf != grid.x_inf:
        raise ValueError(f"x_inf ({x_inf}) does not match the grid ({grid.x_inf})")
    amp = np.array([nu_c, phi_amplitude, params.sigma_c])
    y = SplineFunction.from_function(
        grid,
        lambda x: np.exp(-x * x)[:, None] * amp,
        lambda x: (-2.0 * x * np.exp(-x * x))[:, None] * amp)
    return FieldState.from_spline(y, SpectralPair(r_s, omega), params, get_model(params.model))
