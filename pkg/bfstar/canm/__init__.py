"""
CANM (連続版ニュートン法) による非線形固有値問題の反復解法

Modules
-------
- `state` : 状態・レポート・μ の更新
- `iteration` : 線形化ステップ・τ_opt・反復全体
- `initial_guess` : 既定の初期近似
"""
from .state import (
    FieldState, SolveReport, TerminationReason, mu_update, mu_from_fields, eigen_conditions
)
from .iteration import (
    CanmSettings, StepResult, collocation_norm, boundary_residual, residual,
    linearized_step, trial_state, optimal_tau, solve, is_stagnated
)
from .initial_guess import default_initial_guess
