"""
CANM (連続版ニュートン法) の反復

1回の反復は以下の順に行う。

1. 現在の状態で方程式を線形化し、u, v, w の3つの線形境界値問題を
   1回の LU 分解で解く
2. 固有値の補正 (ρ, ω) を 2x2 の連立方程式から求める
3. 残差 δ(0), δ(1) から τ_opt = δ(0) / (δ(0) + δ(1)) を決める
4. y ← y + τ(u + ρv + ωw), R_s ← R_s + τρ, Ω ← Ω + τω とし、μ を更新する

残差 δ は以下の最大値とする。

- δ_f : 選点での x y'' + y' - F の二乗平均平方根 (選点の数によらない大きさ)
- 2つの固有値条件の残差の2乗
- 境界条件 y'(0) = 0, y(X_∞) = 0 の残差の絶対値

Classes
-------
- `CanmSettings` : 反復の設定
- `StepResult` : 線形化ステップの結果

Functions
---------
- `collocation_norm` : 選点での残差の大きさ
- `boundary_residual` : 境界条件の残差
- `residual` : 状態の残差 δ
- `linearized_step` : 線形化ステップ
- `trial_state` : 更新後の試行状態
- `optimal_tau` : τ_opt の決定
- `solve` : 反復全体
- `is_stagnated` : 停滞の判定
"""
from dataclasses import dataclass
import time
from typing import Callable, List, Optional, Tuple

import numpy as np

from ..discretization.collocation import assemble, factor_and_solve
from ..discretization.spline import SplineFunction
from ..exceptions import (
    DegenerateEigenDirectionError, LinearSolveError, MetricBreakdownError
)
from ..model.functions import DilatonModel, get_model
from ..model.params import SpectralPair
from ..model.rhs import evaluate
from ..status import warnings as bw
from .state import (
    FieldState, SolveReport, TerminationReason, eigen_conditions, mu_from_fields
)



IterationCallback = Callable[[int, float, float, float, SpectralPair], None]
"""func(反復番号, δ(0), τ_opt, δ(τ_opt), (R_s, Ω)) -> None"""
IssueCallback = Callable[[bw.BFSWarningData], None]

DETERMINANT_RTOL = 1e-13
"""2x2 系を特異とみなす相対的な行列式の大きさ"""
STAGNATION_MARGIN = 1e3
"""δ < STAGNATION_MARGIN * eps で減少しなくなった場合に停滞とみなす"""


@dataclass(frozen=True)
class CanmSettings:
    """反復の設定"""
    eps: float = 1e-10
    """終了判定 δ(τ_opt) < eps"""
    max_iter: int = 50
    """反復回数の上限"""
    tau_min: float = 1e-3
    """τ の下限"""
    mu_coupling: bool = False
    """True の場合、μ の (ν, φ) 依存を線形化に含める (厳密なニュートン法)。
    False の場合、線形解法の間は μ を固定する。
    既定の初期近似からは、True では別の解に収束することがある"""
    stagnation_window: int = 5
    """この回数の反復で δ が半分にならなければ停滞とみなす (0 で無効)"""


@dataclass
class StepResult:
    """線形化ステップの結果"""
    u: SplineFunction
    v: SplineFunction
    w: SplineFunction
    rho: float
    """R_s の補正"""
    omega: float
    """Ω の補正"""
    delta_f: float
    """選点での方程式の残差 (二乗平均平方根)"""
    delta: float
    """δ(0)"""
    determinant: float
    """2x2 系の行列式"""

    def direction(self) -> SplineFunction:
        """u + ρv + ωw"""
        return self.u.combine(self.v, self.rho).combine(self.w, self.omega)


def _gauss_data(state:FieldState, model:DilatonModel):
    grid = state.grid
    val, d1, d2 = state.y.at_gauss_points()
    xi = grid.gauss_points.ravel()
    val, d1, d2 = val.reshape(-1, 3), d1.reshape(-1, 3), d2.reshape(-1, 3)
    mu = mu_from_fields(xi, val, state.y.values[0], state.params, model)
    return xi, val, d1, d2, mu


def collocation_norm(r:np.ndarray) -> float:
    """選点での残差の二乗平均平方根"""
    return float(np.linalg.norm(r) / np.sqrt(r.size))


def boundary_residual(y:SplineFunction) -> float:
    """境界条件 y'(0) = 0, y(X_∞) = 0 の残差の最大値"""
    return float(max(np.max(np.abs(y.moments[0])), np.max(np.abs(y.values[-1]))))


def _compose_delta(delta_f:float, y:SplineFunction, c_sigma:float, c_surface:float) -> float:
    return max(delta_f, c_sigma**2, c_surface**2, boundary_residual(y))


def residual(state:FieldState, model:Optional[DilatonModel]=None) -> Tuple[float, float]:
    """状態の残差

    Returns
    -------
    Tuple[float, float]
        (δ, δ_f)。δ_f は選点での x y'' + y' - F の二乗平均平方根、
        δ は δ_f、2つの固有値条件の残差の2乗、境界条件の残差の最大値

    Raises
    ------
    MetricBreakdownError
        e^λ が評価できない場合
    """
    if model is None:
        model = get_model(state.params.model)
    xi, val, d1, d2, mu = _gauss_data(state, model)
    F = evaluate(xi, val, d1, mu, state.pair, state.params, model, derivatives=False).F
    delta_f = collocation_norm(xi[:, None] * d2 + d1 - F)
    c_sigma, c_surface = eigen_conditions(state.y, state.params, model)
    delta = _compose_delta(delta_f, state.y, c_sigma, c_surface)
    if not np.isfinite(delta):
        raise MetricBreakdownError(message="non-finite residual")
    return delta, delta_f


def linearized_step(state:FieldState, settings:Optional[CanmSettings]=None,
                    model:Optional[DilatonModel]=None) -> StepResult:
    """線形化ステップ

    Parameters
    ----------
    state : FieldState
        現在の状態
    settings : CanmSettings, optional
    model : DilatonModel, optional

    Returns
    -------
    StepResult

    Raises
    ------
    MetricBreakdownError
        現在の状態で e^λ が評価できない場合
    LinearSolveError
        選点系が解けない場合
    DegenerateEigenDirectionError
        2x2 系が特異な場合
    """
    if settings is None:
        settings = CanmSettings()
    if model is None:
        model = get_model(state.params.model)
    params, pair, y = state.params, state.pair, state.y
    xi, val, d1, d2, mu = _gauss_data(state, model)
    ev = evaluate(xi, val, d1, mu, pair, params, model)
    blocks = ev.blocks
    r_u = xi[:, None] * d2 + d1 - ev.F

    dF_dy = blocks.dF_dy
    columns = [r_u, -blocks.dF_dR, -blocks.dF_dOmega]
    if settings.mu_coupling:
        # μ(x) = (1+μ_c)(A(φ_0)/A(φ))² e^{ν_0 - ν} - 1 の x での (ν, φ) 依存
        one_mu = 1.0 + np.maximum(mu, 0.0)
        al = model.alpha(val[:, 1])
        coupling = blocks.dF_dmu * one_mu[:, None]
        dF_dy = dF_dy.copy()
        dF_dy[:, :, 0] -= coupling
        dF_dy[:, :, 1] -= coupling * (2.0 * al)[:, None]
        # 中心値 (ν_0, φ_0) への依存は追加の右辺で解く
        columns.append(-coupling)
    rhs = np.stack(columns, axis=-1)

    k = rhs.shape[-1]
    left = np.zeros((3, k))
    right = np.zeros((3, k))
    left[:, 0] = -y.moments[0]
    right[:, 0] = -y.values[-1]
    system = assemble(state.grid, (dF_dy, blocks.dF_dyp), rhs, left, right)
    sols = factor_and_solve(system)

    alpha0 = float(model.alpha(y.values[0, 1]))
    alpha1 = float(model.alpha(y.values[state.grid.n_star, 1]))
    if settings.mu_coupling:
        q = sols.pop()
        def ell(z:SplineFunction) -> float:
            return z.values[0, 0] + 2.0 * alpha0 * z.values[0, 1]
        denom = 1.0 - ell(q)
        if denom == 0.0 or not np.isfinite(denom):
            raise LinearSolveError("singular coupling through the central values", pivot_node=0)
        sols = [z.combine(q, ell(z) / denom) for z in sols]
    u, v, w = sols

    n_s = state.grid.n_star
    def surface_lin(z:SplineFunction) -> float:
        return z.values[n_s, 0] - z.values[0, 0] \
            + 2.0 * alpha1 * z.values[n_s, 1] - 2.0 * alpha0 * z.values[0, 1]

    c_sigma, c_surface = eigen_conditions(y, params, model)
    a1, b1 = surface_lin(v), surface_lin(w)
    c1 = -c_surface - surface_lin(u)
    a2, b2 = v.values[0, 2], w.values[0, 2]
    c2 = c_sigma - u.values[0, 2]
    det = a1 * b2 - a2 * b1
    scale = abs(a1 * b2) + abs(a2 * b1)
    if det == 0.0 or not np.isfinite(det) or abs(det) <= DETERMINANT_RTOL * scale:
        raise DegenerateEigenDirectionError(float(det))
    rho = (c1 * b2 - c2 * b1) / det
    omega = (a1 * c2 - a2 * c1) / det

    delta_f = collocation_norm(r_u)
    delta = _compose_delta(delta_f, y, c_sigma, c_surface)
    return StepResult(u, v, w, float(rho), float(omega), delta_f, delta, float(det))


def trial_state(state:FieldState, step:StepResult, tau:float,
                model:Optional[DilatonModel]=None) -> FieldState:
    """y + τ(u + ρv + ωw), (R_s + τρ, Ω + τω) の状態 (μ は再計算)

    Raises
    ------
    MetricBreakdownError
        R_s が正でなくなる場合
    """
    r_s = state.pair.r_s + tau * step.rho
    omega = state.pair.omega + tau * step.omega
    if not (np.isfinite(r_s) and np.isfinite(omega)) or r_s <= 0:
        raise MetricBreakdownError(message=f"R_s is not positive after the step: {r_s}")
    y = state.y.combine(step.direction(), tau)
    return FieldState.from_spline(y, SpectralPair(r_s, omega), state.params, model)


def optimal_tau(state:FieldState, step:StepResult, settings:Optional[CanmSettings]=None,
                model:Optional[DilatonModel]=None, iteration:int=0,
                issue_callback:Optional[IssueCallback]=None) -> Tuple[float, float, FieldState]:
    """τ_opt を決め、その τ での試行状態を返す

    τ = 1 の試行状態が評価できない場合は評価できるまで τ を半分にし、
    その τ_t について τ_opt = τ_t δ(0) / (δ(0) + δ(τ_t)) とする。
    採用する状態の残差が δ(0) を超える場合は、さらに τ を半分にする。

    Returns
    -------
    Tuple[float, float, FieldState]
        (τ_opt, δ(τ_opt), 試行状態)

    Raises
    ------
    MetricBreakdownError
        τ を `tau_min` 未満まで縮めても評価できない場合
    """
    if settings is None:
        settings = CanmSettings()
    if model is None:
        model = get_model(state.params.model)
    delta0 = step.delta

    def attempt(tau:float):
        trial = trial_state(state, step, tau, model)
        return residual(trial, model)[0], trial

    tau_t = 1.0
    while True:
        try:
            d_t, trial_t = attempt(tau_t)
            break
        except MetricBreakdownError as e:
            if issue_callback is not None:
                issue_callback(bw.TrialStepBreakdown(iteration, tau_t, e.x, e))
            tau_t *= 0.5
            if tau_t < settings.tau_min:
                raise

    tau, d, trial = tau_t, d_t, trial_t
    if d_t > 0.0:
        tau_opt = tau_t * delta0 / (delta0 + d_t)
        tau_opt = min(max(tau_opt, min(settings.tau_min, tau_t)), tau_t)
        if tau_opt != tau_t:
            try:
                d, trial = attempt(tau_opt)
                tau = tau_opt
            except MetricBreakdownError:
                pass

    # 残差が増える場合は τ を半分にする
    t = tau
    while d > delta0 and t * 0.5 >= settings.tau_min:
        t *= 0.5
        try:
            d_h, trial_h = attempt(t)
        except MetricBreakdownError:
            continue
        if d_h < d:
            tau, d, trial = t, d_h, trial_h
    if d > delta0 and issue_callback is not None:
        issue_callback(bw.ResidualIncrease(iteration, delta0, d))
    return tau, d, trial


def solve(initial:FieldState, settings:Optional[CanmSettings]=None,
          model:Optional[DilatonModel]=None,
          iteration_callback:Optional[IterationCallback]=None,
          issue_callback:Optional[IssueCallback]=None) -> Tuple[FieldState, SolveReport]:
    """CANM の反復で解を求める

    Parameters
    ----------
    initial : FieldState
        初期近似 (μ は第一積分から再計算する)
    settings : CanmSettings, optional
    model : DilatonModel, optional
    iteration_callback : func(int, float, float, float, SpectralPair) -> None, optional
        各反復の後に (反復番号, δ(0), τ_opt, δ(τ_opt), (R_s, Ω)) で呼ばれる
    issue_callback : func(BFSWarningData) -> None, optional
        警告が発生した場合に呼ばれる

    Returns
    -------
    Tuple[FieldState, SolveReport]
        最後の状態とレポート。反復回数の上限と発散は例外ではなく
        `SolveReport.termination_reason` で返す

    Raises
    ------
    LinearSolveError, DegenerateEigenDirectionError
        線形化ステップが失敗した場合
    """
    if settings is None:
        settings = CanmSettings()
    if model is None:
        model = get_model(initial.params.model)
    t_start = time.perf_counter()
    state = FieldState.from_spline(initial.y, initial.pair, initial.params, model)
    report = SolveReport(eigen_history=[(state.pair.r_s, state.pair.omega)])

    def finish(reason:TerminationReason):
        report.termination_reason = reason
        report.converged = reason == TerminationReason.CONVERGED
        report.wall_time = time.perf_counter() - t_start
        if report.converged:
            _check_fermi_momentum(state, issue_callback)
        return state, report

    try:
        delta, _ = residual(state, model)
    except MetricBreakdownError:
        return finish(TerminationReason.DIVERGED)
    report.residual_history.append(delta)
    if delta < settings.eps:
        return finish(TerminationReason.CONVERGED)

    for k in range(1, settings.max_iter + 1):
        step = linearized_step(state, settings, model)
        try:
            tau, delta_tau, state_next = optimal_tau(state, step, settings, model, k, issue_callback)
        except MetricBreakdownError:
            return finish(TerminationReason.DIVERGED)
        state = state_next
        report.iterations = k
        report.residual_history.append(delta_tau)
        report.tau_history.append(tau)
        report.eigen_history.append((state.pair.r_s, state.pair.omega))
        if iteration_callback is not None:
            iteration_callback(k, step.delta, tau, delta_tau, state.pair)
        if delta_tau < settings.eps:
            return finish(TerminationReason.CONVERGED)
        if is_stagnated(report.residual_history, settings):
            return finish(TerminationReason.STAGNATED)
    return finish(TerminationReason.MAX_ITERATIONS)


def is_stagnated(history:List[float], settings:CanmSettings) -> bool:
    """直近 `stagnation_window` 回の δ が ε の近くで半分にならなかったか

    Parameters
    ----------
    history : List[float]
        `SolveReport.residual_history`
    """
    window = settings.stagnation_window
    if window <= 0 or len(history) <= window:
        return False
    # 丸め誤差の水準で δ が下がらなくなった状態
    recent = history[-window:]
    return max(recent) < STAGNATION_MARGIN * settings.eps \
        and min(recent) > 0.5 * history[-window - 1]


def _check_fermi_momentum(state:FieldState, issue_callback:Optional[IssueCallback]):
    inner = state.mu[1:state.grid.n_star]
    negative = inner[inner < 0]
    if negative.size and issue_callback is not None:
        issue_callback(bw.NegativeFermiMomentum(int(negative.size), float(negative.min())))
