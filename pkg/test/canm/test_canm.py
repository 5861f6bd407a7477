"""canmパッケージのテスト"""
import math

import numpy as np
import pytest

from bfstar.canm import (
    CanmSettings, FieldState, SolveReport, TerminationReason, boundary_residual,
    collocation_norm, default_initial_guess, eigen_conditions, is_stagnated,
    linearized_step, mu_update, residual, solve, trial_state
)
from bfstar.diagnostics import surface_frequency
from bfstar.discretization import SplineFunction, build_grid
from bfstar.model import PhysicalParams, SpectralPair
from bfstar.status import warnings as iw



REFERENCE_PARAMS = PhysicalParams(sigma_c=0.8, mu_c=1.0, lam=0.01, gamma=1.0, b=1.0)
"""σ_c = 0.8, μ_c = 1, Λ = 0.01, γ = 1, b = 1 の基準構成"""

REFERENCE_H64 = {
    "nu_1": -1.0059342,
    "phi_1": -0.0471120,
    "sigma_1": 0.4777491,
    "r_s": 1.1608875,
    "omega": 0.8006672,
}
"""基準構成の h = 1/64 の格子での表面の値と固有値 (ν(32) = 0 とした場合の ν, Ω)"""

REFERENCE_TOL = 2e-3


@pytest.fixture
def params() -> PhysicalParams:
    return REFERENCE_PARAMS


@pytest.fixture
def initial(params) -> FieldState:
    return default_initial_guess(params, build_grid(128, 8.0))


@pytest.fixture(scope="module")
def coarse_solution():
    """X_∞ = 32, h = 1/16 の解"""
    return solve(default_initial_guess(REFERENCE_PARAMS, build_grid(512, 32.0)))


@pytest.fixture(scope="module")
def reference_solution():
    """X_∞ = 128, h = 1/16 の解"""
    return solve(default_initial_guess(REFERENCE_PARAMS, build_grid(2048, 128.0)))


def _gauge_shifted(state:FieldState, c:float) -> FieldState:
    """ν → ν + c, Ω → Ω e^{c/2} とした状態 (方程式と固有値条件は変わらない)"""
    y = state.y.copy()
    y.values[:, 0] += c
    pair = SpectralPair(state.pair.r_s, state.pair.omega * math.exp(0.5 * c))
    return FieldState.from_spline(y, pair, state.params)


def _perturbed(state:FieldState, eps:float) -> FieldState:
    bump = SplineFunction.from_function(
        state.grid,
        lambda x: np.exp(-x**2)[:, None] * np.array([1.0, 0.5, 0.25]),
        lambda x: (-2.0 * x * np.exp(-x**2))[:, None] * np.array([1.0, 0.5, 0.25]))
    return FieldState.from_spline(state.y.combine(bump, eps), state.pair.shifted(eps, eps),
                                  state.params)


class TestFieldState:
    def test_initial_guess(self, initial, params):
        # y'(0) = 0, σ(0) = σ_c
        np.testing.assert_array_equal(initial.y.moments[0], 0.0)
        assert initial.center[2] == params.sigma_c
        assert initial.center[0] == -1.0
        assert initial.pair == SpectralPair(1.0, 0.9)
        assert eigen_conditions(initial.y, params)[0] == 0.0

    def test_initial_guess_grid_mismatch(self, params):
        with pytest.raises(ValueError):
            default_initial_guess(params, build_grid(64, 8.0), x_inf=16.0)

    def test_mu_update(self, initial, params):
        mu = mu_update(initial.y, params)
        assert mu[0] == params.mu_c
        np.testing.assert_array_equal(mu[initial.grid.n_star:], 0.0)
        np.testing.assert_array_equal(mu, initial.mu)
        # 星の内部では中心から表面に向かって減少する
        inner = mu[:initial.grid.n_star]
        assert np.all(np.diff(inner) < 0)

    def test_with_params(self, initial, params):
        moved = initial.with_params(params.with_value("sigma_c", 0.4))
        assert moved.center[2] == pytest.approx(0.4)
        assert moved.params.sigma_c == 0.4
        assert moved.pair == initial.pair
        # 元の状態は変わらない
        assert initial.center[2] == 0.8

    def test_resampled(self, initial):
        wider = initial.resampled(build_grid(256, 16.0))
        inside = wider.grid.nodes <= 8.0
        np.testing.assert_allclose(wider.y.values[inside], initial.y(wider.grid.nodes[inside]),
                                   atol=1e-12)
        np.testing.assert_array_equal(wider.y.values[~inside], 0.0)
        np.testing.assert_array_equal(wider.y.moments[~inside], 0.0)

    def test_report_dict(self):
        report = SolveReport(iterations=2, residual_history=[1.0, 0.1, 1e-11],
                             tau_history=[0.5, 1.0], eigen_history=[(1.0, 0.9), (1.1, 0.8)],
                             converged=True, termination_reason=TerminationReason.CONVERGED)
        restored = SolveReport.from_dict(report.asdict())
        assert restored.termination_reason == TerminationReason.CONVERGED
        assert restored.final_residual == 1e-11
        assert restored.eigen_history == [(1.0, 0.9), (1.1, 0.8)]
        assert math.isnan(SolveReport().final_residual)


class TestResidual:
    def test_residual(self, initial):
        delta, delta_f = residual(initial)
        assert np.isfinite(delta)
        assert delta >= delta_f > 0.0

    def test_collocation_norm(self):
        # 選点の数によらない大きさ
        assert collocation_norm(np.ones((100, 3))) == pytest.approx(1.0)
        assert collocation_norm(np.full((10000, 3), 2e-12)) == pytest.approx(2e-12)

    def test_boundary_residual(self, initial):
        assert boundary_residual(initial.y) < 1e-12
        y = initial.y.copy()
        y.values[-1, 0] = -0.02
        y.moments[0, 2] = 0.005
        assert boundary_residual(y) == pytest.approx(0.02)
        broken = FieldState.from_spline(y, initial.pair, initial.params)
        assert residual(broken)[0] >= 0.02

    def test_stagnation(self):
        settings = CanmSettings(eps=1e-10, stagnation_window=3)
        assert is_stagnated([1.0, 3e-10, 2.8e-10, 2e-10, 2.5e-10], settings)
        # ε から遠い、あるいは減少している
        assert not is_stagnated([1.0, 0.9, 0.95, 0.92, 0.93], settings)
        assert not is_stagnated([1e-8, 4e-9, 1e-9, 3e-10, 1.5e-10], settings)
        assert not is_stagnated([3e-10, 2e-10, 2.5e-10], settings)
        assert not is_stagnated([1e-8, 2e-10, 2e-10, 2e-10, 2e-10],
                                CanmSettings(stagnation_window=0))


class TestIteration:
    def test_linearized_step(self, initial):
        step = linearized_step(initial)
        assert np.isfinite(step.rho) and np.isfinite(step.omega)
        assert step.determinant != 0.0
        assert step.delta == pytest.approx(residual(initial)[0])
        # τ = 1 の更新は線形化した固有値条件を満たす
        trial = trial_state(initial, step, 1.0)
        assert trial.pair.r_s == pytest.approx(initial.pair.r_s + step.rho)
        assert trial.center[2] == pytest.approx(0.8, abs=1e-10)

    def test_coupled_mu_step(self, initial):
        step = linearized_step(initial, CanmSettings(mu_coupling=True))
        assert np.isfinite(step.rho) and np.isfinite(step.omega)

    def test_max_iterations(self, initial):
        calls = []
        state, report = solve(initial, CanmSettings(max_iter=1),
                              iteration_callback=lambda *args: calls.append(args))
        assert report.converged is False
        assert report.iterations <= 1
        assert report.termination_reason in (TerminationReason.MAX_ITERATIONS,
                                             TerminationReason.DIVERGED)
        if report.termination_reason == TerminationReason.MAX_ITERATIONS:
            assert len(calls) == 1
            k, delta0, tau, delta_tau, pair = calls[0]
            assert k == 1
            assert 0.0 < tau <= 1.0
            assert report.residual_history[-1] == delta_tau

    def test_converges_on_coarse_grid(self, coarse_solution):
        state, report = coarse_solution
        assert report.converged, report.asdict()
        assert report.termination_reason == TerminationReason.CONVERGED
        assert report.iterations <= 20
        # 収束解は固有値条件と境界条件を満たす
        c_sigma, c_surface = eigen_conditions(state.y, state.params)
        assert abs(c_sigma) < 1e-5 and abs(c_surface) < 1e-5
        assert boundary_residual(state.y) < 1e-10
        assert state.mu[state.grid.n_star] == 0.0
        assert np.all(state.mu[:state.grid.n_star] > 0.0)
        assert len(report.eigen_history) == report.iterations + 1

    def test_issue_callback(self, params):
        issues = []
        solve(default_initial_guess(params, build_grid(512, 32.0)), issue_callback=issues.append)
        assert all(isinstance(w, iw.BFSWarningData) for w in issues)

    def test_boundary_violation_is_not_converged(self, coarse_solution):
        state, _ = coarse_solution
        # ν(X_∞) だけがずれた状態は、選点の残差が小さくても収束とみなさない
        shifted = _gauge_shifted(state, 0.02)
        assert residual(shifted)[1] < 1e-8
        assert residual(shifted)[0] >= 0.02

        fixed, report = solve(shifted)
        assert report.converged
        assert report.iterations >= 1
        assert abs(fixed.y.values[-1, 0]) < 1e-10
        assert fixed.pair.omega == pytest.approx(state.pair.omega, abs=1e-6)
        assert fixed.surface[0] == pytest.approx(state.surface[0], abs=1e-6)

    def test_reference_at_x32(self, coarse_solution):
        # ν(32) = 0 の基準では ν(1) と Ω も基準値と一致する
        state, _ = coarse_solution
        assert state.surface[0] == pytest.approx(REFERENCE_H64["nu_1"], abs=REFERENCE_TOL)
        assert state.pair.omega == pytest.approx(REFERENCE_H64["omega"], abs=REFERENCE_TOL)
        assert state.pair.r_s == pytest.approx(REFERENCE_H64["r_s"], abs=REFERENCE_TOL)


@pytest.mark.slow
class TestReferenceStar:
    def test_reference_values(self, reference_solution):
        state, report = reference_solution
        assert report.converged, report.asdict()
        assert report.iterations <= 20
        assert report.final_residual < 1e-10
        assert state.pair.r_s == pytest.approx(REFERENCE_H64["r_s"], abs=REFERENCE_TOL)
        assert state.surface[1] == pytest.approx(REFERENCE_H64["phi_1"], abs=REFERENCE_TOL)
        assert state.surface[2] == pytest.approx(REFERENCE_H64["sigma_1"], abs=REFERENCE_TOL)
        # ν の基準点によらない量で ν(1) と Ω を比べる
        expected = REFERENCE_H64["omega"] * math.exp(-0.5 * REFERENCE_H64["nu_1"])
        assert surface_frequency(state) == pytest.approx(expected, abs=REFERENCE_TOL)

    def test_gauge_relation(self, reference_solution, coarse_solution):
        # X_∞ = 128 の解を ν(32) = 0 に移すと X_∞ = 32 の解になる
        state, _ = reference_solution
        coarse, _ = coarse_solution
        c = -float(state.y(32.0)[0, 0])
        assert c > 0.0
        assert state.surface[0] + c == pytest.approx(coarse.surface[0], abs=1e-4)
        assert state.pair.omega * math.exp(0.5 * c) == pytest.approx(coarse.pair.omega, abs=1e-4)

    def test_coupled_mu_contraction(self, coarse_solution):
        # μ の依存を含めた線形化は収束解の近くで二次収束する
        state, _ = coarse_solution
        settings = CanmSettings(mu_coupling=True)
        after = {}
        for eps in (2e-3, 1e-3):
            perturbed = _perturbed(state, eps)
            step = linearized_step(perturbed, settings)
            after[eps] = residual(trial_state(perturbed, step, 1.0))[1]
            assert after[eps] < 0.1 * residual(perturbed)[1]
        assert after[1e-3] / after[2e-3] < 0.35

    def test_frozen_mu_contraction(self, coarse_solution):
        state, _ = coarse_solution
        perturbed = _perturbed(state, 1e-3)
        step = linearized_step(perturbed)
        assert residual(trial_state(perturbed, step, 1.0))[1] < residual(perturbed)[1]

    def test_continuation_is_cheaper(self, reference_solution):
        state, _ = reference_solution
        moved = REFERENCE_PARAMS.with_value("sigma_c", 0.75)
        _, cold = solve(default_initial_guess(moved, state.grid))
        _, warm = solve(state.with_params(moved))
        assert cold.converged and warm.converged
        assert warm.iterations < cold.iterations
