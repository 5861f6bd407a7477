"""discretizationパッケージのテスト"""
import math

import numpy as np
import pytest

from bfstar.discretization import (
    Grid, GAUSS_THETA, SplineFunction, assemble, build_grid, factor_and_solve, spline_eval
)
from bfstar.exceptions import InvalidDomainError, OutOfRangeError



class TestGrid:
    def test_uniform(self):
        grid = build_grid(16, 4.0)
        assert grid.n == 16
        assert grid.n_star == 4
        assert grid.nodes[grid.n_star] == 1.0
        assert grid.x_inf == 4.0
        np.testing.assert_allclose(grid.steps, 0.25)

    def test_uniform_table_grid(self):
        # h = 1/16
        grid = build_grid(2048, 128.0)
        assert grid.n_star == 16
        np.testing.assert_allclose(grid.steps, 1.0 / 16.0)

    def test_condensed(self):
        grid = build_grid(64, 20.0, "condensed", 2.0)
        assert grid.nodes[0] == 0.0
        assert grid.nodes[grid.n_star] == 1.0
        assert grid.x_inf == 20.0
        assert np.all(grid.steps > 0)
        # 中心と表面の近くに節点が集まり、外側では刻みが伸びる
        assert grid.steps[grid.n_star - 1] < grid.steps[grid.n_star // 2]
        assert grid.steps[0] < grid.steps[grid.n_star // 2]
        assert grid.steps[grid.n_star] < grid.steps[-1]

    def test_gauss_points(self):
        grid = build_grid(8, 2.0)
        np.testing.assert_allclose(grid.gauss_points[:, 0],
                                   grid.nodes[:-1] + GAUSS_THETA[0] * grid.steps)
        assert np.all(grid.gauss_points[:, 1] < grid.nodes[1:])

    def test_nested(self):
        coarse = build_grid(16, 4.0)
        fine = build_grid(32, 4.0)
        assert fine.contains_nested(coarse)
        assert not coarse.contains_nested(fine)

    @pytest.mark.parametrize("args", [
        (16, 1.0), (16, math.inf), (1, 4.0), (16, 4.0, "geometric"), (16, 4.0, "condensed", 0.0),
    ])
    def test_invalid(self, args):
        with pytest.raises(InvalidDomainError):
            build_grid(*args)

    def test_grid_without_surface_node(self):
        with pytest.raises(InvalidDomainError):
            Grid(np.array([0.0, 0.5, 1.5, 2.0]), 1)


class TestSpline:
    @pytest.fixture
    def cubic(self) -> SplineFunction:
        grid = build_grid(12, 3.0)
        return SplineFunction.from_function(grid, lambda x: x**3 - 2.0 * x,
                                            lambda x: 3.0 * x**2 - 2.0)

    def test_reproduces_cubic(self, cubic):
        x = np.array([0.0, 0.13, 0.99, 1.0, 2.41, 3.0])
        val, d1, d2 = cubic.evaluate(x)
        np.testing.assert_allclose(val[:, 0], x**3 - 2.0 * x, atol=1e-12)
        np.testing.assert_allclose(d1[:, 0], 3.0 * x**2 - 2.0, atol=1e-11)
        np.testing.assert_allclose(d2[:, 0], 6.0 * x, atol=1e-9)

    def test_gauss_point_values(self, cubic):
        val, d1, d2 = cubic.at_gauss_points()
        xi = cubic.grid.gauss_points
        assert val.shape == (12, 2, 1)
        np.testing.assert_allclose(val[..., 0], xi**3 - 2.0 * xi, atol=1e-12)
        np.testing.assert_allclose(d2[..., 0], 6.0 * xi, atol=1e-9)

    def test_nodal_hits(self, cubic):
        val, d1, _ = spline_eval(cubic, 1.0)
        assert val[0] == cubic.values[cubic.grid.n_star, 0]
        assert d1[0] == pytest.approx(cubic.moments[cubic.grid.n_star, 0])

    def test_out_of_range(self, cubic):
        with pytest.raises(OutOfRangeError):
            cubic.evaluate([-0.1])
        with pytest.raises(OutOfRangeError):
            cubic.evaluate([3.5])

    def test_vector_layout(self, cubic):
        z = cubic.to_vector()
        assert z[0] == cubic.values[0, 0]
        assert z[1] == cubic.moments[0, 0]
        back = SplineFunction.from_vector(cubic.grid, z, k=1)
        np.testing.assert_array_equal(back.values, cubic.values)

    def test_combine(self, cubic):
        twice = cubic.combine(cubic, 1.0)
        np.testing.assert_allclose(twice.values, 2.0 * cubic.values)
        other = SplineFunction.zeros(build_grid(24, 3.0), k=1)
        with pytest.raises(ValueError):
            cubic.combine(other)


def _manufactured_error(n:int) -> float:
    """-x z'' - z' = (1 - x) e^{-x}, z'(0) = -1, z(4) = e^{-4} の節点での最大誤差"""
    grid = build_grid(n, 4.0)
    zeros = lambda x: (np.zeros((len(x), 3, 3)), np.zeros((len(x), 3, 3)))
    rhs = lambda x: np.repeat(((1.0 - x) * np.exp(-x))[:, None], 3, axis=1)
    system = assemble(grid, zeros, rhs, -np.ones(3), np.full(3, math.exp(-4.0)))
    z, = factor_and_solve(system)
    return float(np.max(np.abs(z.values - np.exp(-grid.nodes)[:, None])))


class TestCollocation:
    def test_manufactured_order(self):
        errors = [_manufactured_error(n) for n in (16, 32, 64)]
        for coarse, fine in zip(errors[:-1], errors[1:]):
            assert 3.5 <= math.log2(coarse / fine) <= 4.5

    def test_single_factorization(self):
        grid = build_grid(16, 4.0)
        coeff = (np.zeros((16, 2, 3, 3)), np.zeros((16, 2, 3, 3)))
        rhs = np.random.default_rng(0).normal(size=(16, 2, 3, 3))
        system = assemble(grid, coeff, rhs, np.zeros((3, 3)), np.zeros((3, 3)))
        solutions = factor_and_solve(system)
        assert len(solutions) == 3
        assert system.factorization_count == 1
        # 解を行列に掛けると右辺に戻る
        z = np.stack([s.to_vector() for s in solutions], axis=1)
        np.testing.assert_allclose(system.matvec(z), system.rhs, atol=1e-10)
        # 2回目の solve では分解しない
        system.solve()
        assert system.factorization_count == 1

    def test_banded_shape(self):
        grid = build_grid(8, 2.0)
        coeff = (np.zeros((8, 2, 3, 3)), np.zeros((8, 2, 3, 3)))
        system = assemble(grid, coeff, np.zeros((8, 2, 3)), np.zeros(3), np.zeros(3))
        assert system.size == 54
        assert system.banded().shape == (25, 54)
