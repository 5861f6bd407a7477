"""
Piecewise Hermite cubics on a `Grid`.

A spline is stored as nodal values U_i and first moments M_i (the derivative at
node i).  On subinterval i with θ = (x - x_i) / h_i,

    U(x) = ψ₁(θ) U_i + h_i ψ₂(θ) M_i + ψ₃(θ) U_{i+1} + h_i ψ₄(θ) M_{i+1}

Classes
-------
- `SplineFunction` : vector-valued C¹ cubic spline

Functions
---------
- `hermite_weights` : basis weights for value, first and second derivative
- `spline_eval` : evaluate a spline (value, first and second derivative)
"""
from dataclasses import dataclass
from typing import Callable, Tuple

import numpy as np

from ..exceptions import OutOfRangeError
from .mesh import Grid, GAUSS_THETA



def hermite_weights(theta, h) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Weights of (U_i, M_i, U_{i+1}, M_{i+1}) at relative coordinate `theta`.

    Parameters
    ----------
    theta : array_like
        Relative coordinate(s) in [0, 1]
    h : array_like
        Step(s), broadcast against `theta`

    Returns
    -------
    tuple of ndarray
        Weights for the value, the first and the second derivative,
        each with a trailing axis of length 4.
    """
    t = np.asarray(theta, dtype=float)
    h = np.asarray(h, dtype=float)
    t, h = np.broadcast_arrays(t, h)
    t2, t3 = t * t, t * t * t
    w0 = np.stack([1.0 - 3.0 * t2 + 2.0 * t3, h * (t - 2.0 * t2 + t3),
                   3.0 * t2 - 2.0 * t3, h * (t3 - t2)], axis=-1)
    w1 = np.stack([(6.0 * t2 - 6.0 * t) / h, 1.0 - 4.0 * t + 3.0 * t2,
                   (6.0 * t - 6.0 * t2) / h, 3.0 * t2 - 2.0 * t], axis=-1)
    w2 = np.stack([(12.0 * t - 6.0) / h**2, (6.0 * t - 4.0) / h,
                   (6.0 - 12.0 * t) / h**2, (6.0 * t - 2.0) / h], axis=-1)
    return w0, w1, w2


@dataclass
class SplineFunction:
    """Vector-valued Hermite cubic spline on a grid."""
    grid: Grid
    values: np.ndarray
    """Nodal values, shape (N+1, k)"""
    moments: np.ndarray
    """Nodal first derivatives, shape (N+1, k)"""

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        self.moments = np.asarray(self.moments, dtype=float)
        expected = (self.grid.n + 1,)
        if self.values.shape[:1] != expected or self.values.shape != self.moments.shape:
            raise ValueError(f"values/moments must have shape ({self.grid.n + 1}, k)")

    @classmethod
    def zeros(cls, grid:Grid, k:int=3) -> "SplineFunction":
        return cls(grid, np.zeros((grid.n + 1, k)), np.zeros((grid.n + 1, k)))

    @classmethod
    def from_function(cls, grid:Grid, f:Callable, df:Callable) -> "SplineFunction":
        """Sample `f` and its derivative `df` at the nodes.

        Both callables take the node array and return shape (N+1, k) or (N+1,).
        """
        values = np.asarray(f(grid.nodes), dtype=float)
        moments = np.asarray(df(grid.nodes), dtype=float)
        if values.ndim == 1:
            values, moments = values[:, None], moments[:, None]
        return cls(grid, values, moments)

    @classmethod
    def from_vector(cls, grid:Grid, z:np.ndarray, k:int=3) -> "SplineFunction":
        """Unpack the collocation unknown ordering [U_0, M_0, U_1, M_1, ...]."""
        blocks = np.asarray(z, dtype=float).reshape(grid.n + 1, 2, k)
        return cls(grid, blocks[:, 0, :].copy(), blocks[:, 1, :].copy())

    def to_vector(self) -> np.ndarray:
        return np.stack([self.values, self.moments], axis=1).ravel()

    def copy(self) -> "SplineFunction":
        return SplineFunction(self.grid, self.values.copy(), self.moments.copy())

    def combine(self, other:"SplineFunction", coef:float=1.0) -> "SplineFunction":
        """Return self + coef * other."""
        if other.grid is not self.grid and not np.array_equal(other.grid.nodes, self.grid.nodes):
            raise ValueError("splines live on different grids")
        return SplineFunction(self.grid, self.values + coef * other.values,
                              self.moments + coef * other.moments)

    def _segments(self):
        """Per-interval coefficient array, shape (N, 4, k)."""
        return np.stack([self.values[:-1], self.moments[:-1],
                         self.values[1:], self.moments[1:]], axis=1)

    def at_gauss_points(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Value, first and second derivative at every collocation point.

        Returns
        -------
        tuple of ndarray
            Each of shape (N, 2, k)
        """
        w0, w1, w2 = hermite_weights(GAUSS_THETA[None, :], self.grid.steps[:, None])
        seg = self._segments()
        return tuple(np.einsum("igb,ibk->igk", w, seg) for w in (w0, w1, w2))

    def evaluate(self, x) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Value, first and second derivative at arbitrary points.

        Raises
        ------
        OutOfRangeError
            If any point lies outside [0, X_∞]
        """
        x = np.atleast_1d(np.asarray(x, dtype=float))
        nodes = self.grid.nodes
        if np.any(x < nodes[0]) or np.any(x > nodes[-1]) or not np.all(np.isfinite(x)):
            raise OutOfRangeError(f"evaluation point outside [0, {nodes[-1]}]")
        i = np.clip(np.searchsorted(nodes, x, side="right") - 1, 0, self.grid.n - 1)
        h = self.grid.steps[i]
        w0, w1, w2 = hermite_weights((x - nodes[i]) / h, h)
        seg = self._segments()[i]
        return tuple(np.einsum("mb,mbk->mk", w, seg) for w in (w0, w1, w2))

    def __call__(self, x):
        return self.evaluate(x)[0]


def spline_eval(s:SplineFunction, x):
    """Evaluate `s` at `x`.

    Scalar `x` gives 1-D arrays; array `x` gives arrays of shape (m, k).
    Nodal hits return the stored U_i, M_i exactly.
    """
    val, d1, d2 = s.evaluate(x)
    if np.ndim(x) == 0:
        return val[0], d1[0], d2[0]
    return val, d1, d2
