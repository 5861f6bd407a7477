"""
2点 Gauss 選点による線形境界値問題の離散化

    -x z'' - z' + P(x) z' + Q(x) z = r(x),   z'(0) = a,   z(X_∞) = b

をエルミート3次スプラインで離散化し、ほぼブロック対角な行列を
帯行列として1回だけ LU 分解して、複数の右辺について解く。

未知数の並びは節点ごとに [U_i (3成分), M_i (3成分)]。
行の並びは 先頭3行が M_0 の境界条件、続いて小区間ごとに 6行
(Gauss 点2つ × 3式)、最後の3行が U_N の境界条件。

Classes
-------
- `LinearizedSystem` : 組み立て済みの選点系

Functions
---------
- `assemble` : 選点系を組み立てる
- `factor_and_solve` : 1回の分解ですべての右辺を解く
"""
from typing import Callable, List, Optional, Tuple, Union

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.linalg import get_lapack_funcs

from ..exceptions import LinearSolveError
from .mesh import Grid, GAUSS_THETA
from .spline import SplineFunction, hermite_weights



N_COMPONENTS = 3
"""連立する成分の数"""

BANDWIDTH = 8
"""下側・上側の帯幅 (kl = ku)"""

RESIDUAL_TOLERANCE = 1e-10
"""解の相対残差の上限"""


CoeffProvider = Callable[[np.ndarray], Tuple[np.ndarray, np.ndarray]]
RhsProvider = Callable[[np.ndarray], np.ndarray]


class LinearizedSystem:
    """組み立て済みの選点系

    Notes
    -----
    - `blocks[i]` は小区間 i の 6×12 ブロックで、列は (U_i, M_i, U_{i+1}, M_{i+1})
    - 分解は最初の `solve` で一度だけ行い、以降は再利用する
    """
    def __init__(self, grid:Grid, blocks:np.ndarray, rhs:np.ndarray):
        self.grid = grid
        """格子"""
        self.blocks = blocks
        """形状 (N, 6, 12)"""
        self.rhs = rhs
        """右辺、形状 (6(N+1), k)"""
        self.factorization_count = 0
        """LU 分解を行った回数"""
        self._lu = None
        self._piv = None

    @property
    def size(self) -> int:
        """行列の次元 6(N+1)"""
        return 2 * N_COMPONENTS * (self.grid.n + 1)

    @property
    def n_rhs(self) -> int:
        return self.rhs.shape[1]

    def banded(self) -> np.ndarray:
        """LAPACK の gbtrf 形式の帯行列 (2kl+ku+1 行)"""
        kl = ku = BANDWIDTH
        n = self.grid.n
        ab = np.zeros((2 * kl + ku + 1, self.size))
        # 境界条件の行: M_0 = a, U_N = b
        for k in range(N_COMPONENTS):
            ab[kl + ku + k - (3 + k), 3 + k] = 1.0
            r = c = 6 * n + k
            ab[kl + ku + (r + 3) - c, c] = 1.0
        a = np.arange(6)[None, :, None]
        cc = np.arange(12)[None, None, :]
        i = np.arange(n)[:, None, None]
        rows = np.broadcast_to(kl + ku + 3 + a - cc, self.blocks.shape)
        cols = np.broadcast_to(6 * i + cc, self.blocks.shape)
        ab[rows, cols] = self.blocks
        return ab

    def factor(self):
        """帯 LU 分解

        Raises
        ------
        LinearSolveError
            特異な場合 (ピボットの位置を節点番号で示す)
        """
        ab = self.banded()
        gbtrf, = get_lapack_funcs(("gbtrf",), (ab,))
        lu, piv, info = gbtrf(ab, BANDWIDTH, BANDWIDTH)
        self.factorization_count += 1
        if info > 0:
            raise LinearSolveError("singular collocation matrix", pivot_node=(info - 1) // 6)
        if info < 0:
            raise LinearSolveError(f"illegal argument {-info} in gbtrf")
        self._lu, self._piv = lu, piv

    def solve(self, rhs:Optional[np.ndarray]=None) -> np.ndarray:
        """分解済みの行列で解く (未分解なら分解する)

        Parameters
        ----------
        rhs : np.ndarray, optional
            省略時は組み立て時の右辺

        Returns
        -------
        np.ndarray
            形状 (6(N+1), k) の解
        """
        if self._lu is None:
            self.factor()
        b = self.rhs if rhs is None else np.asarray(rhs, dtype=float).reshape(self.size, -1)
        gbtrs, = get_lapack_funcs(("gbtrs",), (self._lu,))
        z, info = gbtrs(self._lu, BANDWIDTH, BANDWIDTH, b, self._piv)
        if info != 0:
            raise LinearSolveError(f"gbtrs failed: info={info}")
        self._check_residual(z, b)
        return z

    def matvec(self, z:np.ndarray) -> np.ndarray:
        """行列と z (形状 (6(N+1), k)) の積"""
        n = self.grid.n
        out = np.empty_like(z)
        out[0:3] = z[3:6]
        out[6 * n + 3:] = z[6 * n:6 * n + 3]
        win = sliding_window_view(z, 12, axis=0)[::6][:n]
        out[3:6 * n + 3] = np.einsum("iac,ikc->iak", self.blocks, win).reshape(6 * n, -1)
        return out

    def _check_residual(self, z:np.ndarray, b:np.ndarray):
        if not np.all(np.isfinite(z)):
            raise LinearSolveError("non-finite solution of the collocation system")
        res = np.abs(self.matvec(z) - b)
        scale = np.abs(self.blocks).sum(axis=2).max() * np.abs(z).max() + np.abs(b).max()
        if scale > 0 and res.max() > RESIDUAL_TOLERANCE * scale:
            row = int(np.argmax(res.max(axis=1)))
            raise LinearSolveError(
                f"collocation residual too large: {res.max() / scale:.3e}",
                pivot_node=max(row - 3, 0) // 6)


def _as_columns(v, rows:int) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    return v.reshape(rows, -1)


def assemble(grid:Grid, coeff_provider:Union[CoeffProvider, Tuple[np.ndarray, np.ndarray]],
             rhs_provider:Union[RhsProvider, np.ndarray],
             left_bc, right_bc) -> LinearizedSystem:
    """選点系を組み立てる

    Parameters
    ----------
    grid : Grid
    coeff_provider : callable | tuple
        選点の配列 (形状 (m,)) を受け取り (∂F/∂y, ∂F/∂y') (各形状 (m, 3, 3)) を返す関数。
        評価済みの組 (各形状 (N, 2, 3, 3)) も渡せる
    rhs_provider : callable | np.ndarray
        選点の配列を受け取り右辺 (形状 (m, 3) または (m, 3, k)) を返す関数、
        または評価済みの配列 (形状 (N, 2, 3) または (N, 2, 3, k))
    left_bc : array_like
        z'(0) の値、形状 (3,) または (3, k)
    right_bc : array_like
        z(X_∞) の値、形状 (3,) または (3, k)

    Returns
    -------
    LinearizedSystem
    """
    n = grid.n
    xi = grid.gauss_points
    if callable(coeff_provider):
        fy, fp = coeff_provider(xi.ravel())
    else:
        fy, fp = coeff_provider
    fy = np.asarray(fy, dtype=float).reshape(n, 2, 3, 3)
    fp = np.asarray(fp, dtype=float).reshape(n, 2, 3, 3)
    r = rhs_provider(xi.ravel()) if callable(rhs_provider) else rhs_provider
    r = np.asarray(r, dtype=float).reshape(n * 2 * 3, -1)

    w0, w1, w2 = hermite_weights(GAUSS_THETA[None, :], grid.steps[:, None])
    eye = np.eye(3)
    # [i, g, k, b, j]
    blk = (fy[:, :, :, None, :] * w0[:, :, None, :, None]
           + (fp - eye)[:, :, :, None, :] * w1[:, :, None, :, None]
           - xi[:, :, None, None, None] * eye[None, None, :, None, :] * w2[:, :, None, :, None])
    blocks = blk.reshape(n, 6, 12)

    k = r.shape[1]
    left = _as_columns(left_bc, 3)
    right = _as_columns(right_bc, 3)
    if left.shape[1] != k:
        left = np.broadcast_to(left, (3, k))
    if right.shape[1] != k:
        right = np.broadcast_to(right, (3, k))
    rhs = np.concatenate([left, r, right], axis=0)
    return LinearizedSystem(grid, blocks, rhs)


def factor_and_solve(system:LinearizedSystem) -> List[SplineFunction]:
    """1回の LU 分解ですべての右辺を解く

    Returns
    -------
    List[SplineFunction]
        右辺の列ごとの解 (通常は u, v, w の順)
    """
    z = system.solve()
    return [SplineFunction.from_vector(system.grid, z[:, c]) for c in range(z.shape[1])]
