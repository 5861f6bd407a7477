"""
格子を細かくしたときのプロファイルの変化
"""
import numpy as np

from ..canm.state import FieldState



def shared_node_indices(coarse_nodes:np.ndarray, fine_nodes:np.ndarray, atol:float=1e-12):
    """粗い格子と細かい格子で共有される節点の番号の組 (coarse_idx, fine_idx)"""
    idx = np.clip(np.searchsorted(fine_nodes, coarse_nodes), 0, len(fine_nodes) - 1)
    lower = np.clip(idx - 1, 0, len(fine_nodes) - 1)
    pick = np.where(np.abs(fine_nodes[lower] - coarse_nodes) < np.abs(fine_nodes[idx] - coarse_nodes),
                    lower, idx)
    hit = np.abs(fine_nodes[pick] - coarse_nodes) <= atol * np.maximum(1.0, np.abs(coarse_nodes))
    return np.nonzero(hit)[0], pick[hit]


def profile_relative_change(coarse:FieldState, fine:FieldState) -> float:
    """共有される節点での (ν, φ, σ) の相対的な変化の最大値

    成分ごとに max|coarse - fine| / max|fine| を求め、その最大値を返す。
    """
    ci, fi = shared_node_indices(coarse.grid.nodes, fine.grid.nodes)
    if ci.size == 0:
        raise ValueError("grids share no nodes")
    a = coarse.y.values[ci]
    b = fine.y.values[fi]
    scale = np.maximum(np.max(np.abs(b), axis=0), 1e-300)
    return float(np.max(np.max(np.abs(a - b), axis=0) / scale))
