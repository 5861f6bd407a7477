"""
格子とエルミート3次スプラインによる選点法

Modules
-------
- `mesh` : 格子 Δ
- `spline` : スプライン関数
- `collocation` : 選点系の組み立てと帯 LU 分解
"""
from .mesh import Grid, build_grid, GAUSS_THETA, GRADINGS
from .spline import SplineFunction, hermite_weights, spline_eval
from .collocation import LinearizedSystem, assemble, factor_and_solve
