"""
bfstar

スカラー・テンソル重力 (質量をもつディラトン) における
ボソン-フェルミオン混合星の静的・球対称解を求めるソルバー

Subpackages
-----------
- `model`: 物理モデル (結合関数・ポテンシャル・エネルギー運動量テンソル・右辺 F)
- `discretization`: 格子とエルミート3次スプラインによる選点法
- `canm`: ニュートン法の連続類似 (CANM) による反復
- `diagnostics`: 収束次数・遠方での減衰・第一積分などの検証
- `config`: 設定ファイルの読み書き
- `status`: エラー・警告・進捗状況
- `runner`: 単一計算・パラメータ掃引・検証の実行
"""
__version__ = "1.0.0"
