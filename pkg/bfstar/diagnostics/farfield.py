"""
X_∞ での ν' の減衰 ν'(X_∞) ≈ C / X_∞² と質量の推定

Classes
-------
- `FarfieldSample` : 1つの X_∞ での ν(X_∞), ν'(X_∞)
- `FarfieldReport` : C_k, 比 ν'(X)/ν'(2X), 質量の推定

Functions
---------
- `farfield_decay` : 解の列からレポートを作る
"""
from dataclasses import dataclass, field
from typing import List, Sequence, Union

from ..canm.state import FieldState



@dataclass(frozen=True)
class FarfieldSample:
    """1つの X_∞ での遠方の値"""
    x_inf: float
    dnu: float
    """スプラインの最後の節点のモーメント ν'(X_∞)"""
    nu: float = 0.0
    """ν(X_∞)"""
    r_s: float = 1.0

    @classmethod
    def from_state(cls, state:FieldState) -> "FarfieldSample":
        return cls(state.grid.x_inf, float(state.y.moments[-1, 0]),
                   float(state.y.values[-1, 0]), state.pair.r_s)

    @property
    def c(self) -> float:
        """C = ν'(X_∞) X_∞²"""
        return self.dnu * self.x_inf**2

    @property
    def mass(self) -> float:
        """ν ≈ -M/(R_s x) から M ≈ R_s X_∞² ν'(X_∞)"""
        return self.r_s * self.c

    @property
    def mass_from_value(self) -> float:
        """M ≈ -R_s X_∞ ν(X_∞)"""
        return -self.r_s * self.x_inf * self.nu


@dataclass
class FarfieldReport:
    """遠方の減衰のレポート"""
    samples: List[FarfieldSample]
    c_values: List[float] = field(default_factory=list)
    ratios: List[float] = field(default_factory=list)
    """ν'(X_k) / ν'(X_{k+1})"""
    masses: List[float] = field(default_factory=list)
    masses_from_value: List[float] = field(default_factory=list)

    def asdict(self) -> dict:
        return {
            "x_inf": [s.x_inf for s in self.samples],
            "dnu": [s.dnu for s in self.samples],
            "c": self.c_values,
            "ratios": self.ratios,
            "mass": self.masses,
            "mass_from_value": self.masses_from_value,
        }


def farfield_decay(solutions:Sequence[Union[FieldState, FarfieldSample]]) -> FarfieldReport:
    """X_∞ を倍々にした解の列から減衰のレポートを作る

    Parameters
    ----------
    solutions : Sequence
        `FieldState` または `FarfieldSample` の列 (X_∞ の昇順、2つ以上)
    """
    if len(solutions) < 2:
        raise ValueError("farfield decay needs at least two solutions")
    samples = [s if isinstance(s, FarfieldSample) else FarfieldSample.from_state(s)
               for s in solutions]
    report = FarfieldReport(samples)
    report.c_values = [s.c for s in samples]
    report.masses = [s.mass for s in samples]
    report.masses_from_value = [s.mass_from_value for s in samples]
    report.ratios = [a.dnu / b.dnu for a, b in zip(samples[:-1], samples[1:])]
    return report
