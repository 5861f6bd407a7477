"""
This module writes the run artifacts into the output directory.

Classes:
    RunOutputIO: Output file writer

Notes:
    Every float is written with 12 significant digits (`{:.11e}`) and every table keeps
    a fixed column order, so the files are deterministic for a given config and build.
"""
import json
from os import path, makedirs
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np

from bfstar.canm import FieldState
from bfstar.diagnostics import boson_energy
from bfstar.exceptions import MetricBreakdownError
from bfstar.model import DilatonModel, get_model, metric_lambda



PROFILE_COLUMNS = ("x", "nu", "phi", "sigma", "mu", "exp_lambda")
"""Column schema of a profile table"""

SWEEP_COLUMNS = ("value", "r_s", "omega", "nu_0", "nu_1", "phi_0", "boson_energy", "iterations")
"""Column schema of a sweep summary"""

VERIFICATION_COLUMNS = ("check", "value", "lower", "upper", "passed")
"""Column schema of a verification table"""


def format_float(value: float) -> str:
    """Format a float with 12 significant digits"""
    if value is None or not np.isfinite(value):
        return str(value)
    return f"{value:.11e}"


def _format_cell(value) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format_float(float(value))
    return str(value)


def profile_table(state: FieldState, model: Optional[DilatonModel] = None) -> np.ndarray:
    """Node table with the columns of `PROFILE_COLUMNS`

    e^λ is evaluated at every node. Where the closure breaks down the column holds NaN.
    """
    if model is None:
        model = get_model(state.params.model)
    x = state.grid.nodes
    y, yp = state.y.values, state.y.moments
    try:
        exp_lambda = metric_lambda(x, y, yp, state.mu, state.pair, state.params, model)
    except MetricBreakdownError:
        exp_lambda = np.full_like(x, np.nan)
    return np.column_stack([x, y[:, 0], y[:, 1], y[:, 2], state.mu, exp_lambda])


class RunOutputIO:
    """Output file writer

    All paths are relative to the output directory. Errors are raised as `OSError`
    and wrapped by the runner.
    """
    def __init__(self, output_dir: str, delimiter: str = "\t"):
        """Constructor

        Parameters
        ----------
        output_dir : str
            Output directory path. Created on demand.
        delimiter : str
            Column delimiter of the text tables
        """
        self._output_dir = output_dir
        """Output directory path"""
        self._delimiter = delimiter
        """Column delimiter"""
        self.written: List[str] = []
        """Files written so far, in order"""

    @property
    def output_dir(self) -> str:
        return self._output_dir

    def init_directories(self, *sub_dirs: str):
        """Create the output directory (and optional sub directories)"""
        for d in (self._output_dir, *[path.join(self._output_dir, s) for s in sub_dirs]):
            if not path.exists(d):
                makedirs(d)

    def file_path(self, file_name: str) -> str:
        return path.join(self._output_dir, file_name)

    def _write_text(self, file_name: str, text: str) -> str:
        file_path = self.file_path(file_name)
        if (d := path.dirname(file_path)) and not path.exists(d):
            makedirs(d)
        with open(file_path, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
        self.written.append(file_path)
        return file_path

    def _table(self, header: Dict[str, object], columns: Sequence[str],
               rows: Iterable[Sequence]) -> str:
        lines = [f"# {k} = {_format_cell(v)}" for k, v in header.items()]
        lines.append("# " + self._delimiter.join(columns))
        for row in rows:
            lines.append(self._delimiter.join(_format_cell(v) for v in row))
        return "\n".join(lines) + "\n"

    def write_json(self, file_name: str, data: dict) -> str:
        """Save JSON serializable data"""
        return self._write_text(file_name, json.dumps(data, indent=2, ensure_ascii=False) + "\n")

    def write_profile(self, file_name: str, state: FieldState, header: Dict[str, object],
                      model: Optional[DilatonModel] = None) -> str:
        """Save the node profile of a solution

        Parameters
        ----------
        file_name : str
        state : FieldState
            Converged state
        header : dict
            Config entries written as commented `# key = value` lines.
            The spectral pair and Ω·exp(-ν(0)/2) are appended.
        """
        header = dict(header)
        header["r_s"] = state.pair.r_s
        header["omega"] = state.pair.omega
        header["boson_energy"] = boson_energy(state)
        table = profile_table(state, model)
        return self._write_text(file_name, self._table(header, PROFILE_COLUMNS, table))

    def write_sweep_summary(self, file_name: str, rows: Sequence[Dict[str, object]],
                            header: Dict[str, object]) -> str:
        """Save the sweep summary (one row per converged point)"""
        body = [[row[c] for c in SWEEP_COLUMNS] for row in rows]
        return self._write_text(file_name, self._table(header, SWEEP_COLUMNS, body))

    def write_verification_table(self, file_name: str,
                                 checks: Sequence[Dict[str, object]]) -> str:
        """Save the verification checks as a delimited table"""
        body = [[c.get(k) for k in VERIFICATION_COLUMNS] for c in checks]
        return self._write_text(file_name, self._table({}, VERIFICATION_COLUMNS, body))

    def write_plot_script(self, file_name: str, data_files: Sequence[str], kind: str) -> str:
        """Generate a matplotlib script for the written tables

        Parameters
        ----------
        data_files : list[str]
            Table file names relative to the output directory
        kind : str
            "profile" or "sweep"
        """
        if kind == "profile":
            columns = PROFILE_COLUMNS
            panels = [("nu", "ν"), ("phi", "φ"), ("sigma", "σ"), ("mu", "μ")]
            x_col, x_label, x_limit = "x", "x = r / R_s", "ax.set_xlim(0.0, 3.0)"
        elif kind == "sweep":
            columns = SWEEP_COLUMNS
            panels = [("r_s", "R_s"), ("boson_energy", "Ω exp(-ν(0)/2)"),
                      ("nu_0", "ν(0)"), ("phi_0", "φ(0)")]
            x_col, x_label, x_limit = "value", "swept parameter", "pass"
        else:
            raise ValueError(f"unknown plot kind: {kind}")

        delimiter = self._delimiter.encode("unicode_escape").decode()
        lines = [
            "# Generated by bfstar. Requires numpy and matplotlib.",
            "from os import path",
            "",
            "import matplotlib.pyplot as plt",
            "import numpy as np",
            "",
            "HERE = path.dirname(path.abspath(__file__))",
            f"FILES = {list(data_files)!r}",
            f"COLUMNS = {list(columns)!r}",
            f"PANELS = {panels!r}",
            "",
            "fig, axes = plt.subplots(2, 2, figsize=(10, 7))",
            "for file_name in FILES:",
            f"    data = np.loadtxt(path.join(HERE, file_name), comments='#', delimiter='{delimiter}', ndmin=2)",
            "    for ax, (column, label) in zip(axes.ravel(), PANELS):",
            f"        ax.plot(data[:, COLUMNS.index('{x_col}')], data[:, COLUMNS.index(column)],"
            " label=path.splitext(file_name)[0])",
            f"        ax.set_xlabel('{x_label}')",
            "        ax.set_ylabel(label)",
            f"        {x_limit}",
            "if len(FILES) > 1:",
            "    axes[0, 0].legend(fontsize='small')",
            "fig.tight_layout()",
            f"fig.savefig(path.join(HERE, '{path.splitext(path.basename(file_name))[0]}.png'), dpi=150)",
            "plt.show()",
        ]
        return self._write_text(file_name, "\n".join(lines) + "\n")
