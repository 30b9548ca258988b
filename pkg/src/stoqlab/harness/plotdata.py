"""Plot-ready columnar exports derived from run artifacts.

Each kind reads known artifact files from a scenario run directory and
writes a tidy CSV plus a JSON sidecar describing the columns.  This keeps
plotting completely outside the package (no figure dependencies).
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .. import io


class PlotDataError(ValueError):
    pass


def _find(run_dir, patterns):
    for pattern in patterns:
        hits = sorted(Path(run_dir).glob(pattern))
        if hits:
            return hits[0]
    raise PlotDataError(
        f"no artifact matching {patterns} under {run_dir}")


def _emit(out_dir, name, columns, rows, description):
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / f"{name}.csv"
    io.write_table_csv(csv_path, columns, rows)
    sidecar = {"columns": columns, "description": description,
               "rows": len(rows)}
    (out_dir / f"{name}.json").write_text(
        json.dumps(sidecar, indent=2, sort_keys=True) + "\n")
    return [str(csv_path), str(out_dir / f"{name}.json")]


def energy_series(run_dir, out_dir):
    """t vs <H> from whichever engine wrote an energy series."""
    path = _find(run_dir, ["sde_energy_series.csv", "fpe_energy_series.csv"])
    header, data = io.read_csv_columns(path)
    cols = ["t", "mean_H"]
    idx = [header.index(c) for c in cols]
    rows = [tuple(row[i] for i in idx) for row in data]
    return _emit(out_dir, "energy_series", cols, rows,
                 "ensemble/grid mean energy vs time")


def marginals(run_dir, out_dir):
    """Cross-engine position marginals on the shared lattice."""
    path = _find(run_dir, ["cross_engine_marginals.csv"])
    header, data = io.read_csv_columns(path)
    rows = [tuple(row) for row in data]
    return _emit(out_dir, "marginals", header, rows,
                 "position marginals: grid solver, ensemble histogram, |Psi|^2")


def residual_series(run_dir, out_dir):
    """Ehrenfest deviations or refinement residuals vs time/level."""
    path = _find(run_dir, ["ehrenfest_P*.csv", "subsystem_refinement.csv"])
    header, data = io.read_csv_columns(path)
    rows = [tuple(row) for row in data]
    return _emit(out_dir, "residual_series", header, rows,
                 f"residual series from {Path(path).name}")


def l1_series(run_dir, out_dir):
    """Pairwise L1 distances of the cross-engine marginals."""
    path = _find(run_dir, ["cross_engine_marginals.csv"])
    header, data = io.read_csv_columns(path)
    x = data[:, header.index("x")]
    dx = float(x[1] - x[0])
    fp = data[:, header.index("fp")]
    sd = data[:, header.index("sde")]
    ps = data[:, header.index("psi")]
    rows = [(float(np.sum(np.abs(fp - ps)) * dx),
             float(np.sum(np.abs(sd - ps)) * dx),
             float(np.sum(np.abs(fp - sd)) * dx))]
    return _emit(out_dir, "l1_series", ["fp_vs_psi", "sde_vs_psi", "fp_vs_sde"],
                 rows, "pairwise L1 distances between engine marginals")


KINDS = {
    "energy_series": energy_series,
    "marginals": marginals,
    "residual_series": residual_series,
    "l1_series": l1_series,
}


def emit_plotdata(run_dir, kind, out_dir):
    fn = KINDS.get(kind)
    if fn is None:
        raise PlotDataError(
            f"unknown plot kind {kind!r}; supported kinds: {sorted(KINDS)}")
    return fn(run_dir, out_dir)
