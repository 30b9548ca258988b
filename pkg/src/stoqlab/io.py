"""Flat binary snapshot formats and deterministic CSV writers.

All binary payloads are little-endian float64 / uint64 with small fixed
headers; floats in CSV are written with repr-faithful %.17g so reruns
with the same seed reproduce artifacts byte for byte.

  ensemble:      [M u8][D u8][time f8][seed u8] + x (M*D f8) + p (M*D f8)
  grid:          [Nx u8][Np u8][x0 f8][x1 f8][p0 f8][p1 f8][time f8] + density
  wavefunction:  [D u8] + per axis [n u8][lo f8][hi f8] + [time f8] + complex128
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .fpe import PhaseSpaceGrid
from .states import WaveFunction

_U8 = "<Q"
_F8 = "<d"


def _fmt(value):
    return f"{float(value):.17g}"


def save_ensemble(path, ens, sidecar=None):
    path = Path(path)
    with open(path, "wb") as fh:
        fh.write(struct.pack(_U8, ens.size))
        fh.write(struct.pack(_U8, ens.dim))
        fh.write(struct.pack(_F8, ens.time))
        fh.write(struct.pack(_U8, ens.seed))
        fh.write(np.ascontiguousarray(ens.positions, dtype="<f8").tobytes())
        fh.write(np.ascontiguousarray(ens.momenta, dtype="<f8").tobytes())
    if sidecar is not None:
        path.with_suffix(path.suffix + ".json").write_text(
            json.dumps(sidecar, indent=2, sort_keys=True) + "\n")


def load_ensemble(path, consts, fields):
    from .sde import TrajectoryEnsemble

    raw = Path(path).read_bytes()
    m, d = struct.unpack_from(_U8, raw, 0)[0], struct.unpack_from(_U8, raw, 8)[0]
    time = struct.unpack_from(_F8, raw, 16)[0]
    seed = struct.unpack_from(_U8, raw, 24)[0]
    body = np.frombuffer(raw, dtype="<f8", offset=32)
    x = body[: m * d].reshape(m, d).copy()
    p = body[m * d : 2 * m * d].reshape(m, d).copy()
    return TrajectoryEnsemble(x, p, time, int(seed), consts, fields)


def save_grid(path, grid):
    with open(path, "wb") as fh:
        fh.write(struct.pack(_U8, grid.density.shape[0]))
        fh.write(struct.pack(_U8, grid.density.shape[1]))
        fh.write(struct.pack(_F8, grid.x[0]))
        fh.write(struct.pack(_F8, grid.x[-1]))
        fh.write(struct.pack(_F8, grid.p[0]))
        fh.write(struct.pack(_F8, grid.p[-1]))
        fh.write(struct.pack(_F8, grid.time))
        fh.write(np.ascontiguousarray(grid.density, dtype="<f8").tobytes())


def load_grid(path):
    raw = Path(path).read_bytes()
    nx = struct.unpack_from(_U8, raw, 0)[0]
    np_ = struct.unpack_from(_U8, raw, 8)[0]
    x0, x1, p0, p1, time = struct.unpack_from("<5d", raw, 16)
    density = np.frombuffer(raw, dtype="<f8", offset=56).reshape(nx, np_).copy()
    return PhaseSpaceGrid(density, np.linspace(x0, x1, nx),
                          np.linspace(p0, p1, np_), time)


def save_wavefunction(path, psi):
    with open(path, "wb") as fh:
        fh.write(struct.pack(_U8, psi.dim))
        for ax in psi.axes:
            fh.write(struct.pack(_U8, len(ax)))
            fh.write(struct.pack(_F8, ax[0]))
            fh.write(struct.pack(_F8, ax[-1]))
        fh.write(struct.pack(_F8, psi.time))
        fh.write(np.ascontiguousarray(psi.amplitude, dtype="<c16").tobytes())


def load_wavefunction(path):
    raw = Path(path).read_bytes()
    dim = struct.unpack_from(_U8, raw, 0)[0]
    offset = 8
    axes = []
    shape = []
    for _ in range(dim):
        n = struct.unpack_from(_U8, raw, offset)[0]
        lo, hi = struct.unpack_from("<2d", raw, offset + 8)
        axes.append(np.linspace(lo, hi, n))
        shape.append(n)
        offset += 24
    time = struct.unpack_from(_F8, raw, offset)[0]
    amp = np.frombuffer(raw, dtype="<c16", offset=offset + 8).reshape(shape).copy()
    return WaveFunction(amp, tuple(axes), time)


def write_moments_csv(path, records):
    """MomentRecord series with the fixed column order:
    t, mean_x*, mean_v*, mean_H, cov_xx*, cov_pp*, cov_xp*, force*, count."""
    d = len(records[0].mean_x)
    cols = (["t"]
            + [f"mean_x_{j}" for j in range(d)]
            + [f"mean_v_{j}" for j in range(d)]
            + ["mean_H"]
            + [f"cov_xx_{i}{j}" for i in range(d) for j in range(d)]
            + [f"cov_pp_{i}{j}" for i in range(d) for j in range(d)]
            + [f"cov_xp_{i}{j}" for i in range(d) for j in range(d)]
            + [f"force_{j}" for j in range(d)]
            + ["count"])
    lines = [",".join(cols)]
    for r in records:
        row = ([_fmt(r.time)]
               + [_fmt(v) for v in r.mean_x]
               + [_fmt(v) for v in r.mean_v]
               + [_fmt(r.mean_h)]
               + [_fmt(v) for v in r.cov_xx.ravel()]
               + [_fmt(v) for v in r.cov_pp.ravel()]
               + [_fmt(v) for v in r.cov_xp.ravel()]
               + [_fmt(v) for v in r.mean_force]
               + [str(r.count)])
        lines.append(",".join(row))
    Path(path).write_text("\n".join(lines) + "\n")


def write_table_csv(path, columns, rows):
    """Generic deterministic CSV (diagnostics, plot data)."""
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(
            v if isinstance(v, str) else _fmt(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def read_csv_columns(path):
    text = Path(path).read_text().strip().splitlines()
    header = text[0].split(",")
    data = np.array([[float(v) for v in line.split(",")] for line in text[1:]])
    return header, data


def save_coefficient_table(directory, table):
    """Directory of per-index complex fields plus a JSON manifest."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    manifest = {"order": table.order, "time": table.time,
                "axes": [[_fmt(a[0]), _fmt(a[-1]), len(a)] for a in table.axes],
                "fields": {}}
    for alpha in table.indices():
        name = "phi_" + "_".join(str(a) for a in alpha) + ".c16"
        manifest["fields"][",".join(str(a) for a in alpha)] = name
        np.ascontiguousarray(table[alpha], dtype="<c16").tofile(directory / name)
    (directory / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def load_coefficient_table(directory):
    from .adjoint import CoefficientTable

    directory = Path(directory)
    manifest = json.loads((directory / "manifest.json").read_text())
    axes = tuple(np.linspace(float(lo), float(hi), n)
                 for lo, hi, n in manifest["axes"])
    shape = tuple(len(a) for a in axes)
    coeffs = {}
    for key, name in manifest["fields"].items():
        alpha = tuple(int(v) for v in key.split(","))
        coeffs[alpha] = np.fromfile(directory / name, dtype="<c16").reshape(shape)
    return CoefficientTable(coeffs, axes, manifest["order"], manifest["time"])
