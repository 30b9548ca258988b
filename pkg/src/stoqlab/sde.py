"""Ensemble integration of the stochastic Hamilton equations.

    dx = (dH/dp) dt
    dp = -(dH/dx) dt + sqrt(2 mu P) dW

Euler-Maruyama is the reference scheme (the noise is additive in p, so
higher strong order buys nothing); a semi-implicit variant with the same
noise handling is provided for long-horizon runs where the deterministic
drift of plain Euler would swamp the statistics.  Noise for step k is
drawn from a counter-keyed stream derived from (seed, k), so the update
is reproducible regardless of how the ensemble is chunked.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .fpe import PhaseSpaceGrid, PhaseSpaceGridSpec
from .model import (PhysicalConstants, FieldSpec, eval_hamiltonian,
                    hamiltonian_gradients, kinetic_momentum, lorentz_force)

_INIT_STREAM = 0
_STEP_STREAM = 1


def _generator(seed, *key):
    return np.random.Generator(np.random.Philox(np.random.SeedSequence((seed,) + key)))


class NonFiniteState(FloatingPointError):
    def __init__(self, step_index, trajectory_index):
        self.step_index = step_index
        self.trajectory_index = trajectory_index
        super().__init__(
            f"non-finite state in trajectory {trajectory_index} "
            f"after step {step_index}")


@dataclass(frozen=True)
class TrajectoryEnsemble:
    """M synchronous sample paths of the stochastic Hamilton equations."""

    positions: np.ndarray  # (M, D)
    momenta: np.ndarray    # (M, D)
    time: float
    seed: int
    consts: PhysicalConstants
    fields: FieldSpec
    step_index: int = 0

    @property
    def size(self):
        return self.positions.shape[0]

    @property
    def dim(self):
        return self.positions.shape[1]


def gaussian_ensemble(n_paths, mean_x, sigma_x, mean_p, sigma_p, seed,
                      consts, fields):
    """Independent Gaussian cloud in x and p (the matched initial
    condition used for cross-engine comparisons has zero x-p correlation)."""
    d = fields.dim
    rng = _generator(seed, _INIT_STREAM)
    x = np.broadcast_to(np.asarray(mean_x, dtype=float), (d,)) + \
        np.broadcast_to(np.asarray(sigma_x, dtype=float), (d,)) * rng.standard_normal((n_paths, d))
    p = np.broadcast_to(np.asarray(mean_p, dtype=float), (d,)) + \
        np.broadcast_to(np.asarray(sigma_p, dtype=float), (d,)) * rng.standard_normal((n_paths, d))
    return TrajectoryEnsemble(x, p, 0.0, seed, consts, fields)


def step_ensemble(ens, dt, scheme="euler"):
    """One synchronous step; returns a new ensemble at time + dt."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    c = ens.consts
    amplitude = np.sqrt(2.0 * c.mass * c.vacuum_power * dt)
    noise = 0.0
    if amplitude > 0.0:
        rng = _generator(ens.seed, _STEP_STREAM, ens.step_index)
        noise = amplitude * rng.standard_normal(ens.momenta.shape)

    if scheme == "euler":
        dh_dx, dh_dp = hamiltonian_gradients(c, ens.fields, ens.positions,
                                             ens.momenta, ens.time)
        x = ens.positions + dh_dp * dt
        p = ens.momenta - dh_dx * dt + noise
    elif scheme == "symplectic":
        # semi-implicit: momentum kick first, free of p-dependence in the
        # force, so the fields must not carry a vector potential
        if np.any(ens.fields.vector_potential(ens.positions[:1], ens.time)):
            raise ValueError("symplectic scheme requires A = 0 fields")
        grad_v = ens.fields.grad_potential(ens.positions, ens.time)
        p = ens.momenta - grad_v * dt + noise
        x = ens.positions + p / c.mass * dt
    else:
        raise ValueError(f"unknown scheme {scheme!r}")

    if not np.all(np.isfinite(x)) or not np.all(np.isfinite(p)):
        bad = np.nonzero(~(np.isfinite(x).all(axis=1) & np.isfinite(p).all(axis=1)))[0]
        raise NonFiniteState(ens.step_index, int(bad[0]))
    return replace(ens, positions=x, momenta=p, time=ens.time + dt,
                   step_index=ens.step_index + 1)


@dataclass(frozen=True)
class MomentRecord:
    """Streaming statistics of one ensemble snapshot."""

    time: float
    mean_x: np.ndarray    # (D,)
    mean_v: np.ndarray    # (D,)  <p - (e/c)A>/mu
    mean_h: float
    cov_xx: np.ndarray    # (D, D), symmetric
    cov_pp: np.ndarray    # (D, D), symmetric
    cov_xp: np.ndarray    # (D, D), cross block cov(x_i, p_j)
    mean_force: np.ndarray  # (D,)  Lorentz-force average for Ehrenfest
    count: int


def moments(ens):
    x, p = ens.positions, ens.momenta
    m = ens.size
    w = kinetic_momentum(ens.consts, ens.fields, x, p, ens.time)
    h = eval_hamiltonian(ens.consts, ens.fields, x, p, ens.time)
    force = lorentz_force(ens.consts, ens.fields, x, p, ens.time)
    mx = x.mean(axis=0)
    mp = p.mean(axis=0)
    dx = x - mx
    dpv = p - mp
    return MomentRecord(
        time=ens.time,
        mean_x=mx,
        mean_v=w.mean(axis=0) / ens.consts.mass,
        mean_h=float(h.mean()),
        cov_xx=dx.T @ dx / m,
        cov_pp=dpv.T @ dpv / m,
        cov_xp=dx.T @ dpv / m,
        mean_force=force.mean(axis=0),
        count=m,
    )


def run_experiment(ens, dt, n_steps, record_every=1, scheme="euler"):
    """Step the ensemble, recording moments every record_every steps
    (plus the initial state).  Returns (final ensemble, records)."""
    records = [moments(ens)]
    for step in range(1, n_steps + 1):
        try:
            ens = step_ensemble(ens, dt, scheme=scheme)
        except NonFiniteState:
            raise
        if step % record_every == 0 or step == n_steps:
            records.append(moments(ens))
    return ens, records


def ehrenfest_residual(records, consts):
    """mu d<v>/dt minus the averaged Lorentz force, by central
    differences over the record series.  Returns (times, residuals)
    with one (D,) residual per interior record."""
    if len(records) < 3:
        raise ValueError("need at least 3 records for central differences")
    times = np.array([r.time for r in records])
    mean_v = np.stack([r.mean_v for r in records])
    force = np.stack([r.mean_force for r in records])
    dvdt = (mean_v[2:] - mean_v[:-2]) / (times[2:] - times[:-2])[:, None]
    residual = consts.mass * dvdt - force[1:-1]
    return times[1:-1], residual


def histogram_phase_space(ens, spec):
    """Density-normalized (x, p) histogram for 1D ensembles.

    Returns (PhaseSpaceGrid, clipped_fraction); the grid mass equals
    1 - clipped_fraction.
    """
    if ens.size == 0:
        raise ValueError("empty ensemble")
    if ens.dim != 1:
        raise ValueError("phase-space histograms are built for 1D ensembles")
    x_edges, p_edges = spec.edges()
    counts, _, _ = np.histogram2d(ens.positions[:, 0], ens.momenta[:, 0],
                                  bins=(x_edges, p_edges))
    x, p = spec.centers()
    dx = x_edges[1] - x_edges[0]
    dp = p_edges[1] - p_edges[0]
    density = counts / (ens.size * dx * dp)
    clipped = 1.0 - counts.sum() / ens.size
    return PhaseSpaceGrid(density, x, p, ens.time), float(clipped)
