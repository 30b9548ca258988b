"""N-particle extensions: ensemble dynamics with mutual interactions,
the pairwise correlation tensor, and the zero-point identity for the
squared total angular momentum.

Grid work is capped at N*D <= 4 (desk scale); the operator identity
itself is established symbolically for larger N through `ordering`, so
the grid runs only corroborate the quadrature path.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace

import numpy as np
import sympy

from ._diff import derivative
from .model import PhysicalConstants, FieldSpec, eval_hamiltonian
from .ordering import (HBAR, OperatorPolynomial, p_letter, x_letter,
                       symmetrize_word)
from .sde import _generator, _INIT_STREAM, _STEP_STREAM, NonFiniteState
from .states import WaveFunction


@dataclass(frozen=True)
class PairPotential:
    """Pairwise interaction v(x_a - x_b); harmonic by default."""

    stiffness: float

    def gradient(self, r):
        """dv/dr for v = (stiffness/2) |r|^2, evaluated on (..., D)."""
        return self.stiffness * r

    def value(self, r):
        return 0.5 * self.stiffness * np.sum(r * r, axis=-1)


@dataclass(frozen=True)
class ManyBodyEnsemble:
    """M sample paths of N particles in D dimensions."""

    positions: np.ndarray  # (M, N, D)
    momenta: np.ndarray    # (M, N, D)
    time: float
    seed: int
    consts: PhysicalConstants
    fields: FieldSpec      # external, applied per particle
    pair: PairPotential | None = None
    step_index: int = 0

    @property
    def size(self):
        return self.positions.shape[0]

    @property
    def n_particles(self):
        return self.positions.shape[1]

    @property
    def dim(self):
        return self.positions.shape[2]


def mb_gaussian_ensemble(n_paths, n_particles, mean_x, sigma_x, mean_p,
                         sigma_p, seed, consts, fields, pair=None):
    d = fields.dim
    shape = (n_paths, n_particles, d)
    rng = _generator(seed, _INIT_STREAM)
    mean_x = np.broadcast_to(np.asarray(mean_x, dtype=float), shape[1:])
    sigma_x = np.broadcast_to(np.asarray(sigma_x, dtype=float), shape[1:])
    mean_p = np.broadcast_to(np.asarray(mean_p, dtype=float), shape[1:])
    sigma_p = np.broadcast_to(np.asarray(sigma_p, dtype=float), shape[1:])
    x = mean_x + sigma_x * rng.standard_normal(shape)
    p = mean_p + sigma_p * rng.standard_normal(shape)
    return ManyBodyEnsemble(x, p, 0.0, seed, consts, fields, pair)


def _total_grad_v(ens, x, t):
    """External plus pairwise potential gradient, per particle."""
    g = ens.fields.grad_potential(x.reshape(-1, ens.dim), t).reshape(x.shape)
    if ens.pair is not None:
        for a, b in itertools.combinations(range(ens.n_particles), 2):
            r = x[:, a, :] - x[:, b, :]
            dv = ens.pair.gradient(r)
            g[:, a, :] += dv
            g[:, b, :] -= dv
    return g


def mb_sde_step(ens, dt, scheme="euler"):
    """Per-particle update with independent noise per particle and
    component (a single counter-keyed draw covers the (M, N, D) block)."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    c = ens.consts
    if ens.fields.kind not in ("free", "harmonic", "linear"):
        raise NotImplementedError("many-body stepping assumes A = 0 fields")
    amplitude = np.sqrt(2.0 * c.mass * c.vacuum_power * dt)
    noise = 0.0
    if amplitude > 0.0:
        rng = _generator(ens.seed, _STEP_STREAM, ens.step_index)
        noise = amplitude * rng.standard_normal(ens.momenta.shape)

    if scheme == "euler":
        grad_v = _total_grad_v(ens, ens.positions, ens.time)
        x = ens.positions + ens.momenta / c.mass * dt
        p = ens.momenta - grad_v * dt + noise
    elif scheme == "symplectic":
        grad_v = _total_grad_v(ens, ens.positions, ens.time)
        p = ens.momenta - grad_v * dt + noise
        x = ens.positions + p / c.mass * dt
    else:
        raise ValueError(f"unknown scheme {scheme!r}")

    if not np.all(np.isfinite(x)) or not np.all(np.isfinite(p)):
        flat = ~(np.isfinite(x).reshape(ens.size, -1).all(axis=1)
                 & np.isfinite(p).reshape(ens.size, -1).all(axis=1))
        raise NonFiniteState(ens.step_index, int(np.nonzero(flat)[0][0]))
    return replace(ens, positions=x, momenta=p, time=ens.time + dt,
                   step_index=ens.step_index + 1)


def mb_total_energy(ens):
    """Ensemble mean of the total Hamiltonian (external + pairwise)."""
    flat_x = ens.positions.reshape(-1, ens.dim)
    flat_p = ens.momenta.reshape(-1, ens.dim)
    h = eval_hamiltonian(ens.consts, ens.fields, flat_x, flat_p, ens.time)
    total = h.reshape(ens.size, ens.n_particles).sum(axis=1)
    if ens.pair is not None:
        for a, b in itertools.combinations(range(ens.n_particles), 2):
            total += ens.pair.value(ens.positions[:, a, :] - ens.positions[:, b, :])
    return float(total.mean())


@dataclass
class ManyBodyWaveFunction(WaveFunction):
    """Amplitude over the flattened (N*D)-dimensional configuration grid.

    Axis ordering is particle-major: flat axis = particle * D + axis.
    """

    n_particles: int = 1
    particle_dim: int = 1
    masses: tuple = ()

    def __post_init__(self):
        if self.n_particles * self.particle_dim != len(self.axes):
            raise ValueError("axes must cover n_particles x particle_dim")
        if self.n_particles * self.particle_dim > 4:
            raise ValueError("grid states are capped at N*D <= 4")
        if not self.masses:
            object.__setattr__(self, "masses", (1.0,) * self.n_particles)


def mb_product_state(factors, n_particles, particle_dim, masses=()):
    """Tensor product of per-flat-axis 1D amplitudes (axes, values)."""
    amp = None
    axes = []
    for ax, vals in factors:
        axes.append(np.asarray(ax, dtype=float))
        v = np.asarray(vals, dtype=complex)
        amp = v if amp is None else np.multiply.outer(amp, v)
    wf = ManyBodyWaveFunction(amp, tuple(axes), 0.0, n_particles,
                              particle_dim, tuple(masses))
    return wf.normalized()


def mb_tensor_from_psi(psi, method="spectral"):
    """T_{(a i)(b j)} over the configuration grid, shaped
    (N*D, N*D, *grid); symmetric, and real for real amplitudes."""
    amp = psi.amplitude
    hs = psi.spacings()
    n_flat = len(psi.axes)
    grads = [derivative(amp, hs[m], axis=m, order=1, method=method)
             for m in range(n_flat)]
    out = np.empty((n_flat, n_flat) + amp.shape, dtype=complex)
    for m in range(n_flat):
        for n in range(m, n_flat):
            second = derivative(grads[m], hs[n], axis=n, order=1, method=method)
            t = 0.25 * (np.conj(amp) * second + amp * np.conj(second)
                        - np.conj(grads[m]) * grads[n]
                        - grads[m] * np.conj(grads[n]))
            out[m, n] = t
            out[n, m] = t
    return out


def mb_L2_classical(psi, consts, method="spectral"):
    """Classical squared total angular momentum from the pair tensor:

        -hbar^2 int sum_{ab,ij} (x_{ai} x_{bi} T_{(aj)(bj)}
                                 - x_{ai} x_{bj} T_{(aj)(bi)}) dX

    Equals the quantum total <L~^2> plus N (hbar^2/2) D(D-1)/2.  Tensor
    elements are built lazily and reduced to scalars immediately; the
    full (N D)^2 tensor never sits in memory.
    """
    n, d = psi.n_particles, psi.particle_dim
    amp = psi.amplitude
    hs = psi.spacings()
    mesh = np.meshgrid(*psi.axes, indexing="ij", sparse=True)
    vol = psi.cell_volume()
    n_flat = len(psi.axes)
    grads = [derivative(amp, hs[m], axis=m, order=1, method=method)
             for m in range(n_flat)]
    cache = {}

    def t_elem(m, m2):
        key = (min(m, m2), max(m, m2))
        if key not in cache:
            m_lo, m_hi = key
            second = derivative(grads[m_lo], hs[m_hi], axis=m_hi, order=1,
                                method=method)
            cache[key] = 0.25 * (np.conj(amp) * second + amp * np.conj(second)
                                 - np.conj(grads[m_lo]) * grads[m_hi]
                                 - grads[m_lo] * np.conj(grads[m_hi]))
        return cache[key]

    def flat(a, i):
        return a * d + i

    total = 0.0 + 0.0j
    for a in range(n):
        for b in range(n):
            dot_ab = sum(mesh[flat(a, i)] * mesh[flat(b, i)] for i in range(d))
            for j in range(d):
                total += np.sum(dot_ab * t_elem(flat(a, j), flat(b, j)))
            for i in range(d):
                for j in range(d):
                    total -= np.sum(mesh[flat(a, i)] * mesh[flat(b, j)]
                                    * t_elem(flat(a, j), flat(b, i)))
    return float(np.real(-consts.hbar**2 * total * vol))


def mb_chi4_symmetric(alpha, beta, gamma, delta, i, j, k, l):
    """Symmetric ordering of x_{alpha i} x_{beta j} p_{gamma l} p_{delta k}
    via the permutation oracle (tagged letters)."""
    word = (x_letter(i, alpha), x_letter(j, beta),
            p_letter(l, gamma), p_letter(k, delta))
    return symmetrize_word(word)


def mb_chi4_closed_form(alpha, beta, gamma, delta, i, j, k, l):
    """Closed-form normal ordering of the many-body fourth-order
    symmetric monomial; the label pattern extends the single-particle
    form with full (particle, axis) Kronecker deltas:

        x_A x_B p_C p_D
      + (hbar/2i) [d_BC x_A p_D + d_AC x_B p_D + d_BD x_A p_C + d_AD x_B p_C]
      - (hbar^2/4) (d_AC d_BD + d_AD d_BC)

    with A = (alpha, i), B = (beta, j), C = (gamma, l), D = (delta, k).
    """
    a_, b_ = (alpha, i), (beta, j)
    c_, d_ = (gamma, l), (delta, k)
    half_over_i = HBAR / (2 * sympy.I)

    poly = OperatorPolynomial.from_word(
        (x_letter(i, alpha), x_letter(j, beta),
         p_letter(l, gamma), p_letter(k, delta)))
    pairs = [(b_, c_, (x_letter(i, alpha), p_letter(k, delta))),
             (a_, c_, (x_letter(j, beta), p_letter(k, delta))),
             (b_, d_, (x_letter(i, alpha), p_letter(l, gamma))),
             (a_, d_, (x_letter(j, beta), p_letter(l, gamma)))]
    for left, right, remainder in pairs:
        if left == right:
            poly = poly + OperatorPolynomial.from_word(remainder, half_over_i)
    const = sympy.Integer((a_ == c_) * (b_ == d_) + (a_ == d_) * (b_ == c_))
    if const != 0:
        poly = poly + OperatorPolynomial.identity(-HBAR**2 / 4 * const)
    return poly
