"""Propagators for the amplitude field equation

    i hbar dPsi/dt = (1/2mu) (-i hbar grad - (e/c) A)^2 Psi + V Psi

Two schemes: a Strang split-step spectral propagator (A = 0 only, used
where tight tolerances matter) and Crank-Nicolson with the minimal
coupling stencil for A != 0.  The CN operator is assembled Hermitian
(symmetrized A.grad term), so the update is unitary in the lattice inner
product and the norm drift is set by the linear solve, here a direct
sparse factorization.
"""

from __future__ import annotations

from dataclasses import replace

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .model import PhysicalConstants, FieldSpec, EffectivePotential
from .states import WaveFunction


def _has_vector_potential(fields):
    if fields.kind in ("free", "harmonic", "linear"):
        return False
    if fields.kind == "grid_table":
        return fields.params["table"].vector_potential_table is not None
    return True


def wavevectors(psi):
    """FFT angular-frequency grids, one per axis."""
    return [2.0 * np.pi * np.fft.fftfreq(len(ax), d=ax[1] - ax[0])
            for ax in psi.axes]


class SplitStepSolver:
    """Second-order Strang splitting in a periodic box; requires A = 0."""

    def __init__(self, psi, consts, fields, dt):
        if _has_vector_potential(fields):
            raise ValueError("split-step spectral scheme requires A = 0")
        self.consts = consts
        self.fields = fields
        self.dt = dt
        v = fields.potential(psi.points(), psi.time)
        self._exp_v_half = np.exp(-0.5j * dt / consts.hbar * v)
        ks = wavevectors(psi)
        k2 = sum(np.meshgrid(*[k**2 for k in ks], indexing="ij"))
        self._exp_kinetic = np.exp(-0.5j * consts.hbar * dt / consts.mass * k2)

    def step(self, psi):
        amp = self._exp_v_half * psi.amplitude
        amp = np.fft.ifftn(self._exp_kinetic * np.fft.fftn(amp))
        amp = self._exp_v_half * amp
        return replace(psi, amplitude=amp, time=psi.time + self.dt)


def _central_difference_matrix(n, h):
    return sp.diags([-1.0, 1.0], [-1, 1], shape=(n, n), format="csr") / (2.0 * h)


def _laplacian_matrix(n, h):
    return sp.diags([1.0, -2.0, 1.0], [-1, 0, 1], shape=(n, n),
                    format="csr") / (h * h)


class CrankNicolsonSolver:
    """(1 + i dt M/2hbar) Psi' = (1 - i dt M/2hbar) Psi with Dirichlet
    boundaries; handles arbitrary static fields including A != 0."""

    def __init__(self, psi, consts, fields, dt):
        self.consts = consts
        self.fields = fields
        self.dt = dt
        self._shape = psi.amplitude.shape
        self._time_dependent = fields.kind == "plane_wave_a"
        if not self._time_dependent:
            self._build(psi, psi.time)

    def _build(self, psi, t):
        c = self.consts
        d = psi.dim
        hs = psi.spacings()
        n_total = int(np.prod(self._shape))
        pts = psi.points()

        # kinetic: -hbar^2/(2 mu) Laplacian
        lap = None
        for axis in range(d):
            mats = [sp.identity(self._shape[k], format="csr") for k in range(d)]
            mats[axis] = _laplacian_matrix(self._shape[axis], hs[axis])
            term = mats[0]
            for m in mats[1:]:
                term = sp.kron(term, m, format="csr")
            lap = term if lap is None else lap + term
        ham = (-c.hbar**2 / (2.0 * c.mass)) * lap

        # minimal coupling: -(e/2 mu c)(pi.A + A.pi) + e^2 A^2/(2 mu c^2),
        # pi = -i hbar grad; symmetrized so the operator stays Hermitian
        if _has_vector_potential(self.fields):
            a = self.fields.vector_potential(pts, t)
            coef = c.charge / (2.0 * c.mass * c.light_speed)
            for axis in range(d):
                mats = [sp.identity(self._shape[k], format="csr") for k in range(d)]
                mats[axis] = _central_difference_matrix(self._shape[axis], hs[axis])
                grad = mats[0]
                for m in mats[1:]:
                    grad = sp.kron(grad, m, format="csr")
                a_diag = sp.diags(a[..., axis].ravel())
                sym = a_diag @ grad + grad @ a_diag
                ham = ham + coef * (1j * c.hbar) * sym
            a2 = np.sum(a * a, axis=-1).ravel()
            ham = ham + sp.diags(c.charge**2 / (2.0 * c.mass * c.light_speed**2) * a2)

        v = self.fields.potential(pts, t).ravel()
        ham = ham + sp.diags(v)

        lam = 0.5j * self.dt / c.hbar
        eye = sp.identity(n_total, format="csc")
        self._rhs = (eye - lam * ham).tocsr()
        self._lu = splu((eye + lam * ham).tocsc())

    def step(self, psi):
        if self._time_dependent:
            self._build(psi, psi.time + 0.5 * self.dt)
        flat = psi.amplitude.ravel()
        amp = self._lu.solve(self._rhs @ flat).reshape(self._shape)
        return replace(psi, amplitude=amp, time=psi.time + self.dt)


def make_solver(psi, consts, fields, dt, scheme="auto"):
    if scheme == "auto":
        scheme = "cn" if _has_vector_potential(fields) else "spectral"
    if scheme == "spectral":
        return SplitStepSolver(psi, consts, fields, dt)
    if scheme == "cn":
        return CrankNicolsonSolver(psi, consts, fields, dt)
    raise ValueError(f"unknown scheme {scheme!r}")


def evolve_psi(psi, consts, fields, dt, n_steps, scheme="auto",
               callback=None, norm_tolerance=None):
    """Propagate n_steps; optional per-step callback(step, psi).

    With norm_tolerance set, a norm drift beyond it raises RuntimeError.
    """
    solver = make_solver(psi, consts, fields, dt, scheme)
    norm0 = psi.norm()
    for step in range(1, n_steps + 1):
        psi = solver.step(psi)
        if norm_tolerance is not None and abs(psi.norm() - norm0) > norm_tolerance:
            raise RuntimeError(f"norm drift beyond {norm_tolerance:g} "
                               f"at step {step}")
        if callback is not None:
            callback(step, psi)
    return psi


# -- spectral operator application and expectation values ----------------

def momentum_apply(psi, consts, axis):
    """pi_j Psi = -i hbar dPsi/dx_j via FFT."""
    ks = wavevectors(psi)
    shape = [1] * psi.dim
    shape[axis] = len(ks[axis])
    mult = consts.hbar * ks[axis].reshape(shape)
    return np.fft.ifft(mult * np.fft.fft(psi.amplitude, axis=axis), axis=axis)


def apply_hamiltonian(psi, consts, fields, t=None):
    """M Psi with M = (1/2mu)(pi - (e/c)A)^2 + V, spectral derivatives."""
    if t is None:
        t = psi.time
    pts = psi.points()
    a = fields.vector_potential(pts, t)
    ec = consts.charge / consts.light_speed
    acc = np.zeros_like(psi.amplitude)
    for j in range(psi.dim):
        w = momentum_apply(psi, consts, j) - ec * a[..., j] * psi.amplitude
        wf = replace(psi, amplitude=w)
        acc = acc + momentum_apply(wf, consts, j) - ec * a[..., j] * w
    return acc / (2.0 * consts.mass) + fields.potential(pts, t) * psi.amplitude


def inner_product(psi, phi_amplitude):
    return complex(np.sum(np.conj(psi.amplitude) * phi_amplitude)
                   * psi.cell_volume())


def hamiltonian_expectation(psi, consts, fields):
    """<Psi| M |Psi>, real up to roundoff for Hermitian M."""
    return float(np.real(inner_product(psi, apply_hamiltonian(psi, consts, fields))))


def position_expectation(psi):
    rho = psi.density()
    vol = psi.cell_volume()
    mesh = psi.meshgrid()
    return np.array([float(np.sum(mesh[j] * rho) * vol) for j in range(psi.dim)])


def momentum_expectation(psi, consts):
    return np.array([
        float(np.real(inner_product(psi, momentum_apply(psi, consts, j))))
        for j in range(psi.dim)])


def kinetic_momentum_expectation(psi, consts, fields):
    """<p - (e/c) A> = mu <v>."""
    a = fields.vector_potential(psi.points(), psi.time)
    rho = psi.density()
    vol = psi.cell_volume()
    p = momentum_expectation(psi, consts)
    ec = consts.charge / consts.light_speed
    return p - ec * np.array([float(np.sum(a[..., j] * rho) * vol)
                              for j in range(psi.dim)])


def commutator_check(psi, consts, fields):
    """Both sides of the [M, pi_j] integral identity, per component.

    left_j  = int Psi* (M pi_j - pi_j M) Psi
    right_j = -(hbar/i) int (dU/dx_j) |Psi|^2
              - (e hbar^2 / 2 mu c) int (dA_l/dx_j)(Psi* d_l Psi - Psi d_l Psi*)

    Returns (left, right, residual) as complex (D,) arrays.
    """
    c = consts
    pts = psi.points()
    u = EffectivePotential(c, fields)
    grad_u = u.gradient(pts, psi.time)
    grad_a = fields.grad_vector_potential(pts, psi.time)
    rho = psi.density()
    vol = psi.cell_volume()

    m_psi = replace(psi, amplitude=apply_hamiltonian(psi, consts, fields))
    grads = [momentum_apply(psi, consts, j) / (-1j * c.hbar)
             for j in range(psi.dim)]  # dPsi/dx_j

    left = np.empty(psi.dim, dtype=complex)
    right = np.empty(psi.dim, dtype=complex)
    for j in range(psi.dim):
        pi_psi = replace(psi, amplitude=momentum_apply(psi, consts, j))
        m_pi = apply_hamiltonian(pi_psi, consts, fields)
        pi_m = momentum_apply(m_psi, consts, j)
        left[j] = inner_product(psi, m_pi - pi_m)

        term1 = -(c.hbar / 1j) * np.sum(grad_u[..., j] * rho) * vol
        bracket = sum(grad_a[..., l, j]
                      * (np.conj(psi.amplitude) * grads[l]
                         - psi.amplitude * np.conj(grads[l]))
                      for l in range(psi.dim))
        term2 = -(c.charge * c.hbar**2 / (2.0 * c.mass * c.light_speed)) \
            * np.sum(bracket) * vol
        right[j] = term1 + term2
    return left, right, left - right
