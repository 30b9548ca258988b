"""Wavefunction container and the analytic test-state catalog.

States used across the verification suite: Gaussian packets with linear
and quadratic phases, boxed plane waves (grid-commensurate wavevector),
and harmonic-oscillator eigenstates up to n = 2 per axis.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.special import eval_hermite


@dataclass
class WaveFunction:
    """Complex amplitude on a uniform D-dimensional grid (D in 1..3)."""

    amplitude: np.ndarray
    axes: tuple  # per-axis coordinate arrays
    time: float = 0.0

    @property
    def dim(self):
        return len(self.axes)

    def spacings(self):
        return tuple(float(a[1] - a[0]) for a in self.axes)

    def cell_volume(self):
        return float(np.prod(self.spacings()))

    def meshgrid(self):
        return np.meshgrid(*self.axes, indexing="ij")

    def points(self):
        """Grid points shaped (*grid, D) for field evaluation."""
        return np.stack(self.meshgrid(), axis=-1)

    def density(self):
        return np.abs(self.amplitude) ** 2

    def norm(self):
        return float(np.sum(self.density()) * self.cell_volume())

    def normalized(self):
        return replace(self, amplitude=self.amplitude / np.sqrt(self.norm()))


def uniform_axes(half_width, n, dim=1, endpoint=False):
    """Symmetric axes [-L, L) with n points each (periodic convention)."""
    ax = np.linspace(-half_width, half_width, n, endpoint=endpoint)
    return tuple(ax.copy() for _ in range(dim))


def gaussian_packet(axes, center=0.0, sigma=1.0, wavevector=0.0, quad_phase=0.0):
    """Normalized Gaussian exp(-(x-x0)^2/(4 sigma^2) + i k.x + i a (x-x0)^2).

    sigma is the position-density standard deviation per axis.
    """
    d = len(axes)
    center = np.broadcast_to(np.asarray(center, dtype=float), (d,))
    sigma = np.broadcast_to(np.asarray(sigma, dtype=float), (d,))
    wavevector = np.broadcast_to(np.asarray(wavevector, dtype=float), (d,))
    quad_phase = np.broadcast_to(np.asarray(quad_phase, dtype=float), (d,))
    mesh = np.meshgrid(*axes, indexing="ij")
    psi = np.ones_like(mesh[0], dtype=complex)
    for j in range(d):
        u = mesh[j] - center[j]
        psi = psi * np.exp(-u**2 / (4.0 * sigma[j] ** 2)
                           + 1j * wavevector[j] * mesh[j]
                           + 1j * quad_phase[j] * u**2)
    return WaveFunction(psi, tuple(axes)).normalized()


def box_wavevector(axes, mode_numbers):
    """Wavevector commensurate with the periodic box: k_j = 2 pi n_j / L_j."""
    modes = np.atleast_1d(mode_numbers)
    return np.array([2.0 * np.pi * n / (len(ax) * (ax[1] - ax[0]))
                     for n, ax in zip(modes, axes)])


def plane_wave(axes, mode_numbers):
    """Normalized periodic plane wave with integer mode numbers."""
    k = box_wavevector(axes, mode_numbers)
    mesh = np.meshgrid(*axes, indexing="ij")
    phase = sum(k[j] * mesh[j] for j in range(len(axes)))
    return WaveFunction(np.exp(1j * phase), tuple(axes)).normalized(), k


def harmonic_eigenstate(axes, quanta, omega, consts):
    """Product of 1D oscillator eigenstates, one quantum number per axis."""
    quanta = np.broadcast_to(np.asarray(quanta, dtype=int), (len(axes),))
    omega = np.broadcast_to(np.asarray(omega, dtype=float), (len(axes),))
    mesh = np.meshgrid(*axes, indexing="ij")
    psi = np.ones_like(mesh[0], dtype=complex)
    for j, n in enumerate(quanta):
        scale = np.sqrt(consts.mass * omega[j] / consts.hbar)
        xi = scale * mesh[j]
        psi = psi * eval_hermite(int(n), xi) * np.exp(-0.5 * xi**2)
    return WaveFunction(psi, tuple(axes)).normalized()


def ground_state_sigma(omega, consts):
    """Position std of the oscillator ground state, sqrt(hbar/(2 mu w))."""
    return np.sqrt(consts.hbar / (2.0 * consts.mass * omega))
