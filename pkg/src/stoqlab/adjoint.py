"""Momentum-adjoint machinery: the Fourier transform of the phase-space
density in p, its Taylor coefficients around y = 0, the coefficient
recursion evaluated as a residual operator, and the closed-form current /
correlation-tensor reconstructions from the amplitude.

Coefficients are scaled momentum moments,

    phi_alpha(x) = (-i/hbar)^|alpha| / prod(alpha_j!) int p^alpha Phi d^Dp,

and are computed from moments directly (never by differentiating a
sampled transform in y, which would amplify ensemble noise).  The
recursion is evaluated for consistency checks only; time integration of
the truncated hierarchy is deliberately not provided, since the hierarchy
is closed through the amplitude ansatz instead.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from ._diff import derivative
from .model import EffectivePotential
from .states import WaveFunction


class AliasingError(ValueError):
    """Momentum support too wide for the requested adjoint lattice."""


def adjoint_transform(grid, consts, y):
    """phi(x, y) = sum_p Phi(x, p) exp(-i p y / hbar) dp, per x row.

    y is the adjoint lattice (1D array).  Raises AliasingError when the
    momentum lattice cannot resolve oscillations exp(-i p dy / hbar).
    """
    y = np.asarray(y, dtype=float)
    if len(y) > 1:
        dy = np.max(np.abs(np.diff(y)))
        p_max = float(np.max(np.abs(grid.p)))
        if p_max * dy / consts.hbar > np.pi:
            raise AliasingError(
                f"momentum support {p_max:g} exceeds the Nyquist bound "
                f"pi hbar / dy = {np.pi * consts.hbar / dy:g}")
    kernel = np.exp(-1j * np.outer(grid.p, y) / consts.hbar)
    return grid.density @ kernel * grid.dp


@dataclass
class CoefficientTable:
    """Taylor coefficients of the adjoint-space expansion.

    coeffs maps index tuples (one entry per spatial dimension, all
    nonnegative) to complex fields over the spatial grid; order is the
    maximum total degree retained.
    """

    coeffs: dict
    axes: tuple
    order: int
    time: float = 0.0

    @property
    def dim(self):
        return len(self.axes)

    def __getitem__(self, alpha):
        return self.coeffs[tuple(alpha)]

    def __contains__(self, alpha):
        return tuple(alpha) in self.coeffs

    def spacings(self):
        return tuple(float(a[1] - a[0]) for a in self.axes)

    def indices(self):
        return sorted(self.coeffs)


def index_tuples(dim, order):
    """All nonnegative index tuples with total degree <= order."""
    out = []
    for total in range(order + 1):
        for alpha in itertools.product(range(total + 1), repeat=dim):
            if sum(alpha) == total:
                out.append(alpha)
    return out


def _coefficient_scale(alpha, hbar):
    denom = 1.0
    for a in alpha:
        denom *= math.factorial(a)
    return (-1j / hbar) ** sum(alpha) / denom


def taylor_coeffs_from_grid(grid, consts, order):
    """CoefficientTable from a 1D phase-space lattice."""
    coeffs = {}
    for alpha in index_tuples(1, order):
        mom = grid.density @ (grid.p ** alpha[0]) * grid.dp
        coeffs[alpha] = _coefficient_scale(alpha, consts.hbar) * mom.astype(complex)
    return CoefficientTable(coeffs, (grid.x,), order, grid.time)


def taylor_coeffs_from_ensemble(ens, x_edges, order):
    """CoefficientTable from a 1D trajectory ensemble binned in x.

    Moment densities are (1/M) sum_{i in bin} p_i^alpha / dx, so the
    zeroth coefficient integrates to the retained mass.
    """
    if ens.dim != 1:
        raise ValueError("ensemble coefficient tables are 1D")
    x_edges = np.asarray(x_edges, dtype=float)
    dx = x_edges[1] - x_edges[0]
    centers = 0.5 * (x_edges[1:] + x_edges[:-1])
    x = ens.positions[:, 0]
    p = ens.momenta[:, 0]
    coeffs = {}
    for alpha in index_tuples(1, order):
        w = p ** alpha[0]
        hist, _ = np.histogram(x, bins=x_edges, weights=w)
        mom = hist / (ens.size * dx)
        coeffs[alpha] = (_coefficient_scale(alpha, ens.consts.hbar)
                         * mom.astype(complex))
    return CoefficientTable(coeffs, (centers,), order, ens.time)


def taylor_coeffs_from_moments(axes, moment_fn, order, consts, time=0.0):
    """CoefficientTable from analytic momentum-moment densities.

    moment_fn(alpha) must return int p^alpha Phi(x, p) d^Dp on the
    spatial grid (unnormalized by the spatial density).
    """
    dim = len(axes)
    coeffs = {}
    for alpha in index_tuples(dim, order):
        mom = np.asarray(moment_fn(alpha), dtype=complex)
        coeffs[alpha] = _coefficient_scale(alpha, consts.hbar) * mom
    return CoefficientTable(coeffs, tuple(axes), order, time)


def taylor_coeffs(source, order, consts=None, **kwargs):
    """Dispatch on the source type (grid, ensemble, or moment function)."""
    from .fpe import PhaseSpaceGrid
    from .sde import TrajectoryEnsemble

    if isinstance(source, PhaseSpaceGrid):
        return taylor_coeffs_from_grid(source, consts, order)
    if isinstance(source, TrajectoryEnsemble):
        return taylor_coeffs_from_ensemble(source, kwargs["x_edges"], order)
    raise TypeError(f"cannot build coefficients from {type(source)!r}")


# -- closed forms from the amplitude -------------------------------------

def current_from_psi(psi, method="spectral"):
    """J = (Psi grad Psi* - Psi* grad Psi) / 2, shaped (D, *grid).

    Pointwise pure imaginary for any Psi.
    """
    amp = psi.amplitude
    hs = psi.spacings()
    out = np.empty((psi.dim,) + amp.shape, dtype=complex)
    for j in range(psi.dim):
        d = derivative(amp, hs[j], axis=j, order=1, method=method)
        out[j] = 0.5 * (amp * np.conj(d) - np.conj(amp) * d)
    return out


def tensor_from_psi(psi, method="spectral"):
    """T_jl = (Psi* d2Psi + Psi d2Psi* - dPsi* dPsi - dPsi dPsi*) / 4,
    shaped (D, D, *grid); symmetric and real for real Psi."""
    amp = psi.amplitude
    hs = psi.spacings()
    grads = [derivative(amp, hs[j], axis=j, order=1, method=method)
             for j in range(psi.dim)]
    out = np.empty((psi.dim, psi.dim) + amp.shape, dtype=complex)
    for j in range(psi.dim):
        djl = [derivative(grads[j], hs[l], axis=l, order=1, method=method)
               for l in range(j, psi.dim)]
        for l in range(j, psi.dim):
            second = djl[l - j]
            t = 0.25 * (np.conj(amp) * second + amp * np.conj(second)
                        - np.conj(grads[j]) * grads[l]
                        - grads[j] * np.conj(grads[l]))
            out[j, l] = t
            out[l, j] = t
    return out


def coefficient_table_from_psi(psi, consts, method="spectral"):
    """Order-2 table implied by the amplitude: phi_0 = |Psi|^2, first
    order the current, second order the tensor (diagonal carries 1/2)."""
    rho = psi.density().astype(complex)
    j_field = current_from_psi(psi, method=method)
    t_field = tensor_from_psi(psi, method=method)
    dim = psi.dim
    coeffs = {tuple([0] * dim): rho}
    for j in range(dim):
        e = [0] * dim
        e[j] = 1
        coeffs[tuple(e)] = j_field[j]
    for j in range(dim):
        for l in range(j, dim):
            e = [0] * dim
            e[j] += 1
            e[l] += 1
            coeffs[tuple(e)] = (0.5 * t_field[j, j] if j == l else t_field[j, l])
    return CoefficientTable(coeffs, psi.axes, 2, psi.time)


# -- the recursion, evaluated as a residual operator ----------------------

def recursion_rhs(table, consts, fields, t=None, method="spectral"):
    """Time derivatives of all coefficients whose raised neighbors are
    retained (total degree <= order - 1).

    Terms, for multi-index alpha over spatial axes j (unit vectors e_j):

      (hbar/(i mu)) sum_j (alpha_j + 1) d_j phi_{alpha+e_j}
    - (1/(i hbar)) sum_j (d_j U) phi_{alpha-e_j}
    + (e/(mu c)) sum_j alpha_j (d_j A_j) phi_alpha
    + (e/(mu c)) sum_{j != l} (alpha_j + 1)(d_l A_j) phi_{alpha+e_j-e_l}
    + (e/(mu c)) sum_j d_j (A_j phi_alpha)
    - (mu P / hbar^2) sum_j phi_{alpha-2 e_j}

    Lowering terms drop out when the index would go negative.
    """
    if t is None:
        t = table.time
    c = consts
    dim = table.dim
    hs = table.spacings()
    mesh = np.stack(np.meshgrid(*table.axes, indexing="ij"), axis=-1)
    u = EffectivePotential(c, fields)
    grad_u = u.gradient(mesh, t)
    a = fields.vector_potential(mesh, t)
    grad_a = fields.grad_vector_potential(mesh, t)
    coupling = c.charge / (c.mass * c.light_speed)

    def d(field, axis):
        return derivative(field, hs[axis], axis=axis, order=1, method=method)

    out = {}
    for alpha in table.indices():
        if sum(alpha) > table.order - 1:
            continue
        rhs = np.zeros_like(table[alpha])
        for j in range(dim):
            up = list(alpha)
            up[j] += 1
            if tuple(up) not in table:
                raise KeyError(f"missing neighbor {tuple(up)} for {alpha}")
            rhs = rhs + (c.hbar / (1j * c.mass)) * (alpha[j] + 1) \
                * d(table[tuple(up)], j)
            if alpha[j] >= 1:
                down = list(alpha)
                down[j] -= 1
                rhs = rhs - grad_u[..., j] * table[tuple(down)] / (1j * c.hbar)
            rhs = rhs + coupling * alpha[j] * grad_a[..., j, j] * table[alpha]
            for l in range(dim):
                if l == j or alpha[l] < 1:
                    continue
                shift = list(alpha)
                shift[j] += 1
                shift[l] -= 1
                rhs = rhs + coupling * (alpha[j] + 1) * grad_a[..., j, l] \
                    * table[tuple(shift)]
            rhs = rhs + coupling * d(a[..., j] * table[alpha], j)
            if alpha[j] >= 2:
                down2 = list(alpha)
                down2[j] -= 2
                rhs = rhs - (c.mass * c.vacuum_power / c.hbar**2) \
                    * table[tuple(down2)]
        out[alpha] = rhs
    return CoefficientTable(out, table.axes, table.order - 1, t)


# -- consistency of the vacuum-power-independent subsystem ----------------

@dataclass
class SubsystemResiduals:
    """Residual fields and integral norms of the density / current pair
    of evolution identities evaluated on an amplitude triple."""

    density_residual: np.ndarray
    current_residual: np.ndarray  # (D, *grid)
    density_norm: float
    current_norm: float
    density_scale: float
    current_scale: float


def _l2(field, volume):
    return float(np.sqrt(np.sum(np.abs(field) ** 2) * volume))


def consistency_check_P_independent(psi_minus, psi_zero, psi_plus, consts,
                                    fields, method="fd4"):
    """Residuals of the density and current evolution identities at the
    middle time, with time derivatives by central differences.

    density:  d rho/dt = (hbar/(i mu)) div J + (e/(mu c)) div(A rho)
    current:  d J_l/dt = (hbar/(i mu)) sum_j d_j T_lj
                         - (1/(i hbar)) rho d_l U
                         + (e/(mu c)) sum_j d_j (A_j J_l)
                         + (e/(mu c)) sum_j (d_l A_j) J_j
    """
    dt_minus = psi_zero.time - psi_minus.time
    dt_plus = psi_plus.time - psi_zero.time
    if not np.isclose(dt_minus, dt_plus):
        raise ValueError("amplitude snapshots must be equally spaced in time")
    two_dt = psi_plus.time - psi_minus.time
    c = consts
    hs = psi_zero.spacings()
    vol = psi_zero.cell_volume()
    pts = psi_zero.points()
    t = psi_zero.time

    rho_dot = (psi_plus.density() - psi_minus.density()) / two_dt
    j_minus = current_from_psi(psi_minus, method=method)
    j_plus = current_from_psi(psi_plus, method=method)
    j_dot = (j_plus - j_minus) / two_dt

    rho = psi_zero.density()
    j_field = current_from_psi(psi_zero, method=method)
    t_field = tensor_from_psi(psi_zero, method=method)
    a = fields.vector_potential(pts, t)
    u = EffectivePotential(c, fields)
    grad_u = u.gradient(pts, t)
    grad_a = fields.grad_vector_potential(pts, t)
    coupling = c.charge / (c.mass * c.light_speed)

    def d(field, axis):
        return derivative(field, hs[axis], axis=axis, order=1, method=method)

    div_j = sum(d(j_field[j], j) for j in range(psi_zero.dim))
    div_a_rho = sum(d(a[..., j] * rho, j) for j in range(psi_zero.dim))
    rhs_density = (c.hbar / (1j * c.mass)) * div_j + coupling * div_a_rho
    res_density = rho_dot - rhs_density

    res_current = np.empty_like(j_field)
    rhs_current = np.empty_like(j_field)
    for l in range(psi_zero.dim):
        rhs = (c.hbar / (1j * c.mass)) * sum(
            d(t_field[l, j], j) for j in range(psi_zero.dim))
        rhs = rhs - rho * grad_u[..., l] / (1j * c.hbar)
        rhs = rhs + coupling * sum(
            d(a[..., j] * j_field[l], j) for j in range(psi_zero.dim))
        rhs = rhs + coupling * sum(
            grad_a[..., j, l] * j_field[j] for j in range(psi_zero.dim))
        rhs_current[l] = rhs
        res_current[l] = j_dot[l] - rhs

    return SubsystemResiduals(
        density_residual=res_density,
        current_residual=res_current,
        density_norm=_l2(res_density, vol),
        current_norm=_l2(res_current, vol * psi_zero.dim),
        density_scale=max(_l2(rho_dot, vol), _l2(rhs_density, vol)),
        current_scale=max(_l2(j_dot, vol * psi_zero.dim),
                          _l2(rhs_current, vol * psi_zero.dim)),
    )
