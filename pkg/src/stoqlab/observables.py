"""Expectation values three ways: classical phase-space averages, quantum
operator averages, and symmetric-ordered operator averages.

The closed-form normal ordering of the symmetrized fourth-order monomial
is hand-coded here (chi4_closed_form) and kept independent of the
permutation-averaging oracle in `ordering`, so the two routes check each
other.  Grid evaluation applies canonical words to the amplitude with
spectral derivatives; everything symbolic stays exact until this point.
"""

from __future__ import annotations

import numpy as np
import sympy

from . import ordering
from .adjoint import tensor_from_psi
from .ordering import (HBAR, OperatorPolynomial, p_letter, x_letter,
                       symmetrize_word)
from .qsolver import momentum_apply
from .states import WaveFunction


def _coeff_value(coeff, consts):
    return complex(coeff.subs(HBAR, consts.hbar))


def _classical_word_ensemble(word, ens):
    x, p = ens.positions, ens.momenta
    if x.ndim == 2:  # single particle (M, D)
        x = x[:, None, :]
        p = p[:, None, :]
    vals = np.ones(x.shape[0])
    for kind, particle, axis in word:
        vals = vals * (x[:, particle, axis] if kind == "x" else p[:, particle, axis])
    return vals


def classical_expectation(source, observable, consts=None):
    """Average of a classical phase-space polynomial (or callable).

    source: TrajectoryEnsemble (Monte Carlo mean) or PhaseSpaceGrid
    (quadrature).  An OperatorPolynomial observable is read classically:
    words become commuting monomials, hbar in coefficients is substituted
    from consts.
    """
    from .fpe import PhaseSpaceGrid
    from .sde import TrajectoryEnsemble

    if isinstance(source, TrajectoryEnsemble) or (
            hasattr(source, "positions") and hasattr(source, "momenta")):
        if callable(observable):
            return float(np.mean(observable(source.positions, source.momenta)))
        total = 0.0 + 0.0j
        for word, coeff in observable.terms.items():
            c = _coeff_value(coeff, consts if consts is not None else source.consts)
            total += c * np.mean(_classical_word_ensemble(word, source))
        return total.real if abs(total.imag) < 1e-12 * max(1.0, abs(total)) else total
    if isinstance(source, PhaseSpaceGrid):
        xx, pp = np.meshgrid(source.x, source.p, indexing="ij")
        area = source.cell_area()
        if callable(observable):
            return float(np.sum(observable(xx, pp) * source.density) * area)
        total = 0.0 + 0.0j
        for word, coeff in observable.terms.items():
            vals = np.ones_like(xx)
            for kind, particle, axis in word:
                if particle != 0 or axis != 0:
                    raise ValueError("grid sources are single-particle 1D")
                vals = vals * (xx if kind == "x" else pp)
            total += _coeff_value(coeff, consts) * np.sum(vals * source.density) * area
        return total.real if abs(total.imag) < 1e-12 * max(1.0, abs(total)) else total
    raise TypeError(f"unsupported source {type(source)!r}")


def _flat_axis(psi, particle, axis):
    """Map a letter's (particle, axis) onto the grid axis index."""
    n_particles = getattr(psi, "n_particles", 1)
    dim = psi.dim if n_particles == 1 else psi.particle_dim
    if particle >= n_particles or axis >= dim:
        raise ValueError(
            f"letter (particle={particle}, axis={axis}) outside the "
            f"state's {n_particles} particle(s) x {dim} axes")
    return particle * dim + axis


def apply_word(psi, word, consts):
    """Apply a canonical word to the amplitude, rightmost letter first.

    Position letters multiply by the coordinate, momentum letters apply
    -i hbar d/dx via FFT.  Returns the resulting array.
    """
    amp = psi.amplitude
    mesh = psi.meshgrid()
    work = WaveFunction(amp, psi.axes, psi.time)
    for kind, particle, axis in reversed(word):
        flat = _flat_axis(psi, particle, axis)
        if kind == "x":
            work = WaveFunction(mesh[flat] * work.amplitude, psi.axes, psi.time)
        else:
            work = WaveFunction(momentum_apply(work, consts, flat),
                                psi.axes, psi.time)
    return work.amplitude


def quantum_expectation(psi, operator, consts):
    """<Psi| operator |Psi> for a canonical OperatorPolynomial."""
    vol = psi.cell_volume()
    total = 0.0 + 0.0j
    for word, coeff in operator.terms.items():
        applied = apply_word(psi, word, consts)
        total += (_coeff_value(coeff, consts)
                  * complex(np.sum(np.conj(psi.amplitude) * applied) * vol))
    return total


def expectation_real(psi, operator, consts):
    return float(np.real(quantum_expectation(psi, operator, consts)))


# -- squared angular momentum, classical route ----------------------------

def L2_classical(psi, consts, method="spectral"):
    """Classical phase-space <L^2> reconstructed from the amplitude:

        -hbar^2 int (x_j x_j T_kk - x_j x_k T_jk) d^3x

    Requires a 3D single-particle state wide enough for the x^2-weighted
    tails.
    """
    if psi.dim != 3 or getattr(psi, "n_particles", 1) != 1:
        raise ValueError("L2_classical takes a single-particle 3D state")
    t = tensor_from_psi(psi, method=method)
    mesh = psi.meshgrid()
    vol = psi.cell_volume()
    r2 = sum(m * m for m in mesh)
    trace_t = sum(t[k, k] for k in range(3))
    integrand = r2 * trace_t
    for j in range(3):
        for k in range(3):
            integrand = integrand - mesh[j] * mesh[k] * t[j, k]
    value = -consts.hbar**2 * np.sum(integrand) * vol
    return float(np.real(value))


def quantum_l2(psi, consts):
    """<L~^2> via the canonical quantum operator."""
    dim = psi.dim if getattr(psi, "n_particles", 1) == 1 else psi.particle_dim
    op = ordering.angular_momentum_squared(dim)
    return float(np.real(quantum_expectation(psi, op, consts)))


# -- fourth-order symmetric correlations ----------------------------------

def chi4_closed_form(i, j, k, l):
    """Hand-coded normal ordering of the symmetrized monomial
    x_i x_j p_l p_k (single particle):

        x_i x_j p_l p_k
      + (hbar/2i) [(d_jl x_i + d_il x_j) p_k + (d_jk x_i + d_ik x_j) p_l]
      - (hbar^2/4) (d_il d_jk + d_ik d_jl)

    Independent of the permutation oracle; the two must agree exactly.
    """
    half_over_i = HBAR / (2 * sympy.I)
    poly = OperatorPolynomial.from_word(
        (x_letter(i), x_letter(j), p_letter(l), p_letter(k)))
    if j == l:
        poly = poly + OperatorPolynomial.from_word(
            (x_letter(i), p_letter(k)), half_over_i)
    if i == l:
        poly = poly + OperatorPolynomial.from_word(
            (x_letter(j), p_letter(k)), half_over_i)
    if j == k:
        poly = poly + OperatorPolynomial.from_word(
            (x_letter(i), p_letter(l)), half_over_i)
    if i == k:
        poly = poly + OperatorPolynomial.from_word(
            (x_letter(j), p_letter(l)), half_over_i)
    const = sympy.Integer((i == l) * (j == k) + (i == k) * (j == l))
    if const != 0:
        poly = poly + OperatorPolynomial.identity(-HBAR**2 / 4 * const)
    return poly


def chi4_symmetric_expectation(psi, i, j, k, l, consts):
    """<Psi| closed-form symmetric x_i x_j p_l p_k |Psi> (3D states)."""
    if psi.dim != 3:
        raise ValueError("the single-particle closed form is 3D")
    return quantum_expectation(psi, chi4_closed_form(i, j, k, l), consts)


def L2_symmetric_operator(n_particles=1, dim=3):
    """Symmetric-ordered squared total angular momentum (see `ordering`)."""
    return ordering.symmetric_l2_operator(n_particles, dim)
