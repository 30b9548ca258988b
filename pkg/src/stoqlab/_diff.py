"""Grid differentiation helpers shared by the field-equation machinery.

Two policies: "spectral" (FFT, assumes the data has decayed to ~0 at the
domain edge or is periodic) and "fd4" (fourth-order central stencil with
zero extension outside the grid).  Real input comes back real.
"""

from __future__ import annotations

import numpy as np


def spectral_derivative(arr, dx, axis=0, order=1):
    n = arr.shape[axis]
    k = 2.0 * np.pi * np.fft.fftfreq(n, d=dx)
    shape = [1] * arr.ndim
    shape[axis] = n
    mult = (1j * k.reshape(shape)) ** order
    if order % 2 == 0 and n % 2 == 0:
        # even derivative: keep the Nyquist mode real
        mult = mult.real.astype(complex)
    out = np.fft.ifft(np.fft.fft(arr, axis=axis) * mult, axis=axis)
    if np.isrealobj(arr):
        return out.real
    return out


def _shift_zero(arr, offset, axis):
    """arr sampled at index+offset with zeros outside the grid."""
    out = np.zeros_like(arr)
    n = arr.shape[axis]
    if abs(offset) >= n:
        return out
    src = [slice(None)] * arr.ndim
    dst = [slice(None)] * arr.ndim
    if offset >= 0:
        src[axis] = slice(offset, n)
        dst[axis] = slice(0, n - offset)
    else:
        src[axis] = slice(0, n + offset)
        dst[axis] = slice(-offset, n)
    out[tuple(dst)] = arr[tuple(src)]
    return out


def fd4_derivative(arr, dx, axis=0, order=1):
    p1 = _shift_zero(arr, 1, axis)
    m1 = _shift_zero(arr, -1, axis)
    p2 = _shift_zero(arr, 2, axis)
    m2 = _shift_zero(arr, -2, axis)
    if order == 1:
        return (-p2 + 8.0 * p1 - 8.0 * m1 + m2) / (12.0 * dx)
    if order == 2:
        return (-p2 + 16.0 * p1 - 30.0 * arr + 16.0 * m1 - m2) / (12.0 * dx * dx)
    raise ValueError("fd4 supports derivative order 1 or 2")


def derivative(arr, dx, axis=0, order=1, method="spectral"):
    if method == "spectral":
        return spectral_derivative(arr, dx, axis=axis, order=order)
    if method == "fd4":
        return fd4_derivative(arr, dx, axis=axis, order=order)
    raise ValueError(f"unknown differentiation method {method!r}")
