"""Physical constants, external field presets, and Hamiltonian evaluation.

Every engine in the package evaluates the same phase-space Hamiltonian

    H(p, x, t) = |p - (e/c) A(x, t)|^2 / (2 mu) + V(x, t)

through the types defined here.  Units are Gaussian-style with the speed
of light kept explicit; the default configuration is hbar = mu = c = 1.
hbar is a physical parameter of the dynamics (the adjoint-space transform
is nonlinear in it), so it stays overridable rather than being absorbed
into units.

Positions are passed as arrays of shape (..., D) so a single code path
serves point evaluation, trajectory ensembles (M, D) and meshgrids.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import RegularGridInterpolator


class FieldDomainError(ValueError):
    """Raised when a tabulated field is evaluated outside its lattice."""


@dataclass(frozen=True)
class PhysicalConstants:
    """Dimensional backbone shared by all engines.

    vacuum_power is the rate P at which a particle absorbs energy from
    the fluctuating vacuum; P = 0 is the central limit case.
    """

    hbar: float = 1.0
    mass: float = 1.0
    charge: float = 1.0
    light_speed: float = 1.0
    vacuum_power: float = 0.0

    def __post_init__(self):
        if not (self.hbar > 0):
            raise ValueError(f"hbar must be positive, got {self.hbar}")
        if not (self.mass > 0):
            raise ValueError(f"mass must be positive, got {self.mass}")
        if not (self.light_speed > 0):
            raise ValueError(f"light_speed must be positive, got {self.light_speed}")
        if not (self.vacuum_power >= 0):
            raise ValueError(f"vacuum_power must be nonnegative, got {self.vacuum_power}")


def _as_points(x, dim):
    x = np.asarray(x, dtype=float)
    if x.ndim == 0 or x.shape[-1] != dim:
        raise ValueError(f"positions must have shape (..., {dim}), got {x.shape}")
    return x


@dataclass(frozen=True)
class GridTable:
    """Tabulated V (and optionally A) on a rectangular lattice.

    Values are interpolated (linear by default, cubic optional) and
    differentiated by central differences on the lattice.  Evaluation
    outside the table domain raises FieldDomainError.
    """

    axes: tuple
    potential_table: np.ndarray
    vector_potential_table: np.ndarray | None = None  # shape table + (D,)
    interpolation: str = "linear"

    def __post_init__(self):
        if self.interpolation not in ("linear", "cubic"):
            raise ValueError(f"unknown interpolation {self.interpolation!r}")

    def _interp(self, table):
        return RegularGridInterpolator(
            self.axes, table, method=self.interpolation, bounds_error=True
        )

    def _check_domain(self, x):
        for axis, lo_hi in enumerate(self.axes):
            lo, hi = lo_hi[0], lo_hi[-1]
            xi = x[..., axis]
            if np.any(xi < lo) or np.any(xi > hi):
                raise FieldDomainError(
                    f"position outside table domain on axis {axis}: "
                    f"[{lo}, {hi}]"
                )


class FieldSpec:
    """Scalar potential V(x, t) and vector potential A(x, t).

    Built through the preset constructors below.  Analytic presets return
    closed-form derivatives; grid tables differentiate their lattice by
    central differences.  All presets except the plane wave are static.
    """

    KINDS = ("free", "harmonic", "uniform_magnetic", "plane_wave_a", "linear",
             "grid_table")

    def __init__(self, kind, dim, **params):
        if kind not in self.KINDS:
            raise ValueError(f"unknown field kind {kind!r}; valid: {self.KINDS}")
        if dim < 1:
            raise ValueError("dim must be >= 1")
        self.kind = kind
        self.dim = dim
        self.params = params

    # -- presets -------------------------------------------------------

    @classmethod
    def free(cls, dim=3):
        return cls("free", dim)

    @classmethod
    def harmonic(cls, omega, dim=3, mass=1.0):
        """V = (mass/2) sum_j omega_j^2 x_j^2; omega scalar or per-axis."""
        omega = np.broadcast_to(np.asarray(omega, dtype=float), (dim,)).copy()
        return cls("harmonic", dim, omega=omega, mass=float(mass))

    @classmethod
    def uniform_magnetic(cls, b_field, dim=3):
        """Symmetric gauge A = B x r / 2 for a constant B.

        dim = 3 takes a 3-vector B; dim = 2 takes a scalar B_z.
        """
        if dim == 3:
            b = np.asarray(b_field, dtype=float).reshape(3)
        elif dim == 2:
            b = np.asarray([float(b_field)])
        else:
            raise ValueError("uniform_magnetic needs dim 2 or 3")
        return cls("uniform_magnetic", dim, b_field=b)

    @classmethod
    def plane_wave_a(cls, amplitude, wave_vector, frequency, polarization, dim=3):
        """A(x, t) = amplitude * polarization * cos(k.x - frequency t)."""
        k = np.asarray(wave_vector, dtype=float).reshape(dim)
        eps = np.asarray(polarization, dtype=float).reshape(dim)
        return cls("plane_wave_a", dim, amplitude=float(amplitude), k=k,
                   frequency=float(frequency), eps=eps)

    @classmethod
    def linear(cls, force, dim=1):
        """V = -force . x, i.e. a uniform force (uniform electric field)."""
        f = np.broadcast_to(np.asarray(force, dtype=float), (dim,)).copy()
        return cls("linear", dim, force=f)

    @classmethod
    def grid_table(cls, axes, potential_table, vector_potential_table=None,
                   interpolation="linear"):
        axes = tuple(np.asarray(a, dtype=float) for a in axes)
        table = GridTable(axes, np.asarray(potential_table, dtype=float),
                          None if vector_potential_table is None
                          else np.asarray(vector_potential_table, dtype=float),
                          interpolation)
        return cls("grid_table", len(axes), table=table)

    # -- evaluation ----------------------------------------------------

    def potential(self, x, t=0.0):
        """V(x, t); x shaped (..., D), returns (...,)."""
        x = _as_points(x, self.dim)
        if self.kind in ("free", "uniform_magnetic", "plane_wave_a"):
            return np.zeros(x.shape[:-1])
        if self.kind == "harmonic":
            w = self.params["omega"]
            return 0.5 * self.params["mass"] * np.sum((w * x) ** 2, axis=-1)
        if self.kind == "linear":
            return -np.sum(self.params["force"] * x, axis=-1)
        table = self.params["table"]
        table._check_domain(x)
        return table._interp(table.potential_table)(x)

    def vector_potential(self, x, t=0.0):
        """A(x, t); x shaped (..., D), returns (..., D)."""
        x = _as_points(x, self.dim)
        if self.kind in ("free", "harmonic", "linear"):
            return np.zeros_like(x)
        if self.kind == "uniform_magnetic":
            return self._magnetic_a(x)
        if self.kind == "plane_wave_a":
            p = self.params
            phase = np.sum(p["k"] * x, axis=-1) - p["frequency"] * t
            return p["amplitude"] * np.cos(phase)[..., None] * p["eps"]
        table = self.params["table"]
        table._check_domain(x)
        if table.vector_potential_table is None:
            return np.zeros_like(x)
        out = np.empty_like(x)
        for j in range(self.dim):
            out[..., j] = table._interp(table.vector_potential_table[..., j])(x)
        return out

    def _magnetic_a(self, x):
        b = self.params["b_field"]
        a = np.empty_like(x)
        if self.dim == 3:
            a[..., 0] = 0.5 * (b[1] * x[..., 2] - b[2] * x[..., 1])
            a[..., 1] = 0.5 * (b[2] * x[..., 0] - b[0] * x[..., 2])
            a[..., 2] = 0.5 * (b[0] * x[..., 1] - b[1] * x[..., 0])
        else:
            a[..., 0] = -0.5 * b[0] * x[..., 1]
            a[..., 1] = 0.5 * b[0] * x[..., 0]
        return a

    def grad_potential(self, x, t=0.0):
        """dV/dx_l; returns (..., D)."""
        x = _as_points(x, self.dim)
        if self.kind in ("free", "uniform_magnetic", "plane_wave_a"):
            return np.zeros_like(x)
        if self.kind == "harmonic":
            w = self.params["omega"]
            return self.params["mass"] * w**2 * x
        if self.kind == "linear":
            return np.broadcast_to(-self.params["force"], x.shape).copy()
        return self._table_derivative(self.params["table"].potential_table, x)

    def grad_vector_potential(self, x, t=0.0):
        """dA_j/dx_l as (..., D, D), component [..., j, l]."""
        x = _as_points(x, self.dim)
        d = self.dim
        out = np.zeros(x.shape[:-1] + (d, d))
        if self.kind == "uniform_magnetic":
            b = self.params["b_field"]
            if d == 3:
                # rows j: A_j = eps_{jlm} B_l x_m / 2
                out[..., 0, 1] = -0.5 * b[2]
                out[..., 0, 2] = 0.5 * b[1]
                out[..., 1, 0] = 0.5 * b[2]
                out[..., 1, 2] = -0.5 * b[0]
                out[..., 2, 0] = -0.5 * b[1]
                out[..., 2, 1] = 0.5 * b[0]
            else:
                out[..., 0, 1] = -0.5 * b[0]
                out[..., 1, 0] = 0.5 * b[0]
        elif self.kind == "plane_wave_a":
            p = self.params
            phase = np.sum(p["k"] * x, axis=-1) - p["frequency"] * t
            s = -p["amplitude"] * np.sin(phase)
            out[:] = s[..., None, None] * np.multiply.outer(p["eps"], p["k"])
        elif self.kind == "grid_table":
            table = self.params["table"]
            if table.vector_potential_table is not None:
                for j in range(d):
                    out[..., j, :] = self._table_derivative(
                        table.vector_potential_table[..., j], x)
        return out

    def dA_dt(self, x, t=0.0):
        """Partial time derivative of A; returns (..., D)."""
        x = _as_points(x, self.dim)
        if self.kind != "plane_wave_a":
            return np.zeros_like(x)
        p = self.params
        phase = np.sum(p["k"] * x, axis=-1) - p["frequency"] * t
        return (p["amplitude"] * p["frequency"] * np.sin(phase))[..., None] * p["eps"]

    def _table_derivative(self, table_values, x):
        # central differences on the lattice; the stencil must stay in-domain
        table = self.params["table"]
        table._check_domain(x)
        out = np.empty_like(x)
        interp = table._interp(table_values)
        for axis in range(self.dim):
            h = np.min(np.diff(table.axes[axis]))
            xp = x.copy()
            xm = x.copy()
            xp[..., axis] += h
            xm[..., axis] -= h
            try:
                out[..., axis] = (interp(xp) - interp(xm)) / (2 * h)
            except ValueError as exc:
                raise FieldDomainError(
                    f"derivative stencil leaves table domain on axis {axis}"
                ) from exc
        return out

    def __repr__(self):
        return f"FieldSpec(kind={self.kind!r}, dim={self.dim})"


@dataclass(frozen=True)
class EffectivePotential:
    """U(x, t) = V + e^2/(2 mu c^2) A.A, the potential seen in adjoint space."""

    consts: PhysicalConstants
    fields: FieldSpec

    def value(self, x, t=0.0):
        c = self.consts
        a = self.fields.vector_potential(x, t)
        return (self.fields.potential(x, t)
                + c.charge**2 / (2 * c.mass * c.light_speed**2)
                * np.sum(a * a, axis=-1))

    def gradient(self, x, t=0.0):
        c = self.consts
        a = self.fields.vector_potential(x, t)
        grad_a = self.fields.grad_vector_potential(x, t)
        # d/dx_l (A_j A_j) = 2 A_j dA_j/dx_l
        return (self.fields.grad_potential(x, t)
                + c.charge**2 / (c.mass * c.light_speed**2)
                * np.einsum("...j,...jl->...l", a, grad_a))


def kinetic_momentum(consts, fields, x, p, t=0.0):
    """p - (e/c) A(x, t), the gauge-covariant momentum mu*v."""
    return p - (consts.charge / consts.light_speed) * fields.vector_potential(x, t)


def eval_hamiltonian(consts, fields, x, p, t=0.0):
    """Pointwise H(p, x, t); x and p shaped (..., D), returns (...,)."""
    w = kinetic_momentum(consts, fields, x, p, t)
    return np.sum(w * w, axis=-1) / (2 * consts.mass) + fields.potential(x, t)


def eval_force_fields(consts, fields, x, t=0.0):
    """Derivative bundle (grad V, dA_j/dx_l, dA/dt) shared by the engines."""
    return (fields.grad_potential(x, t),
            fields.grad_vector_potential(x, t),
            fields.dA_dt(x, t))


def hamiltonian_gradients(consts, fields, x, p, t=0.0):
    """(dH/dx, dH/dp) for the stochastic Hamilton equations.

    dH/dx_l = dV/dx_l - (e/(mu c)) w_j dA_j/dx_l,   w = p - (e/c) A
    dH/dp   = w / mu
    """
    w = kinetic_momentum(consts, fields, x, p, t)
    grad_v = fields.grad_potential(x, t)
    grad_a = fields.grad_vector_potential(x, t)
    coupling = consts.charge / (consts.mass * consts.light_speed)
    dh_dx = grad_v - coupling * np.einsum("...j,...jl->...l", w, grad_a)
    return dh_dx, w / consts.mass


def lorentz_force(consts, fields, x, p, t=0.0):
    """e E + (e/(mu c)) (p - (e/c)A) x B, written index-wise so it is
    valid in any dimension:

        F_l = -dV/dx_l - (e/c) dA_l/dt + (e/(mu c)) w_j (dA_j/dx_l - dA_l/dx_j)
    """
    c = consts
    w = kinetic_momentum(c, fields, x, p, t)
    grad_v, grad_a, da_dt = eval_force_fields(c, fields, x, t)
    curl_term = (np.einsum("...j,...jl->...l", w, grad_a)
                 - np.einsum("...j,...lj->...l", w, grad_a))
    return (-grad_v - (c.charge / c.light_speed) * da_dt
            + c.charge / (c.mass * c.light_speed) * curl_term)
