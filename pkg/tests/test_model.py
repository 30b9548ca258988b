import numpy as np
import pytest

from stoqlab.model import (EffectivePotential, FieldDomainError, FieldSpec,
                           PhysicalConstants, eval_force_fields,
                           eval_hamiltonian, hamiltonian_gradients,
                           kinetic_momentum, lorentz_force)

C = PhysicalConstants()


def test_constants_validation():
    with pytest.raises(ValueError, match="mass"):
        PhysicalConstants(mass=-1.0)
    with pytest.raises(ValueError, match="hbar"):
        PhysicalConstants(hbar=0.0)
    with pytest.raises(ValueError, match="vacuum_power"):
        PhysicalConstants(vacuum_power=-0.1)


def test_free_particle_zero_energy():
    f = FieldSpec.free(3)
    assert eval_hamiltonian(C, f, np.zeros(3), np.zeros(3)) == 0.0


def test_harmonic_unit_displacement():
    f = FieldSpec.harmonic(2.0, dim=3)
    h = eval_hamiltonian(C, f, np.array([1.0, 0, 0]), np.zeros(3))
    assert h == pytest.approx(0.5 * 2.0**2)


def test_uniform_magnetic_kinetic_cancellation():
    # A = B x r / 2 at x = e_x with B = B0 e_z gives A = (0, B0/2, 0);
    # choosing p = A makes the kinetic momentum vanish identically
    b0 = 2.0
    f = FieldSpec.uniform_magnetic([0, 0, b0])
    x = np.array([1.0, 0.0, 0.0])
    p = np.array([0.0, 0.5 * b0, 0.0])
    assert np.allclose(kinetic_momentum(C, f, x, p), 0.0)
    assert eval_hamiltonian(C, f, x, p) == pytest.approx(0.0, abs=1e-15)


def test_force_fields_trivial():
    f1 = FieldSpec.harmonic(1.0, dim=1)
    grad_v, grad_a, da_dt = eval_force_fields(C, f1, np.array([2.0]))
    assert grad_v[0] == pytest.approx(2.0)
    f0 = FieldSpec.free(2)
    grad_v, grad_a, da_dt = eval_force_fields(C, f0, np.array([0.3, -0.7]))
    assert not grad_v.any() and not grad_a.any() and not da_dt.any()


PRESETS = [
    FieldSpec.harmonic([1.0, 0.5, 2.0], dim=3),
    FieldSpec.uniform_magnetic([0.3, -0.2, 1.1]),
    FieldSpec.uniform_magnetic(0.7, dim=2),
    FieldSpec.linear([0.4, -1.2], dim=2),
    FieldSpec.plane_wave_a(0.8, [1.0, 0.0, 0.5], 1.3, [0.0, 1.0, 0.0]),
]


@pytest.mark.parametrize("fields", PRESETS, ids=lambda f: f.kind + str(f.dim))
def test_analytic_derivatives_match_finite_differences(fields):
    h = 1e-5
    t = 0.37
    rng = np.random.default_rng(5)
    x = rng.uniform(-1.5, 1.5, size=(4, fields.dim))
    grad_v, grad_a, da_dt = eval_force_fields(C, fields, x, t)
    for axis in range(fields.dim):
        xp = x.copy()
        xm = x.copy()
        xp[..., axis] += h
        xm[..., axis] -= h
        fd_v = (fields.potential(xp, t) - fields.potential(xm, t)) / (2 * h)
        assert np.allclose(grad_v[..., axis], fd_v, atol=1e-8)
        fd_a = (fields.vector_potential(xp, t)
                - fields.vector_potential(xm, t)) / (2 * h)
        assert np.allclose(grad_a[..., :, axis], fd_a, atol=1e-8)
    fd_t = (fields.vector_potential(x, t + h)
            - fields.vector_potential(x, t - h)) / (2 * h)
    assert np.allclose(da_dt, fd_t, atol=1e-8)


def test_gauge_shift_invariance():
    # H is unchanged under p -> p + (e/c) delta, A -> A + delta
    delta = np.array([0.4, -0.3, 0.9])
    axes = tuple(np.linspace(-2, 2, 21) for _ in range(3))
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
    base = FieldSpec.uniform_magnetic([0, 0, 1.0])
    a_table = base.vector_potential(mesh)
    f_plain = FieldSpec.grid_table(axes, np.zeros(mesh.shape[:-1]), a_table)
    f_shift = FieldSpec.grid_table(axes, np.zeros(mesh.shape[:-1]),
                                   a_table + delta)
    rng = np.random.default_rng(11)
    x = rng.uniform(-1, 1, size=(6, 3))
    p = rng.standard_normal((6, 3))
    ec = C.charge / C.light_speed
    h1 = eval_hamiltonian(C, f_plain, x, p)
    h2 = eval_hamiltonian(C, f_shift, x, p + ec * delta)
    assert np.allclose(h1, h2, atol=1e-12)


def test_grid_table_domain_errors():
    axes = (np.linspace(-1, 1, 11),)
    f = FieldSpec.grid_table(axes, np.linspace(-1, 1, 11) ** 2)
    with pytest.raises(FieldDomainError):
        f.potential(np.array([[1.5]]))
    # derivative stencil needs one lattice spacing of margin
    with pytest.raises(FieldDomainError):
        f.grad_potential(np.array([[0.999]]))


def test_grid_table_interpolation_orders():
    axes = (np.linspace(-2, 2, 81),)
    v = np.sin(axes[0])
    x = np.array([[0.313]])
    lin = FieldSpec.grid_table(axes, v, interpolation="linear")
    cub = FieldSpec.grid_table(axes, v, interpolation="cubic")
    assert abs(lin.potential(x)[0] - np.sin(0.313)) < 5e-4
    assert abs(cub.potential(x)[0] - np.sin(0.313)) < 1e-6
    assert abs(lin.grad_potential(x)[0, 0] - np.cos(0.313)) < 1e-3


def test_unknown_preset_rejected():
    with pytest.raises(ValueError, match="free"):
        FieldSpec("vortex", 2)


def test_effective_potential_value_and_gradient():
    fields = FieldSpec.uniform_magnetic([0, 0, 1.5])
    u = EffectivePotential(C, fields)
    x = np.array([[0.5, -0.2, 0.1]])
    a = fields.vector_potential(x)
    expect = 0.5 * np.sum(a * a, axis=-1)  # e = mu = c = 1, V = 0
    assert np.allclose(u.value(x), expect)
    h = 1e-6
    for axis in range(3):
        xp = x.copy()
        xm = x.copy()
        xp[..., axis] += h
        xm[..., axis] -= h
        fd = (u.value(xp) - u.value(xm)) / (2 * h)
        assert np.allclose(u.gradient(x)[..., axis], fd, atol=1e-8)


def test_lorentz_force_matches_hamiltonian_flow_for_static_a():
    # for static fields, -dH/dx equals the magnetic part of the force
    # plus the potential gradient combination used by the integrator
    fields = FieldSpec.uniform_magnetic([0, 0, 2.0])
    rng = np.random.default_rng(3)
    x = rng.standard_normal((5, 3))
    p = rng.standard_normal((5, 3))
    dh_dx, dh_dp = hamiltonian_gradients(C, fields, x, p)
    w = kinetic_momentum(C, fields, x, p)
    force = lorentz_force(C, fields, x, p)
    # w x B = -dH/dx - (w . grad) A contribution; verify the identity
    # F = -dH/dx - (e/c) (v . grad) A with v = w / mu
    grad_a = fields.grad_vector_potential(x)
    conv = np.einsum("...j,...lj->...l", w / C.mass, grad_a)
    assert np.allclose(force, -dh_dx - conv, atol=1e-12)
