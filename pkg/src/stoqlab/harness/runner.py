"""Scenario execution and the acceptance-check registry.

Every check evaluates one quantitative claim with its tolerance taken
from the scenario file, writes its numeric artifacts (CSV / flat binary)
under the run directory, and reports measured vs expected.  The exit
status of the CLI reflects the conjunction of all checks.
"""

from __future__ import annotations

import itertools
import json
import time
from dataclasses import dataclass, replace, asdict
from pathlib import Path

import numpy as np
import sympy

from .. import adjoint, fpe, io, manybody, observables, ordering, qsolver, sde
from ..model import FieldSpec, PhysicalConstants
from ..ordering import HBAR
from ..states import (WaveFunction, gaussian_packet, ground_state_sigma,
                      harmonic_eigenstate, uniform_axes)
from .scenario import Scenario, ScenarioError

SCHEMA_VERSION = 1


@dataclass
class CheckResult:
    name: str
    kind: str
    passed: bool
    measured: float
    expected: float
    tolerance: str
    detail: str = ""


@dataclass
class RunReport:
    scenario: str
    seed: int
    schema_version: int
    checks: list
    artifacts: list
    runtime_seconds: float

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def to_json(self):
        def plain(v):
            if isinstance(v, np.bool_):
                return bool(v)
            if isinstance(v, np.integer):
                return int(v)
            if isinstance(v, np.floating):
                return float(v)
            return v

        payload = {
            "scenario": self.scenario,
            "seed": self.seed,
            "schema_version": self.schema_version,
            "passed": bool(self.passed),
            "checks": [{k: plain(v) for k, v in asdict(c).items()}
                       for c in self.checks],
            "artifacts": sorted(self.artifacts),
            "runtime_seconds": self.runtime_seconds,
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"


class _Workdir:
    """Artifact sink; inert when running check-only."""

    def __init__(self, base, enabled=True):
        self.base = Path(base) if base is not None else None
        self.enabled = enabled and base is not None
        self.paths = []

    def path(self, name):
        if not self.enabled:
            return None
        self.base.mkdir(parents=True, exist_ok=True)
        p = self.base / name
        self.paths.append(str(p))
        return p


def _scaled_omega(fields):
    if fields.kind != "harmonic":
        raise ScenarioError("this check needs a harmonic field preset")
    return float(np.max(fields.params["omega"]))


def _harmonic_ground(scenario, n_points, half_width_sigmas):
    omega = _scaled_omega(scenario.fields)
    sigma = ground_state_sigma(omega, scenario.consts)
    axes = uniform_axes(half_width_sigmas * sigma, n_points,
                        dim=scenario.fields.dim)
    return harmonic_eigenstate(axes, 0, omega, scenario.consts)


# -- check implementations -------------------------------------------------

def check_l2_zero_point_grid(scenario, check, work):
    n = scenario.check_param(check, "n_points", 128, int)
    hw = scenario.check_param(check, "half_width_sigmas", 8.0)
    rel_tol = scenario.check_param(check, "rel_tol")
    c = scenario.consts
    psi = _harmonic_ground(scenario, n, hw)
    classical = observables.L2_classical(psi, c)
    quantum = observables.quantum_l2(psi, c)
    measured = classical - quantum
    expected = 1.5 * c.hbar**2
    passed = abs(measured - expected) <= rel_tol * abs(expected)
    return CheckResult(check.name, check.kind, passed, measured, expected,
                       f"rel {rel_tol:g}",
                       f"classical={classical:.9g} quantum={quantum:.3g} n={n}^3")


def _l2_state_corpus(consts, omega, n_points, half_width):
    axes = uniform_axes(half_width, n_points, dim=3)
    states = [
        harmonic_eigenstate(axes, (1, 0, 0), omega, consts),
        harmonic_eigenstate(axes, (1, 1, 0), omega, consts),
        harmonic_eigenstate(axes, (2, 0, 0), omega, consts),
        harmonic_eigenstate(axes, (2, 1, 0), omega, consts),
        gaussian_packet(axes, sigma=[0.9, 0.7, 1.1], wavevector=[1.0, -0.5, 0.3]),
        gaussian_packet(axes, center=[0.5, -0.3, 0.2], wavevector=[0.4, 1.2, -0.7]),
        gaussian_packet(axes, sigma=0.8, quad_phase=[0.3, -0.2, 0.1]),
        gaussian_packet(axes, sigma=1.2, wavevector=[2.0, 0.0, 0.0]),
        gaussian_packet(axes, sigma=1.0, wavevector=[2.0, 2.0, 0.0]),
    ]
    a = gaussian_packet(axes, center=[1.0, 0.0, 0.0], sigma=0.9)
    b = gaussian_packet(axes, center=[-1.0, 0.5, 0.0], sigma=0.9,
                        wavevector=[0.0, 0.8, 0.0])
    mix = WaveFunction(a.amplitude + b.amplitude, a.axes)
    states.append(mix.normalized())
    return states


def check_l2_operator_identity(scenario, check, work):
    n = scenario.check_param(check, "n_points", 48, int)
    hw = scenario.check_param(check, "half_width", 8.0)
    rel_tol = scenario.check_param(check, "rel_tol")
    c = scenario.consts
    omega = _scaled_omega(scenario.fields)
    sym_op = observables.L2_symmetric_operator(1, 3)
    quantum_op = ordering.angular_momentum_squared(3)
    expected = 1.5 * c.hbar**2
    worst = 0.0
    for psi in _l2_state_corpus(c, omega, n, hw):
        gap = (observables.expectation_real(psi, sym_op, c)
               - observables.expectation_real(psi, quantum_op, c))
        worst = max(worst, abs(gap - expected))
    measured = expected + worst if worst else expected
    passed = worst <= rel_tol * abs(expected)
    return CheckResult(check.name, check.kind, passed, measured, expected,
                       f"rel {rel_tol:g}",
                       f"max abs deviation {worst:.3g} over 10 states")


def check_ground_energy(scenario, check, work):
    n = scenario.check_param(check, "n_points", 64, int)
    hw = scenario.check_param(check, "half_width_sigmas", 8.0)
    rel_tol = scenario.check_param(check, "rel_tol")
    c = scenario.consts
    omega = _scaled_omega(scenario.fields)
    psi = _harmonic_ground(scenario, n, hw)
    measured = qsolver.hamiltonian_expectation(psi, c, scenario.fields)
    expected = 1.5 * c.hbar * omega
    passed = abs(measured - expected) <= rel_tol * abs(expected)
    return CheckResult(check.name, check.kind, passed, measured, expected,
                       f"rel {rel_tol:g}", f"n={n}^3")


def check_chi4_oracle_exact(scenario, check, work):
    mismatches = []
    for i, j, k, l in itertools.product(range(3), repeat=4):
        if ordering.chi4_symmetric(i, j, k, l) != observables.chi4_closed_form(i, j, k, l):
            mismatches.append((i, j, k, l))
    passed = not mismatches
    return CheckResult(check.name, check.kind, passed,
                       float(len(mismatches)), 0.0, "exact",
                       f"81 index tuples, {len(mismatches)} mismatches")


def check_mb_constant_exact(scenario, check, work):
    c = scenario.consts
    bad = []
    for n in (1, 2, 3):
        for d in (2, 3):
            const = ordering.symmetric_l2_operator(n, d).constant_term()
            expect = sympy.Rational(n) * HBAR**2 / 2 \
                * sympy.Rational(d * (d - 1), 2)
            if not sympy.expand(const - expect).is_zero:
                bad.append((n, d))
    passed = not bad
    return CheckResult(check.name, check.kind, passed, float(len(bad)), 0.0,
                       "exact", f"N in 1..3 x D in 2..3, {len(bad)} mismatches")


def check_mb_l2_grid(scenario, check, work):
    n = scenario.check_param(check, "n_points", 32, int)
    hw = scenario.check_param(check, "half_width", 7.0)
    sigma = scenario.check_param(check, "sigma", 1.0)
    rel_tol = scenario.check_param(check, "rel_tol")
    c = scenario.consts
    x = np.linspace(-hw, hw, n, endpoint=False)
    g = np.exp(-x**2 / (4.0 * sigma**2))
    psi = manybody.mb_product_state([(x, g)] * 4, 2, 2)
    measured = manybody.mb_L2_classical(psi, c)
    expected = 2 * (c.hbar**2 / 2) * (2 * 1) / 2
    passed = abs(measured - expected) <= rel_tol * abs(expected)
    return CheckResult(check.name, check.kind, passed, measured, expected,
                       f"rel {rel_tol:g}", f"N=2 D=2 grid {n}^4")


def _initial_ensemble(scenario, n_paths, consts=None, seed=None):
    init = scenario.initial
    return sde.gaussian_ensemble(
        n_paths,
        init.get("mean_x", 0.0), init.get("sigma_x", 1.0),
        init.get("mean_p", 0.0), init.get("sigma_p", 1.0),
        scenario.seed if seed is None else seed,
        consts if consts is not None else scenario.consts,
        scenario.fields)


def check_sde_energy_rate(scenario, check, work):
    n_paths = scenario.check_param(check, "n_paths", 100000, int)
    dt = scenario.check_param(check, "dt", 0.01)
    horizon = scenario.check_param(check, "horizon", 10.0)
    sigma_level = scenario.check_param(check, "sigma_level", 3.0)
    c = scenario.consts
    ens = _initial_ensemble(scenario, n_paths)
    h0 = np.array(  # per-path energies, kept for the endpoint estimator
        sde.eval_hamiltonian(c, scenario.fields, ens.positions, ens.momenta,
                             ens.time))
    n_steps = int(round(horizon / dt))
    record_every = max(1, n_steps // 50)
    final, records = sde.run_experiment(ens, dt, n_steps,
                                        record_every=record_every)
    h1 = np.array(
        sde.eval_hamiltonian(c, scenario.fields, final.positions,
                             final.momenta, final.time))
    span = final.time - ens.time
    delta = h1 - h0
    slope = float(delta.mean()) / span
    se = float(delta.std(ddof=1)) / np.sqrt(n_paths) / span
    expected = c.vacuum_power
    passed = abs(slope - expected) <= sigma_level * se
    out = work.path("sde_energy_series.csv")
    if out:
        io.write_table_csv(out, ["t", "mean_H"],
                           [(r.time, r.mean_h) for r in records])
        io.save_ensemble(work.path("sde_final.bin"), final,
                         sidecar={"scenario": scenario.name, "seed": scenario.seed})
    return CheckResult(check.name, check.kind, passed, slope, expected,
                       f"{sigma_level:g} se = {sigma_level * se:.3g}",
                       f"M={n_paths} horizon={horizon:g} se={se:.3g}")


def _grid_from_check(scenario, check):
    spec = fpe.PhaseSpaceGridSpec(
        scenario.check_param(check, "x_min", -10.0),
        scenario.check_param(check, "x_max", 10.0),
        scenario.check_param(check, "nx", 512, int),
        scenario.check_param(check, "p_min", -4.0),
        scenario.check_param(check, "p_max", 4.0),
        scenario.check_param(check, "np", 512, int))
    init = scenario.initial
    return fpe.gaussian_grid(
        spec,
        init.get("mean_x", 0.0), init.get("sigma_x", 1.0),
        init.get("mean_p", 0.0), init.get("sigma_p", 1.0)), spec


def check_fpe_energy_rate(scenario, check, work):
    horizon = scenario.check_param(check, "horizon", 2.0)
    rel_tol = scenario.check_param(check, "rel_tol", 0.02)
    safety = scenario.check_param(check, "safety", 0.9)
    c = scenario.consts
    grid, _ = _grid_from_check(scenario, check)
    dt = fpe.stable_dt(grid, c, scenario.fields, safety)
    n_steps = int(np.ceil(horizon / dt))
    dt = horizon / n_steps
    grid, records = fpe.fp_run(grid, c, scenario.fields, dt, n_steps,
                               safety=min(0.95, safety + 0.01),
                               record_every=max(1, n_steps // 100), energy=True)
    t = np.array([r["time"] for r in records])
    h = np.array([r["mean_energy"] for r in records])
    slope = float(np.polyfit(t, h, 1)[0])
    expected = c.vacuum_power
    passed = abs(slope - expected) <= rel_tol * abs(expected)
    out = work.path("fpe_energy_series.csv")
    if out:
        io.write_table_csv(out, ["t", "mean_H", "norm", "absorbed", "undershoot"],
                           [(r["time"], r["mean_energy"], r["norm"],
                             r["absorbed"], r["undershoot"]) for r in records])
        io.save_grid(work.path("fpe_final.bin"), grid)
    return CheckResult(check.name, check.kind, passed, slope, expected,
                       f"rel {rel_tol:g}",
                       f"{grid.density.shape[0]}x{grid.density.shape[1]} "
                       f"steps={n_steps}")


def check_fpe_norm_drift(scenario, check, work):
    n_steps = scenario.check_param(check, "steps", 1000, int)
    tol = scenario.check_param(check, "tol", 1e-6)
    safety = scenario.check_param(check, "safety", 0.9)
    preset = check.params.get("preset", scenario.fields.kind)
    c = scenario.consts
    if preset == "harmonic":
        fields = FieldSpec.harmonic(
            scenario.check_param(check, "omega", 1.0), dim=1, mass=c.mass)
    elif preset == "free":
        fields = FieldSpec.free(1)
    else:
        raise ScenarioError(f"fpe_norm_drift: unsupported preset {preset!r}")
    grid, _ = _grid_from_check(scenario, check)
    dt = scenario.check_param(check, "dt", 0.0)
    if dt <= 0.0:
        dt = fpe.stable_dt(grid, c, fields, safety)
    grid, records = fpe.fp_run(grid, c, fields, dt, n_steps,
                               safety=min(0.95, safety + 0.01),
                               record_every=max(1, n_steps // 100))
    norms = np.array([r["norm"] for r in records])
    measured = float(np.max(np.abs(norms - norms[0])))
    passed = measured <= tol
    out = work.path(f"fpe_norm_{preset}.csv")
    if out:
        io.write_table_csv(out, ["t", "norm", "absorbed", "undershoot"],
                           [(r["time"], r["norm"], r["absorbed"],
                             r["undershoot"]) for r in records])
    return CheckResult(check.name, check.kind, passed, measured, 0.0,
                       f"abs {tol:g}",
                       f"{preset} preset, {n_steps} steps, dt={dt:.3g}")


def check_qsolver_norm_drift(scenario, check, work):
    scheme = check.params.get("scheme", "spectral")
    n_steps = scenario.check_param(check, "steps", 1000, int)
    tol = scenario.check_param(check, "tol", 1e-10)
    dt = scenario.check_param(check, "dt", 0.005)
    n = scenario.check_param(check, "n_points", 256, int)
    hw = scenario.check_param(check, "half_width", 10.0)
    c = scenario.consts
    axes = uniform_axes(hw, n, dim=1)
    psi = gaussian_packet(axes, center=1.0, sigma=0.8)
    drift = [0.0]

    def track(step, state):
        drift.append(abs(state.norm() - 1.0))

    qsolver.evolve_psi(psi, c, scenario.fields, dt, n_steps, scheme=scheme,
                       callback=track)
    measured = float(np.max(drift))
    passed = measured <= tol
    return CheckResult(check.name, check.kind, passed, measured, 0.0,
                       f"abs {tol:g}", f"{scheme} scheme, {n_steps} steps")


def check_sde_ehrenfest(scenario, check, work):
    n_paths = scenario.check_param(check, "n_paths", 100000, int)
    dt = scenario.check_param(check, "dt", 0.005)
    periods = scenario.check_param(check, "periods", 2.0)
    checkpoints = scenario.check_param(check, "checkpoints", 16, int)
    sigma_level = scenario.check_param(check, "sigma_level", 3.0)
    vacuum_power = scenario.check_param(check, "vacuum_power", 0.0)
    scheme = check.params.get("scheme", "symplectic")
    c = replace(scenario.consts, vacuum_power=vacuum_power)
    omega = _scaled_omega(scenario.fields)
    horizon = periods * 2.0 * np.pi / omega
    n_steps = int(np.ceil(horizon / dt))
    record_every = max(1, n_steps // (checkpoints * 4))
    ens = _initial_ensemble(scenario, n_paths, consts=c)
    final, records = sde.run_experiment(ens, dt, n_steps,
                                        record_every=record_every,
                                        scheme=scheme)
    mu = c.mass
    # classical reference launched from the sample's own initial means;
    # referencing the configured means would count the O(sigma/sqrt(M))
    # draw fluctuation of the initial cloud as model error
    mx0 = float(records[0].mean_x[0])
    mp0 = float(mu * records[0].mean_v[0])
    idx = np.linspace(1, len(records) - 1, checkpoints).astype(int)
    worst = 0.0
    rows = []
    for r in records:
        t = r.time
        x_cl = mx0 * np.cos(omega * t) + mp0 / (mu * omega) * np.sin(omega * t)
        p_cl = mp0 * np.cos(omega * t) - mx0 * mu * omega * np.sin(omega * t)
        se_x = np.sqrt(r.cov_xx[0, 0] / r.count)
        se_p = np.sqrt(r.cov_pp[0, 0] / r.count)
        rows.append((t, r.mean_x[0], x_cl, se_x,
                     mu * r.mean_v[0], p_cl, se_p))
    for i in idx:
        t, mx, x_cl, se_x, mv, p_cl, se_p = rows[i]
        worst = max(worst, abs(mx - x_cl) / se_x, abs(mv - p_cl) / se_p)
    passed = worst <= sigma_level
    out = work.path(f"ehrenfest_P{vacuum_power:g}.csv")
    if out:
        io.write_table_csv(
            out, ["t", "mean_x", "x_classical", "se_x", "mu_mean_v",
                  "p_classical", "se_p"], rows)
    return CheckResult(check.name, check.kind, passed, worst, 0.0,
                       f"z <= {sigma_level:g}",
                       f"P={vacuum_power:g} M={n_paths} scheme={scheme} "
                       f"max z={worst:.2f}")


def check_subsystem_refinement(scenario, check, work):
    levels = scenario.check_param(check, "levels", 3, int)
    base_n = scenario.check_param(check, "base_n", 128, int)
    base_dt = scenario.check_param(check, "base_dt", 0.004)
    horizon = scenario.check_param(check, "horizon", 0.2)
    hw = scenario.check_param(check, "half_width", 15.0)
    sigma = scenario.check_param(check, "sigma", 1.0)
    k0 = scenario.check_param(check, "k0", 0.7)
    min_order = scenario.check_param(check, "min_order", 1.5)
    c = scenario.consts
    fields = scenario.fields
    res_density = []
    res_current = []
    for level in range(levels):
        n = base_n * 2**level
        dt = base_dt / 2**level
        axes = uniform_axes(hw, n, dim=1)
        psi = gaussian_packet(axes, sigma=sigma, wavevector=k0)
        n_steps = int(round(horizon / dt))
        psi_m = qsolver.evolve_psi(psi, c, fields, dt, n_steps - 1,
                                   scheme="spectral")
        psi_0 = qsolver.evolve_psi(psi_m, c, fields, dt, 1, scheme="spectral")
        psi_p = qsolver.evolve_psi(psi_0, c, fields, dt, 1, scheme="spectral")
        rep = adjoint.consistency_check_P_independent(psi_m, psi_0, psi_p,
                                                      c, fields, method="fd4")
        res_density.append(rep.density_norm / rep.density_scale)
        res_current.append(rep.current_norm / rep.current_scale)
    orders_d = [np.log2(res_density[i] / res_density[i + 1])
                for i in range(levels - 1)]
    orders_c = [np.log2(res_current[i] / res_current[i + 1])
                for i in range(levels - 1)]
    measured = float(min(orders_d[-1], orders_c[-1]))
    passed = measured >= min_order
    out = work.path("subsystem_refinement.csv")
    if out:
        io.write_table_csv(out, ["level", "n", "dt", "density_residual",
                                 "current_residual"],
                           [(lv, base_n * 2**lv, base_dt / 2**lv,
                             res_density[lv], res_current[lv])
                            for lv in range(levels)])
    return CheckResult(check.name, check.kind, passed, measured, min_order,
                       f">= {min_order:g}",
                       f"orders density={['%.2f' % o for o in orders_d]} "
                       f"current={['%.2f' % o for o in orders_c]}")


def check_cross_engine_l1(scenario, check, work):
    t_final = scenario.check_param(check, "t", 1.0)
    n_paths = scenario.check_param(check, "n_paths", 100000, int)
    psi_points = scenario.check_param(check, "psi_points", 1024, int)
    max_l1 = scenario.check_param(check, "max_l1", 0.03)
    safety = scenario.check_param(check, "safety", 0.9)
    c = scenario.consts
    fields = scenario.fields
    grid0, spec = _grid_from_check(scenario, check)

    # Fokker-Planck branch
    dt = fpe.stable_dt(grid0, c, fields, safety)
    n_steps = int(np.ceil(t_final / dt))
    dt = t_final / n_steps
    grid, _ = fpe.fp_run(grid0, c, fields, dt, n_steps,
                         safety=min(0.95, safety + 0.01))
    fp_marginal = grid.marginal_x()

    # Langevin branch
    ens = _initial_ensemble(scenario, n_paths)
    sde_steps = max(1, int(round(t_final / 0.01)))
    ens, _ = sde.run_experiment(ens, t_final / sde_steps, sde_steps,
                                record_every=sde_steps)
    hist, clipped = sde.histogram_phase_space(ens, spec)
    sde_marginal = hist.marginal_x() / max(1e-300, 1.0 - clipped)

    # amplitude branch (matched minimum-uncertainty packet)
    init = scenario.initial
    sigma_x = float(np.atleast_1d(init.get("sigma_x", 1.0))[0])
    psi_axes = uniform_axes(scenario.check_param(check, "psi_half_width", 12.0),
                            psi_points, dim=1)
    psi = gaussian_packet(psi_axes, center=init.get("mean_x", 0.0),
                          sigma=sigma_x)
    psi = qsolver.evolve_psi(psi, c, fields, t_final / 20.0, 20,
                             scheme="spectral")
    # sample |Psi|^2 on the fp cell centers
    from scipy.interpolate import interp1d
    rho = interp1d(psi.axes[0], psi.density(), kind="cubic",
                   bounds_error=False, fill_value=0.0)(grid.x)

    dx = grid.dx
    l1 = {
        "fp_vs_psi": float(np.sum(np.abs(fp_marginal - rho)) * dx),
        "sde_vs_psi": float(np.sum(np.abs(sde_marginal - rho)) * dx),
        "fp_vs_sde": float(np.sum(np.abs(fp_marginal - sde_marginal)) * dx),
    }
    measured = max(l1.values())
    passed = measured <= max_l1
    out = work.path("cross_engine_marginals.csv")
    if out:
        io.write_table_csv(out, ["x", "fp", "sde", "psi"],
                           list(zip(grid.x, fp_marginal, sde_marginal, rho)))
    detail = " ".join(f"{k}={v:.4f}" for k, v in l1.items())
    return CheckResult(check.name, check.kind, passed, measured, 0.0,
                       f"L1 <= {max_l1:g}", detail + f" clipped={clipped:.2e}")


def _determinism_pipeline(scenario, outdir, seed):
    """A compact multi-engine run writing every artifact kind."""
    c = replace(scenario.consts, vacuum_power=0.01)
    fields = scenario.fields
    outdir.mkdir(parents=True, exist_ok=True)
    ens = sde.gaussian_ensemble(20000, 0.0, 1.0, 0.0, 0.5, seed, c, fields)
    ens, records = sde.run_experiment(ens, 0.01, 200, record_every=20)
    io.save_ensemble(outdir / "ensemble.bin", ens,
                     sidecar={"seed": seed, "scenario": scenario.name})
    io.write_moments_csv(outdir / "moments.csv", records)

    spec = fpe.PhaseSpaceGridSpec(-8, 8, 128, -4, 4, 128)
    grid = fpe.gaussian_grid(spec, 0.0, 1.0, 0.0, 0.5)
    dt = fpe.stable_dt(grid, c, fields, 0.8)
    grid, diag = fpe.fp_run(grid, c, fields, dt, 200, record_every=20)
    io.save_grid(outdir / "grid.bin", grid)
    io.write_table_csv(outdir / "fpe_diag.csv",
                       ["t", "norm", "absorbed", "undershoot"],
                       [(r["time"], r["norm"], r["absorbed"],
                         r["undershoot"]) for r in diag])

    psi = gaussian_packet(uniform_axes(10.0, 256, dim=1), sigma=1.0,
                          wavevector=0.5)
    psi = qsolver.evolve_psi(psi, c, fields, 0.01, 200, scheme="spectral")
    io.save_wavefunction(outdir / "psi.bin", psi)


def check_determinism_rerun(scenario, check, work):
    if not work.enabled:
        base = Path(scenario.check_param(check, "tmpdir", "", str) or ".")
    else:
        base = work.base
    seed = scenario.seed
    dirs = [base / "determinism_pass1", base / "determinism_pass2"]
    for d in dirs:
        _determinism_pipeline(scenario, d, seed)
    names = sorted(p.name for p in dirs[0].iterdir())
    differing = [n for n in names
                 if (dirs[0] / n).read_bytes() != (dirs[1] / n).read_bytes()]
    if work.enabled:
        work.paths.extend(str(dirs[0] / n) for n in names)
        work.paths.extend(str(dirs[1] / n) for n in names)
    passed = not differing
    return CheckResult(check.name, check.kind, passed, float(len(differing)),
                       0.0, "byte-identical",
                       f"{len(names)} artifacts compared; differing: "
                       f"{differing if differing else 'none'}")


CHECKS = {
    "l2_zero_point_grid": check_l2_zero_point_grid,
    "l2_operator_identity": check_l2_operator_identity,
    "ground_energy": check_ground_energy,
    "chi4_oracle_exact": check_chi4_oracle_exact,
    "mb_constant_exact": check_mb_constant_exact,
    "mb_l2_grid": check_mb_l2_grid,
    "sde_energy_rate": check_sde_energy_rate,
    "fpe_energy_rate": check_fpe_energy_rate,
    "fpe_norm_drift": check_fpe_norm_drift,
    "qsolver_norm_drift": check_qsolver_norm_drift,
    "sde_ehrenfest": check_sde_ehrenfest,
    "subsystem_refinement": check_subsystem_refinement,
    "cross_engine_l1": check_cross_engine_l1,
    "determinism_rerun": check_determinism_rerun,
}


def run_scenario(scenario, out_dir=None, check_only=False):
    """Execute every check of a scenario; returns a RunReport and, when
    out_dir is given, writes artifacts plus report.json under
    out_dir/<scenario name>/."""
    started = time.monotonic()
    base = Path(out_dir) / scenario.name if out_dir is not None else None
    work = _Workdir(base, enabled=not check_only)
    results = []
    for check in scenario.checks:
        fn = CHECKS.get(check.kind)
        if fn is None:
            raise ScenarioError(
                f"check {check.name!r}: unknown kind {check.kind!r}; "
                f"valid kinds: {sorted(CHECKS)}")
        results.append(fn(scenario, check, work))
    report = RunReport(scenario=scenario.name, seed=scenario.seed,
                       schema_version=SCHEMA_VERSION, checks=results,
                       artifacts=work.paths,
                       runtime_seconds=time.monotonic() - started)
    if base is not None:
        base.mkdir(parents=True, exist_ok=True)
        (base / "report.json").write_text(report.to_json())
    return report
