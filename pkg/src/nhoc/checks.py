"""Seeded property suites behind the `check` CLI command.

Each check returns a CheckResult; run_all collects them.  The suites cover
the discretization-map axioms, the symplectic/non-symplectic defect
separation, analytic-gradient agreement, and the basic algebraic round
trips of the library.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import geometry, nonholonomic, ocp
from .integrators import IntegratorSpec, hamiltonian_field, make_step
from .nonholonomic import AdaptedPoint, admissibility_residual, include, project
from .ocp import CostatePoint, hamiltonian, hamiltonian_gradient, ydot_from_p, legendre
from .sleigh import BENCHMARK_INIT, sleigh_model

Array = np.ndarray

SYMPLECTIC_SPECS = (IntegratorSpec("retraction", delta=0.0),
                    IntegratorSpec("retraction", delta=0.5),
                    IntegratorSpec("retraction", delta=1.0),
                    IntegratorSpec("verlet"),
                    IntegratorSpec("gl4"))
NONSYMPLECTIC_SPECS = (IntegratorSpec("rk2"), IntegratorSpec("rk4"))


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.detail}"


def sleigh_probe_states(seed: int, count: int = 5) -> list[Array]:
    """Seeded states for the defect comparisons.

    Four are perturbations of the benchmark initial state at growing
    scales.  The last sits in a stiff regime (large heading velocity and
    transverse momentum, near-zero heading angle and steering rate) where
    the linearized dynamics oscillate fast enough at h = 0.01 that
    non-symplectic defects become macroscopic while the step itself stays
    well within solver reach.
    """
    rng = np.random.default_rng(seed)
    base = np.array(BENCHMARK_INIT)
    states = [base.copy()]
    for scale in (0.5, 2.0, 5.0):
        states.append(base + scale * rng.standard_normal(10))
    stiff = np.array([0.5, -0.3, 1e-4, 0.1, 800.0, 800.0, 0.0, 0.3, -0.1, 0.2])
    jitter = np.zeros(10)
    jitter[[0, 1, 3, 7, 8, 9]] = 0.05 * rng.standard_normal(6)
    states.append(stiff + jitter)
    return states[:count]


def scaled_spec(spec: IntegratorSpec, system, z: Array) -> IntegratorSpec:
    """Rescale the Newton tolerance to the local field magnitude, so the
    stopping test stays meaningful at states far from unit scale."""
    scale = max(1.0, float(np.max(np.abs(hamiltonian_field(system, z)))))
    if scale == 1.0 or spec.kind in ("rk2", "rk4"):
        return spec
    return IntegratorSpec(spec.kind, spec.delta, spec.newton_tol * scale,
                          spec.newton_max_iters, spec.fd_jacobian_step)


def check_delta_axioms(seed: int, tol: float = 1e-8, points: int = 20) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(points):
        q = rng.uniform(-3.0, 3.0, size=4)
        for delta in (0.0, 0.25, 0.5, 0.75, 1.0):
            rep = geometry.check_discretization_axioms(
                lambda qq, vv: geometry.delta_map_forward(qq, vv, delta), q, tol)
            worst = max(worst, rep.zero_defect, rep.identity_defect)
    return CheckResult("delta-map axioms", worst < tol, f"max defect {worst:.2e} (tol {tol:g})")


def check_induced_axioms(seed: int, tol: float = 1e-6, points: int = 20) -> CheckResult:
    model = sleigh_model()
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(points):
        state = rng.uniform(-2.0, 2.0, size=5)
        for delta in (0.0, 0.5, 1.0):
            def map_fn(zq, zv, _delta=delta):
                pt = AdaptedPoint(zq[:3], zq[3:])
                a, b = nonholonomic.induced_discretization(
                    model, pt, (zv[:3], zv[3:]), _delta)
                return a.to_array(), b.to_array()
            rep = geometry.check_discretization_axioms(map_fn, state, tol)
            worst = max(worst, rep.zero_defect, rep.identity_defect)
    return CheckResult("induced-map axioms (sleigh)", worst < tol,
                       f"max defect {worst:.2e} (tol {tol:g})")


def check_symplecticity_separation(seed: int, h: float = 0.01,
                                   sym_tol: float = 1e-6,
                                   nonsym_floor: float = 1e-4) -> CheckResult:
    model = sleigh_model()
    states = sleigh_probe_states(seed)
    worst_sym = 0.0
    for spec in SYMPLECTIC_SPECS:
        for z in states:
            sspec = scaled_spec(spec, model, z)
            step = make_step(sspec)
            defect = geometry.symplecticity_defect(
                lambda zz, hh: step(model, zz, hh)[0], z, h)
            worst_sym = max(worst_sym, defect)
    best_nonsym = {}
    for spec in NONSYMPLECTIC_SPECS:
        step = make_step(spec)
        best_nonsym[spec.kind] = max(
            geometry.symplecticity_defect(lambda zz, hh: step(model, zz, hh)[0], z, h)
            for z in states)
    ok = worst_sym < sym_tol and all(v > nonsym_floor for v in best_nonsym.values())
    detail = (f"symplectic max {worst_sym:.2e} (tol {sym_tol:g}); "
              + ", ".join(f"{k} max {v:.2e}" for k, v in best_nonsym.items())
              + f" (floor {nonsym_floor:g})")
    return CheckResult("symplecticity separation", ok, detail)


def check_gradient(seed: int, tol: float = 1e-7, points: int = 50) -> CheckResult:
    model = sleigh_model()
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(points):
        z = CostatePoint(rng.uniform(-2, 2, 3), rng.uniform(-2, 2, 2),
                         rng.uniform(-2, 2, 3), rng.uniform(-2, 2, 2))
        grad = np.concatenate(hamiltonian_gradient(model, z))
        fd = _fd_gradient(model, z)
        worst = max(worst, float(np.max(np.abs(grad - fd))))
    return CheckResult("analytic gradient vs finite differences", worst < tol,
                       f"max deviation {worst:.2e} (tol {tol:g})")


def _fd_gradient(model, z: CostatePoint, step: float = 1e-5) -> Array:
    flat = z.to_array()
    n, k = model.n, model.k
    out = np.empty(flat.size)
    for j in range(flat.size):
        e = np.zeros(flat.size)
        e[j] = step
        hp = hamiltonian(model, CostatePoint.from_array(flat + e, n, k))
        hm = hamiltonian(model, CostatePoint.from_array(flat - e, n, k))
        out[j] = (hp - hm) / (2.0 * step)
    return out


def check_round_trips(seed: int, tol: float = 1e-14, points: int = 50) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(points):
        delta = rng.uniform(0.0, 1.0)
        q, v = rng.standard_normal(3), rng.standard_normal(3)
        a, b = geometry.delta_map_forward(q, v, delta)
        q2, v2 = geometry.delta_map_inverse(a, b, delta)
        worst = max(worst, float(np.max(np.abs(q2 - q))), float(np.max(np.abs(v2 - v))))
        p, pd = rng.standard_normal(3), rng.standard_normal(3)
        lifted = geometry.cotangent_lift_forward(q, p, v, pd, delta)
        back = geometry.cotangent_lift_inverse(*lifted, delta)
        for got, want in zip(back, (q, p, v, pd)):
            worst = max(worst, float(np.max(np.abs(got - want))))
    return CheckResult("forward/inverse round trips", worst < tol,
                       f"max defect {worst:.2e} (tol {tol:g})")


def check_projector(seed: int, tol: float = 1e-12, points: int = 50) -> CheckResult:
    model = sleigh_model()
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(points):
        pt = AdaptedPoint(rng.uniform(-3, 3, 3), rng.uniform(-3, 3, 2))
        q, qdot = include(model, pt)
        worst = max(worst, float(np.max(np.abs(project(model, q, qdot) - pt.y))))
    return CheckResult("projector recovers included velocities", worst < tol,
                       f"max defect {worst:.2e} (tol {tol:g})")


def check_legendre(seed: int, tol: float = 1e-12, points: int = 50) -> CheckResult:
    model = sleigh_model()
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(points):
        q, y, yd = rng.standard_normal(3), rng.standard_normal(2), rng.standard_normal(2)
        back = ydot_from_p(model, q, y, legendre(model, q, y, yd))
        worst = max(worst, float(np.max(np.abs(back - yd))))
    return CheckResult("Legendre round trip", worst < tol,
                       f"max defect {worst:.2e} (tol {tol:g})")


def check_drho(seed: int, tol: float = 1e-7, points: int = 20) -> CheckResult:
    model = sleigh_model()
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(points):
        q = rng.uniform(-3, 3, 3)
        worst = max(worst, float(np.max(np.abs(
            model.dist.drho(q) - nonholonomic.fd_drho(model, q)))))
    return CheckResult("analytic drho vs finite differences", worst < tol,
                       f"max deviation {worst:.2e} (tol {tol:g})")


def check_admissibility(seed: int, tol_factor: float = 10.0) -> CheckResult:
    """Retraction and end-point composition steps keep the averaged velocity
    on the distribution to within the Newton tolerance."""
    from .integrators import integrate
    model = sleigh_model()
    worst = 0.0
    for spec in (IntegratorSpec("retraction", delta=0.5), IntegratorSpec("verlet")):
        traj = integrate(model, np.array(BENCHMARK_INIT), 0.005, 200, spec)
        for i in range(traj.n_steps):
            y_mid = traj.midpoints[i][3:5]
            worst = max(worst, admissibility_residual(
                model, traj.states[i][:3], traj.states[i + 1][:3], y_mid, 0.005))
    bound = tol_factor * IntegratorSpec("verlet").newton_tol
    return CheckResult("admissibility of implicit steps", worst <= bound,
                       f"max residual {worst:.2e} (bound {bound:g})")


ALL_CHECKS = (check_round_trips, check_delta_axioms, check_induced_axioms,
              check_projector, check_legendre, check_drho, check_gradient,
              check_symplecticity_separation, check_admissibility)


def run_all(seed: int = 42) -> list[CheckResult]:
    return [chk(seed) for chk in ALL_CHECKS]
