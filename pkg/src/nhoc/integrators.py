"""One-step maps and trajectory drivers for canonical Hamiltonian systems.

A *system* is any object with integer attributes ``n`` and ``k`` (the state
has position block x and momentum block p, each of length n + k) and a
method ``grad_blocks(x, p) -> (dH/dx, dH/dp)``.  Systems may additionally
provide ``hess_blocks(x, p) -> (Hxx, Hxp, Hpp) | None``; when present the
implicit solvers assemble analytic Newton matrices, otherwise they fall
back to finite differences of the step residual.

The implicit family is generated by the lifted delta-split: one step solves

    (x1 - x0)/h =  dH/dp(xbar, pbar),   xbar = (1-delta) x0 + delta x1,
    (p1 - p0)/h = -dH/dx(xbar, pbar),   pbar = delta p0 + (1-delta) p1,

which is symplectic for every delta in [0, 1]: the implicit midpoint rule
at delta = 1/2 and the two adjoint symplectic Euler variants at the ends.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

Array = np.ndarray

KINDS = ("retraction", "verlet", "rk2", "rk4", "gl4")

_SQRT3 = np.sqrt(3.0)
# Two-stage Gauss collocation tableau (order 4, symplectic).
_GL4_A = np.array([[0.25, 0.25 - _SQRT3 / 6.0],
                   [0.25 + _SQRT3 / 6.0, 0.25]])
_GL4_B = np.array([0.5, 0.5])


class NewtonDivergence(RuntimeError):
    """The Newton iteration hit its cap or produced a non-finite residual."""

    def __init__(self, message: str, residual: float, iterations: int):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class SingularJacobian(RuntimeError):
    """The Newton matrix could not be factorised."""


@dataclass(frozen=True)
class IntegratorSpec:
    """Which one-step map to run and with which solver parameters."""

    kind: str
    delta: float = 0.5
    newton_tol: float = 1e-12
    newton_max_iters: int = 50
    fd_jacobian_step: float = 1e-7

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown integrator kind {self.kind!r}; pick one of {KINDS}")
        if not 0.0 <= self.delta <= 1.0:
            raise ValueError(f"delta must lie in [0, 1], got {self.delta}")
        if self.newton_tol <= 0 or self.fd_jacobian_step <= 0:
            raise ValueError("tolerances must be positive")
        if self.newton_max_iters < 1:
            raise ValueError("newton_max_iters must be at least 1")

    @property
    def label(self) -> str:
        """Stable identifier used for output files and summary rows."""
        if self.kind == "retraction":
            return f"retraction_d{self.delta:g}"
        return self.kind


@dataclass(frozen=True)
class StepInfo:
    """Diagnostics of a single step."""

    newton_iters: int
    residual: float
    midpoint: Array


@dataclass(frozen=True)
class StepFailure:
    """Record of the step at which an implicit solve gave up."""

    step_index: int
    message: str
    residual: float


@dataclass
class Trajectory:
    """A uniformly spaced sequence of states with per-step diagnostics.

    ``states`` has one row per time node in the flat layout [x, p].  When an
    implicit solve diverges the trajectory holds the completed prefix and
    ``failure`` records the offending step; callers that need hard errors
    should check ``ok``.
    """

    times: Array
    states: Array
    midpoints: Array
    newton_iters: Array
    residuals: Array
    n: int
    k: int
    failure: StepFailure | None = None

    @property
    def ok(self) -> bool:
        return self.failure is None

    @property
    def n_steps(self) -> int:
        return self.states.shape[0] - 1

    def __len__(self) -> int:
        return self.states.shape[0]


def _as_state(z) -> Array:
    if hasattr(z, "to_array"):
        z = z.to_array()
    return np.asarray(z, dtype=float).copy()


def hamiltonian_field(system, z: Array) -> Array:
    """The canonical vector field (dH/dp, -dH/dx) on flat states."""
    N = system.n + system.k
    hx, hp = system.grad_blocks(z[:N], z[N:])
    return np.concatenate([hp, -hx])


def fd_jacobian(fn: Callable[[Array], Array], x: Array, step: float) -> Array:
    """Central finite-difference Jacobian of fn at x."""
    d = x.size
    J = np.empty((d, d))
    for j in range(d):
        e = np.zeros(d)
        e[j] = step
        J[:, j] = (fn(x + e) - fn(x - e)) / (2.0 * step)
    return J


def newton_solve(residual, jacobian, guess, tol: float = 1e-12,
                 max_iters: int = 50,
                 stall_factor: float = 100.0) -> tuple[Array, int, float]:
    """Dense Newton iteration; returns (solution, iterations, residual norm).

    Stops once the max-norm of the residual is at or below ``tol``.  When
    the residual evaluation has a floating-point floor above ``tol`` (large
    state components divided by a small step leave the true residual
    unrepresentable), the iteration stalls just above it; the best iterate
    is then accepted provided its residual lies within ``stall_factor`` of
    ``tol``, so callers see the achievable precision rather than a spurious
    failure.  Raises :class:`NewtonDivergence` on a non-finite residual or
    when the cap is reached, and :class:`SingularJacobian` when the linear
    solve fails.
    """
    x = np.asarray(guess, dtype=float).copy()
    rnorm = np.inf
    best_x, best_r = x, np.inf
    stalls = 0
    for it in range(max_iters + 1):
        r = residual(x)
        if not np.all(np.isfinite(r)):
            raise NewtonDivergence("non-finite residual", float("nan"), it)
        rnorm = float(np.max(np.abs(r)))
        if rnorm <= tol:
            return x, it, rnorm
        if rnorm < best_r:
            best_x, best_r, stalls = x.copy(), rnorm, 0
        else:
            stalls += 1
            if stalls >= 2 and best_r <= stall_factor * tol:
                return best_x, it, best_r
        if it == max_iters:
            break
        try:
            dx = np.linalg.solve(jacobian(x), r)
        except np.linalg.LinAlgError as exc:
            raise SingularJacobian(f"singular Newton matrix at iteration {it}") from exc
        x -= dx
    raise NewtonDivergence(
        f"no convergence within {max_iters} iterations (residual {rnorm:.3e})",
        rnorm, max_iters)


def _field_jacobian(system, x: Array, p: Array, fd_step: float) -> Array:
    """Jacobian of the canonical field, analytic when the system allows."""
    blocks = system.hess_blocks(x, p) if hasattr(system, "hess_blocks") else None
    N = x.size
    if blocks is None:
        z = np.concatenate([x, p])
        return fd_jacobian(lambda w: hamiltonian_field(system, w), z, fd_step)
    hxx, hxp, hpp = blocks
    Df = np.empty((2 * N, 2 * N))
    Df[:N, :N] = hxp.T          # d(dH/dp)/dx
    Df[:N, N:] = hpp
    Df[N:, :N] = -hxx
    Df[N:, N:] = -hxp
    return Df


def retraction_step(system, z0, h: float, delta: float = 0.5,
                    spec: IntegratorSpec | None = None) -> tuple[Array, StepInfo]:
    """One step of the delta-split implicit scheme.

    Solves the coupled update with Newton from an explicit-Euler guess and
    returns (z1, info); info.midpoint holds the barycentric state at which
    the field was balanced.  The residual is scaled by 1/h, so newton_tol
    bounds the defect of the time-derivative equations themselves.
    """
    if spec is None:
        spec = IntegratorSpec("retraction", delta=delta)
    z0 = _as_state(z0)
    N = system.n + system.k
    if z0.size != 2 * N:
        raise ValueError(f"state must have {2 * N} components")
    if h == 0.0:
        return z0.copy(), StepInfo(0, 0.0, z0.copy())
    x0, p0 = z0[:N], z0[N:]

    # The unknown is the increment d = z1 - z0: it stays O(h) even when the
    # state components are large, which keeps the residual resolvable in
    # floating point over long runs.
    def barycenter(d: Array) -> tuple[Array, Array]:
        xb = x0 + delta * d[:N]
        pb = p0 + (1.0 - delta) * d[N:]
        return xb, pb

    def residual(d: Array) -> Array:
        xb, pb = barycenter(d)
        hx, hp = system.grad_blocks(xb, pb)
        return np.concatenate([d[:N] / h - hp, d[N:] / h + hx])

    use_analytic = getattr(system, "has_hessian", False)

    def jacobian(d: Array) -> Array:
        if not use_analytic:
            return fd_jacobian(residual, d, spec.fd_jacobian_step)
        xb, pb = barycenter(d)
        hxx, hxp, hpp = system.hess_blocks(xb, pb)
        J = np.zeros((2 * N, 2 * N))
        eye = np.eye(N) / h
        J[:N, :N] = eye - delta * hxp.T
        J[:N, N:] = -(1.0 - delta) * hpp
        J[N:, :N] = delta * hxx
        J[N:, N:] = eye + (1.0 - delta) * hxp
        return J

    guess = h * hamiltonian_field(system, z0)
    d, iters, rnorm = newton_solve(residual, jacobian, guess,
                                   spec.newton_tol, spec.newton_max_iters)
    xb, pb = barycenter(d)
    return z0 + d, StepInfo(iters, rnorm, np.concatenate([xb, pb]))


def verlet_step(system, z0, h: float,
                spec: IntegratorSpec | None = None) -> tuple[Array, StepInfo]:
    """Composition of the two end-point splits on half steps.

    The final-point half (delta = 1) runs first, then the initial-point
    half (delta = 0).  Both halves then balance the position update on the
    shared interior state, so the configuration increment of the full step
    points along the constraint frame at the exact interval midpoint; on a
    separable quadratic Hamiltonian the composition is the classical
    leapfrog in its drift-kick-drift form.
    """
    if spec is None:
        spec = IntegratorSpec("verlet")
    zm, info1 = retraction_step(system, z0, 0.5 * h, delta=1.0, spec=spec)
    z1, info2 = retraction_step(system, zm, 0.5 * h, delta=0.0, spec=spec)
    return z1, StepInfo(info1.newton_iters + info2.newton_iters,
                        max(info1.residual, info2.residual), zm)


def rk2_step(system, z0, h: float) -> tuple[Array, StepInfo]:
    """Classical explicit midpoint rule (second order, not symplectic)."""
    z0 = _as_state(z0)
    k1 = hamiltonian_field(system, z0)
    k2 = hamiltonian_field(system, z0 + 0.5 * h * k1)
    z1 = z0 + h * k2
    return z1, StepInfo(0, 0.0, 0.5 * (z0 + z1))


def rk4_step(system, z0, h: float) -> tuple[Array, StepInfo]:
    """Classical fourth-order Runge-Kutta step (not symplectic)."""
    z0 = _as_state(z0)
    k1 = hamiltonian_field(system, z0)
    k2 = hamiltonian_field(system, z0 + 0.5 * h * k1)
    k3 = hamiltonian_field(system, z0 + 0.5 * h * k2)
    k4 = hamiltonian_field(system, z0 + h * k3)
    z1 = z0 + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return z1, StepInfo(0, 0.0, 0.5 * (z0 + z1))


def gl4_step(system, z0, h: float,
             spec: IntegratorSpec | None = None) -> tuple[Array, StepInfo]:
    """Two-stage Gauss collocation step (order 4, symplectic).

    The stacked stage equations are solved with Newton to spec.newton_tol.
    """
    if spec is None:
        spec = IntegratorSpec("gl4")
    z0 = _as_state(z0)
    d = z0.size
    N = system.n + system.k

    def stage_points(K: Array) -> tuple[Array, Array]:
        k1, k2 = K[:d], K[d:]
        s1 = z0 + h * (_GL4_A[0, 0] * k1 + _GL4_A[0, 1] * k2)
        s2 = z0 + h * (_GL4_A[1, 0] * k1 + _GL4_A[1, 1] * k2)
        return s1, s2

    def residual(K: Array) -> Array:
        s1, s2 = stage_points(K)
        return np.concatenate([K[:d] - hamiltonian_field(system, s1),
                               K[d:] - hamiltonian_field(system, s2)])

    use_analytic = getattr(system, "has_hessian", False)

    def jacobian(K: Array) -> Array:
        if not use_analytic:
            return fd_jacobian(residual, K, spec.fd_jacobian_step)
        s1, s2 = stage_points(K)
        J = np.eye(2 * d)
        for i, s in enumerate((s1, s2)):
            Df = _field_jacobian(system, s[:N], s[N:], spec.fd_jacobian_step)
            for j in range(2):
                J[i * d:(i + 1) * d, j * d:(j + 1) * d] -= h * _GL4_A[i, j] * Df
        return J

    f0 = hamiltonian_field(system, z0)
    guess = np.concatenate([f0, f0])
    K, iters, rnorm = newton_solve(residual, jacobian, guess,
                                   spec.newton_tol, spec.newton_max_iters)
    z1 = z0 + h * (_GL4_B[0] * K[:d] + _GL4_B[1] * K[d:])
    return z1, StepInfo(iters, rnorm, 0.5 * (z0 + z1))


def make_step(spec: IntegratorSpec):
    """Bind a spec to its one-step map: returns fn(system, z, h) -> (z1, info)."""
    if spec.kind == "retraction":
        return lambda system, z, h: retraction_step(system, z, h, spec.delta, spec)
    if spec.kind == "verlet":
        return lambda system, z, h: verlet_step(system, z, h, spec)
    if spec.kind == "rk2":
        return lambda system, z, h: rk2_step(system, z, h)
    if spec.kind == "rk4":
        return lambda system, z, h: rk4_step(system, z, h)
    return lambda system, z, h: gl4_step(system, z, h, spec)


def integrate(system, z0, h: float, n_steps: int,
              spec: IntegratorSpec) -> Trajectory:
    """Apply the selected one-step map n_steps times.

    On Newton divergence the completed prefix is returned with ``failure``
    set rather than raising, so benchmark drivers can distinguish solver
    breakdown from drift.
    """
    if n_steps < 1:
        raise ValueError("n_steps must be at least 1")
    z = _as_state(z0)
    N2 = z.size
    step = make_step(spec)

    states = np.empty((n_steps + 1, N2))
    midpoints = np.empty((n_steps, N2))
    iters = np.zeros(n_steps, dtype=np.int64)
    resids = np.zeros(n_steps)
    states[0] = z
    failure = None
    done = n_steps
    for i in range(n_steps):
        try:
            z, info = step(system, z, h)
        except NewtonDivergence as exc:
            failure = StepFailure(i, str(exc), exc.residual)
            done = i
            break
        states[i + 1] = z
        midpoints[i] = info.midpoint
        iters[i] = info.newton_iters
        resids[i] = info.residual

    times = np.arange(done + 1) * h
    return Trajectory(times=times, states=states[:done + 1],
                      midpoints=midpoints[:done], newton_iters=iters[:done],
                      residuals=resids[:done], n=system.n, k=system.k,
                      failure=failure)
