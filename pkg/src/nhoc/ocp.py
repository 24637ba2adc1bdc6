"""The costate side of fully actuated optimal control on a distribution.

With a quadratic control cost 0.5 u^T W u and controlled fiber dynamics
ydot = f(q, y) + u, the Legendre transform is closed form and the maximum-
principle Hamiltonian on the costate space reduces to

    H(q, y, pq, py) = 0.5 py^T W^{-1} py + py . f(q, y) + pq . rho(q) y.

This module evaluates H, its analytic first and second derivatives, the
Hamiltonian vector field, and reconstructs controls and running cost from a
computed trajectory.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .nonholonomic import HamelModel

Array = np.ndarray


@dataclass(frozen=True)
class CostatePoint:
    """A point of the costate space: (q, y, pq, py)."""

    q: Array
    y: Array
    pq: Array
    py: Array

    def __post_init__(self):
        for name in ("q", "y", "pq", "py"):
            object.__setattr__(self, name,
                               np.atleast_1d(np.asarray(getattr(self, name), dtype=float)))
        if self.q.shape != self.pq.shape or self.y.shape != self.py.shape:
            raise ValueError("momentum blocks must match the shapes of q and y")

    def to_array(self) -> Array:
        """Flat layout [q, y, pq, py]: position block then momentum block."""
        return np.concatenate([self.q, self.y, self.pq, self.py])

    @classmethod
    def from_array(cls, z, n: int, k: int) -> "CostatePoint":
        z = np.asarray(z, dtype=float)
        if z.shape != (2 * (n + k),):
            raise ValueError(f"expected {2 * (n + k)} components, got shape {z.shape}")
        return cls(z[:n], z[n:n + k], z[n + k:2 * n + k], z[2 * n + k:])


@dataclass(frozen=True)
class OCPModel:
    """A Hamel model together with the control-cost weight W (k x k, SPD).

    ``control_order`` maps reported control slots to fiber slots, for
    systems whose conventional control labelling is a permutation of the
    fiber coordinates; cost and dynamics are unaffected by it.
    """

    hamel: HamelModel
    weight: Array
    control_order: tuple[int, ...] | None = None

    def __post_init__(self):
        W = np.asarray(self.weight, dtype=float)
        if W.shape != (self.hamel.k, self.hamel.k):
            raise ValueError(f"weight must be {self.hamel.k} x {self.hamel.k}")
        object.__setattr__(self, "weight", W)

    @property
    def n(self) -> int:
        return self.hamel.n

    @property
    def k(self) -> int:
        return self.hamel.k

    @property
    def dist(self):
        return self.hamel.dist

    @property
    def has_hessian(self) -> bool:
        """True when the model carries the second-order data needed for
        analytic Hamiltonian Hessians."""
        h = self.hamel
        return (h.dist.d2rho is not None and h.drift_dqq is not None
                and h.drift_dqy is not None and h.drift_dyy is not None)

    # Flat-block interface consumed by the integrators: x = (q, y) stacked,
    # p = (pq, py) stacked.
    def grad_blocks(self, x: Array, p: Array) -> tuple[Array, Array]:
        n, k = self.n, self.k
        z = CostatePoint(x[:n], x[n:], p[:n], p[n:])
        dq, dy, dpq, dpy = hamiltonian_gradient(self, z)
        return np.concatenate([dq, dy]), np.concatenate([dpq, dpy])

    def hess_blocks(self, x: Array, p: Array):
        return hamiltonian_hessian_blocks(self, x, p)


def _split(model: OCPModel, z: CostatePoint):
    if z.q.shape != (model.n,) or z.y.shape != (model.k,):
        raise ValueError("state does not match the model dimensions")
    return z.q, z.y, z.pq, z.py


def lagrangian_L(model: OCPModel, q, y, ydot) -> float:
    """Running cost of steering through (q, y) with fiber velocity ydot:
    0.5 (ydot - f)^T W (ydot - f)."""
    q = np.asarray(q, dtype=float)
    y = np.asarray(y, dtype=float)
    e = np.asarray(ydot, dtype=float) - model.hamel.drift(q, y)
    return 0.5 * float(e @ model.weight @ e)


def legendre(model: OCPModel, q, y, ydot) -> Array:
    """Fiber momentum of a fiber velocity: py = W (ydot - f(q, y))."""
    q = np.asarray(q, dtype=float)
    y = np.asarray(y, dtype=float)
    return model.weight @ (np.asarray(ydot, dtype=float) - model.hamel.drift(q, y))


def ydot_from_p(model: OCPModel, q, y, py) -> Array:
    """Fiber velocity of a fiber momentum: ydot = W^{-1} py + f(q, y);
    the inverse of :func:`legendre`."""
    q = np.asarray(q, dtype=float)
    y = np.asarray(y, dtype=float)
    return np.linalg.solve(model.weight, np.asarray(py, dtype=float)) \
        + model.hamel.drift(q, y)


def hamiltonian(model: OCPModel, z: CostatePoint) -> float:
    """Value of the costate Hamiltonian at z."""
    q, y, pq, py = _split(model, z)
    winv_py = np.linalg.solve(model.weight, py)
    return float(0.5 * py @ winv_py
                 + py @ model.hamel.drift(q, y)
                 + pq @ (model.dist.rho(q) @ y))


def hamiltonian_gradient(model: OCPModel, z: CostatePoint):
    """Analytic gradient of the Hamiltonian: (dH/dq, dH/dy, dH/dpq, dH/dpy)."""
    q, y, pq, py = _split(model, z)
    h = model.hamel
    R = h.dist.rho(q)
    dR = h.dist.drho(q)
    dq = h.drift_dq(q, y).T @ py + np.einsum("iaj,i,a->j", dR, pq, y)
    dy = R.T @ pq + h.drift_dy(q, y).T @ py
    dpq = R @ y
    dpy = np.linalg.solve(model.weight, py) + h.drift(q, y)
    return dq, dy, dpq, dpy


def hamiltonian_vector_field(model: OCPModel, z: CostatePoint):
    """Canonical equations: (qdot, ydot, pqdot, pydot) =
    (dH/dpq, dH/dpy, -dH/dq, -dH/dy)."""
    dq, dy, dpq, dpy = hamiltonian_gradient(model, z)
    return dpq, dpy, -dq, -dy


def hamiltonian_hessian_blocks(model: OCPModel, x: Array, p: Array):
    """Second derivatives of H in flat blocks: (Hxx, Hxp, Hpp), with
    Hpx = Hxp^T.  Returns None when the model lacks second-order data."""
    if not model.has_hessian:
        return None
    n, k = model.n, model.k
    q, y = x[:n], x[n:]
    pq, py = p[:n], p[n:]
    h = model.hamel
    R = h.dist.rho(q)
    dR = h.dist.drho(q)
    d2R = h.dist.d2rho(q)

    N = n + k
    Hxx = np.zeros((N, N))
    Hqq = (np.einsum("iajl,i,a->jl", d2R, pq, y)
           + np.einsum("cjl,c->jl", h.drift_dqq(q, y), py))
    Hqy = (np.einsum("iaj,i->ja", dR, pq)
           + np.einsum("cja,c->ja", h.drift_dqy(q, y), py))
    Hyy = np.einsum("cab,c->ab", h.drift_dyy(q, y), py)
    Hxx[:n, :n] = Hqq
    Hxx[:n, n:] = Hqy
    Hxx[n:, :n] = Hqy.T
    Hxx[n:, n:] = Hyy

    # Hxp[j, i] = d^2 H / dx_j dp_i; columns ordered (pq, py).
    Hxp = np.zeros((N, N))
    Hxp[:n, :n] = np.einsum("iaj,a->ji", dR, y)      # d(rho y)_i / d q_j
    Hxp[n:, :n] = R.T                                # d(rho y)_i / d y_a
    Hxp[:n, n:] = h.drift_dq(q, y).T
    Hxp[n:, n:] = h.drift_dy(q, y).T

    Hpp = np.zeros((N, N))
    Hpp[n:, n:] = np.linalg.inv(model.weight)
    return Hxx, Hxp, Hpp


def regularity_check(model: OCPModel, tol: float = 1e-12) -> bool:
    """True when the control cost is regular: |det W| above tol."""
    return bool(abs(np.linalg.det(model.weight)) > tol)


def controls_from_py(model: OCPModel, py) -> Array:
    """Control vector realising fiber momentum py, in the model's reported
    control ordering."""
    u = np.linalg.solve(model.weight, np.asarray(py, dtype=float))
    if model.control_order is not None:
        u = u[list(model.control_order)]
    return u


def reconstruct_controls_and_cost(model: OCPModel, trajectory):
    """Per-step controls at the scheme midpoints and the accumulated cost.

    Returns (us, j_total) where ``us[k]`` is the control on step k taken
    from the recorded midpoint state, and ``j_total`` is the trapezoidal
    rule applied to the running cost evaluated at the trajectory nodes.
    """
    n, k = model.n, model.k
    N = n + k
    mids = np.asarray(trajectory.midpoints, dtype=float)
    us = np.empty((mids.shape[0], k))
    for i in range(mids.shape[0]):
        us[i] = controls_from_py(model, mids[i, 2 * N - k:])
    states = np.asarray(trajectory.states, dtype=float)
    costs = np.empty(states.shape[0])
    for i in range(states.shape[0]):
        u_node = np.linalg.solve(model.weight, states[i, 2 * N - k:])
        costs[i] = 0.5 * float(u_node @ model.weight @ u_node)
    dt = np.diff(np.asarray(trajectory.times, dtype=float))
    j_total = float(np.sum(0.5 * (costs[1:] + costs[:-1]) * dt))
    return us, j_total
