"""Velocity-constraint distributions in adapted coordinates.

A rank-k distribution on an n-dimensional configuration space is described
by an anchor matrix rho(q) whose columns span the allowed velocities:
admissible motion satisfies qdot = rho(q) y for fiber coordinates y.  The
module provides the inclusion into natural velocity coordinates, the
orthogonal projection back onto the distribution, the induced discretization
map on the distribution, and the uncontrolled (Hamel) dynamics.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .geometry import delta_map_forward

Array = np.ndarray


@dataclass(frozen=True)
class DistributionModel:
    """Anchor data for a rank-k distribution on an n-dimensional base.

    ``rho(q)`` is the n x k anchor, ``drho(q)`` its partials with layout
    drho[i, A, j] = d rho^i_A / d q^j.  Projection data is either a
    closed-form ``projector(q, qdot) -> y`` or a Riemannian ``metric(q)``
    used through the normal equations; a closed form wins when both are
    present.  ``d2rho`` (layout [i, A, j, l]) is optional and only needed
    by integrators that assemble analytic Newton matrices.
    """

    n: int
    k: int
    rho: Callable[[Array], Array]
    drho: Callable[[Array], Array]
    metric: Callable[[Array], Array] | None = None
    projector: Callable[[Array, Array], Array] | None = None
    d2rho: Callable[[Array], Array] | None = None
    coord_names: tuple[str, ...] = ()
    fiber_names: tuple[str, ...] = ()

    def __post_init__(self):
        if self.n < 1 or self.k < 1 or self.k > self.n:
            raise ValueError(f"need 1 <= k <= n, got n={self.n}, k={self.k}")
        if self.metric is None and self.projector is None:
            raise ValueError("projection data required: supply a projector or a metric")
        if not self.coord_names:
            object.__setattr__(self, "coord_names",
                               tuple(f"q{i}" for i in range(self.n)))
        if not self.fiber_names:
            object.__setattr__(self, "fiber_names",
                               tuple(f"y{a}" for a in range(self.k)))


@dataclass(frozen=True)
class AdaptedPoint:
    """A point of the distribution: base coordinates q and fiber coordinates y."""

    q: Array
    y: Array

    def __post_init__(self):
        object.__setattr__(self, "q", np.atleast_1d(np.asarray(self.q, dtype=float)))
        object.__setattr__(self, "y", np.atleast_1d(np.asarray(self.y, dtype=float)))

    def to_array(self) -> Array:
        return np.concatenate([self.q, self.y])


@dataclass(frozen=True)
class HamelModel:
    """A distribution plus the data of its uncontrolled dynamics.

    ``gd(q)`` is the k x k restricted kinetic metric.  The drift ``f(q, y)``
    is the fiber acceleration of free motion; quadratic frame terms and any
    potential force are folded into it, so models supply f and its first
    partials directly.  Second partials are optional and enable analytic
    Newton matrices downstream.
    """

    dist: DistributionModel
    gd: Callable[[Array], Array]
    drift: Callable[[Array, Array], Array]
    drift_dq: Callable[[Array, Array], Array]   # (q, y) -> (k, n)
    drift_dy: Callable[[Array, Array], Array]   # (q, y) -> (k, k)
    drift_dqq: Callable[[Array, Array], Array] | None = None  # (k, n, n)
    drift_dqy: Callable[[Array, Array], Array] | None = None  # (k, n, k)
    drift_dyy: Callable[[Array, Array], Array] | None = None  # (k, k, k)

    @property
    def n(self) -> int:
        return self.dist.n

    @property
    def k(self) -> int:
        return self.dist.k


def include(model: DistributionModel, pt: AdaptedPoint) -> tuple[Array, Array]:
    """Natural-coordinate representative of a distribution point: (q, rho(q) y)."""
    dist = getattr(model, "dist", model)
    return pt.q.copy(), dist.rho(pt.q) @ pt.y


def project(model: DistributionModel, q, qdot) -> Array:
    """Fiber coordinates of the orthogonal projection of (q, qdot) onto the
    distribution.

    Uses the model's closed-form projector when present, otherwise solves
    the normal equations y = (rho^T G rho)^{-1} rho^T G qdot.  Velocities
    already of the form rho(q) y0 are recovered exactly (up to roundoff).
    """
    dist = getattr(model, "dist", model)
    q = np.asarray(q, dtype=float)
    qdot = np.asarray(qdot, dtype=float)
    if dist.projector is not None:
        return np.asarray(dist.projector(q, qdot), dtype=float)
    G = dist.metric(q)
    R = dist.rho(q)
    A = R.T @ G @ R
    try:
        return np.linalg.solve(A, R.T @ (G @ qdot))
    except np.linalg.LinAlgError as exc:
        raise ValueError(f"degenerate distribution point: rho^T G rho singular at q={q}") from exc


def full_rank_defect(model: DistributionModel, q) -> float:
    """Smallest singular value of rho(q); positive values certify full rank."""
    dist = getattr(model, "dist", model)
    return float(np.linalg.svd(dist.rho(np.asarray(q, dtype=float)), compute_uv=False)[-1])


def induced_discretization(model: DistributionModel, pt: AdaptedPoint,
                           vel: tuple[Array, Array], delta: float
                           ) -> tuple[AdaptedPoint, AdaptedPoint]:
    """Discretization map induced on the distribution by the delta-split.

    The tangent vector (qdot, ydot) at pt is pushed into natural double-
    tangent coordinates (the drho chain rule on rho(q) y), the delta-split
    is applied on the resulting 2n-dimensional velocity chart, and each of
    the two output velocity points is projected back onto the distribution.

    The construction satisfies the discretization-map axioms for any
    distribution: the zeroth and first-order terms of the projected frame
    always cancel.  Beyond first order the output differs from the
    componentwise delta-split of the adapted coordinates by O(|vel|^2)
    terms whenever the base motion turns the frame, so agreement with the
    componentwise form is exact only in the base and in frame-constant
    fiber directions.
    """
    dist = getattr(model, "dist", model)
    qdot = np.asarray(vel[0], dtype=float)
    ydot = np.asarray(vel[1], dtype=float)
    if qdot.shape != (dist.n,) or ydot.shape != (dist.k,):
        raise ValueError("velocity blocks do not match the model dimensions")

    v_nat = dist.rho(pt.q) @ pt.y
    vdot_nat = np.einsum("iaj,j,a->i", dist.drho(pt.q), qdot, pt.y) + dist.rho(pt.q) @ ydot
    base = np.concatenate([pt.q, v_nat])
    tang = np.concatenate([qdot, vdot_nat])
    b0, b1 = delta_map_forward(base, tang, delta)

    def back(b: Array) -> AdaptedPoint:
        qa, va = b[:dist.n], b[dist.n:]
        return AdaptedPoint(qa, project(dist, qa, va))

    return back(b0), back(b1)


def hamel_vector_field(model: HamelModel, pt: AdaptedPoint) -> tuple[Array, Array]:
    """Uncontrolled dynamics in adapted coordinates: (rho(q) y, f(q, y))."""
    return model.dist.rho(pt.q) @ pt.y, model.drift(pt.q, pt.y)


def hamel_energy(model: HamelModel, pt: AdaptedPoint) -> float:
    """Kinetic energy of the restricted metric, 0.5 y^T gd(q) y."""
    return 0.5 * float(pt.y @ model.gd(pt.q) @ pt.y)


def admissibility_residual(model, q0, q1, y_mid, h: float) -> float:
    """Max-norm of (q1 - q0)/h - rho((q0+q1)/2) y_mid.

    Zero for a configuration step whose average velocity lies along the
    distribution frame at the interval midpoint.
    """
    dist = getattr(model, "dist", model)
    q0 = np.asarray(q0, dtype=float)
    q1 = np.asarray(q1, dtype=float)
    y_mid = np.asarray(y_mid, dtype=float)
    if h <= 0:
        raise ValueError("h must be positive")
    r = (q1 - q0) / h - dist.rho(0.5 * (q0 + q1)) @ y_mid
    return float(np.max(np.abs(r)))


def fd_drho(model: DistributionModel, q, step: float = 1e-5) -> Array:
    """Central finite differences of rho, same [i, A, j] layout as drho."""
    dist = getattr(model, "dist", model)
    q = np.asarray(q, dtype=float)
    out = np.empty((dist.n, dist.k, dist.n))
    for j in range(dist.n):
        e = np.zeros(dist.n)
        e[j] = step
        out[:, :, j] = (dist.rho(q + e) - dist.rho(q - e)) / (2.0 * step)
    return out
