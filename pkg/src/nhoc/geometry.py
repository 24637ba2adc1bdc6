"""Discretization maps on flat charts, their cotangent lifts, and numerical
checks of the two defining axioms and of symplecticity.

A discretization map splits a chart point and a tangent vector into two
nearby chart points.  The one-parameter family implemented here,

    (q, v)  ->  (q - delta*v,  q + (1 - delta)*v),        delta in [0, 1],

contains the midpoint split (delta = 1/2) as well as the initial-point
(delta = 0) and final-point (delta = 1) splits.  Its cotangent lift acts on
(q, p, qdot, pdot) and cross-weights the momentum endpoints, which is what
makes the lifted map symplectic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

Array = np.ndarray


def _vec(x, name: str) -> Array:
    v = np.atleast_1d(np.asarray(x, dtype=float))
    if v.ndim != 1:
        raise ValueError(f"{name} must be a scalar or 1-d array, got shape {v.shape}")
    return v


def _pair(a, b, names: str) -> tuple[Array, Array]:
    va, vb = _vec(a, names[0]), _vec(b, names[1])
    if va.shape != vb.shape:
        raise ValueError(
            f"dimension mismatch: {names[0]} has shape {va.shape}, "
            f"{names[1]} has shape {vb.shape}"
        )
    return va, vb


def delta_map_forward(q, v, delta: float) -> tuple[Array, Array]:
    """Split (q, v) into the two chart points (q - delta*v, q + (1-delta)*v).

    With v = 0 both outputs equal q, and the difference of the two outputs
    is always v, so the map satisfies the discretization-map axioms exactly.
    """
    q, v = _pair(q, v, ("q", "v"))
    return q - delta * v, q + (1.0 - delta) * v


def delta_map_inverse(q0, q1, delta: float) -> tuple[Array, Array]:
    """Recover (q, v) from a pair of chart points: the affine inverse of
    :func:`delta_map_forward`, q = (1-delta)*q0 + delta*q1 and v = q1 - q0."""
    q0, q1 = _pair(q0, q1, ("q0", "q1"))
    return (1.0 - delta) * q0 + delta * q1, q1 - q0


def cotangent_lift_forward(q, p, qdot, pdot, delta: float):
    """Lift the delta-split to phase space.

    Returns (q0, p0, q1, p1) with

        q0 = q - delta*qdot          q1 = q + (1-delta)*qdot
        p0 = p - (1-delta)*pdot      p1 = p + delta*pdot

    Note the cross-weighting: positions split with (delta, 1-delta) while
    momenta split with (1-delta, delta).  This asymmetry is forced by the
    lifting construction and is what makes the induced one-step maps
    symplectic for every delta, not only for the midpoint.
    """
    q, qdot = _pair(q, qdot, ("q", "qdot"))
    p, pdot = _pair(p, pdot, ("p", "pdot"))
    if q.shape != p.shape:
        raise ValueError("dimension mismatch between position and momentum blocks")
    q0 = q - delta * qdot
    q1 = q + (1.0 - delta) * qdot
    p0 = p - (1.0 - delta) * pdot
    p1 = p + delta * pdot
    return q0, p0, q1, p1


def cotangent_lift_inverse(q0, p0, q1, p1, delta: float):
    """Invert :func:`cotangent_lift_forward`: returns (q, p, qdot, pdot)."""
    q0, q1 = _pair(q0, q1, ("q0", "q1"))
    p0, p1 = _pair(p0, p1, ("p0", "p1"))
    if q0.shape != p0.shape:
        raise ValueError("dimension mismatch between position and momentum blocks")
    q = (1.0 - delta) * q0 + delta * q1
    p = delta * p0 + (1.0 - delta) * p1
    return q, p, q1 - q0, p1 - p0


@dataclass(frozen=True)
class DeltaMap:
    """A delta-split bound to a fixed parameter and chart dimension."""

    delta: float
    dim: int

    def __post_init__(self):
        if not 0.0 <= self.delta <= 1.0:
            raise ValueError(f"delta must lie in [0, 1], got {self.delta}")
        if self.dim < 1:
            raise ValueError("dim must be a positive integer")

    def forward(self, q, v):
        return delta_map_forward(q, v, self.delta)

    def inverse(self, q0, q1):
        return delta_map_inverse(q0, q1, self.delta)

    def __call__(self, q, v):
        return self.forward(q, v)


@dataclass(frozen=True)
class CotangentDeltaMap:
    """The lifted delta-split acting on 4*dim numbers (q, p, qdot, pdot)."""

    delta: float
    dim: int

    def __post_init__(self):
        if not 0.0 <= self.delta <= 1.0:
            raise ValueError(f"delta must lie in [0, 1], got {self.delta}")
        if self.dim < 1:
            raise ValueError("dim must be a positive integer")

    def forward(self, q, p, qdot, pdot):
        return cotangent_lift_forward(q, p, qdot, pdot, self.delta)

    def inverse(self, q0, p0, q1, p1):
        return cotangent_lift_inverse(q0, p0, q1, p1, self.delta)


@dataclass(frozen=True)
class AxiomReport:
    """Measured defects of the two discretization-map axioms at one point."""

    zero_defect: float      # max |map(q, 0) - (q, q)|
    identity_defect: float  # max |D_v R2(q,0) - D_v R1(q,0) - I|
    tol: float

    @property
    def passed(self) -> bool:
        return self.zero_defect <= self.tol and self.identity_defect <= self.tol


def check_discretization_axioms(map_fn, q, tol: float = 1e-8,
                                fd_step: float = 1e-5) -> AxiomReport:
    """Numerically verify the two discretization-map axioms at a chart point.

    ``map_fn(q, v)`` must return a pair of chart points.  Checks that
    (i) the zero vector maps to the doubled base point and (ii) the
    difference of the central finite-difference Jacobians of the two output
    branches with respect to v at v = 0 equals the identity matrix.
    The report carries the max defect of each condition; nothing is raised.
    """
    if hasattr(map_fn, "forward"):
        map_fn = map_fn.forward
    q = _vec(q, "q")
    d = q.size
    r1, r2 = (np.asarray(x, dtype=float) for x in map_fn(q, np.zeros(d)))
    zero_defect = max(np.max(np.abs(r1 - q)), np.max(np.abs(r2 - q)))

    diff = np.empty((d, d))
    for j in range(d):
        e = np.zeros(d)
        e[j] = fd_step
        a1, a2 = (np.asarray(x, dtype=float) for x in map_fn(q, e))
        b1, b2 = (np.asarray(x, dtype=float) for x in map_fn(q, -e))
        d1 = (a1 - b1) / (2.0 * fd_step)
        d2 = (a2 - b2) / (2.0 * fd_step)
        diff[:, j] = d2 - d1
    identity_defect = float(np.max(np.abs(diff - np.eye(d))))
    return AxiomReport(float(zero_defect), identity_defect, tol)


def canonical_symplectic_matrix(n: int) -> Array:
    """The canonical skew matrix [[0, I], [-I, 0]] on 2n numbers."""
    J = np.zeros((2 * n, 2 * n))
    J[:n, n:] = np.eye(n)
    J[n:, :n] = -np.eye(n)
    return J


def symplecticity_defect(step, z, h: float, fd_step: float = 1e-5) -> float:
    """Max-abs entry of M^T J M - J for the Jacobian M of z |-> step(z, h).

    M is built from central finite differences, so the result of a truly
    symplectic map is bounded by differentiation noise rather than zero.
    Solver failures inside ``step`` propagate to the caller.
    """
    z = np.asarray(z, dtype=float)
    d = z.size
    if d % 2 != 0:
        raise ValueError("state must have an even number of components")
    M = np.empty((d, d))
    for j in range(d):
        zp_in = z.copy()
        zp_in[j] += fd_step
        zm_in = z.copy()
        zm_in[j] -= fd_step
        zp = np.asarray(step(zp_in, h), dtype=float)
        zm = np.asarray(step(zm_in, h), dtype=float)
        # divide by the realized perturbation so e.g. the identity map
        # yields exactly M = I regardless of rounding in z + e
        M[:, j] = (zp - zm) / (zp_in[j] - zm_in[j])
    J = canonical_symplectic_matrix(d // 2)
    return float(np.max(np.abs(M.T @ J @ M - J)))
