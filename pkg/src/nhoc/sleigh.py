"""The knife-edge sleigh: a rigid body sliding on the plane whose contact
edge forbids sideways velocity, sin(theta) xdot - cos(theta) ydot = 0.

Configuration is (x, y, theta) with theta stored unwrapped; the allowed
velocities are spanned by the steering field (1/J) d/dtheta and the heading
field (cos(theta)/m) d/dx + (sin(theta)/m) d/dy, giving adapted fiber
coordinates (z1, z2).  Free motion keeps z1 and z2 constant; the controlled
problem weighs both inputs equally (W = I).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .nonholonomic import DistributionModel, HamelModel
from .ocp import OCPModel

Array = np.ndarray


@dataclass(frozen=True)
class SleighParams:
    """Mass m, inertia J about the center of mass, and contact offset a.

    The derived coefficient b = (a^2 m + J)/J rescales the steering term of
    the restricted kinetic energy; b = 1 exactly when a = 0.
    """

    m: float = 1.0
    J: float = 1.0
    a: float = 0.0

    def __post_init__(self):
        if self.m <= 0 or self.J <= 0:
            raise ValueError("m and J must be positive")
        if self.a < 0:
            raise ValueError("a must be nonnegative")

    @property
    def b(self) -> float:
        return (self.a ** 2 * self.m + self.J) / self.J


def sleigh_model(params: SleighParams = SleighParams()) -> OCPModel:
    """Assemble the sleigh as an optimal-control model.

    n = 3, k = 2.  The anchor columns are the steering and heading fields,
    the projector is the closed form z1 = J*thetadot,
    z2 = m*(xdot cos(theta) + ydot sin(theta)) (orthogonal for the kinetic
    metric diag(m, m, J)), the drift vanishes identically, and the control
    weight is the identity.  Reported controls are (u1, u2) = (z2dot, z1dot).
    """
    m, J = params.m, params.J

    def rho(q: Array) -> Array:
        th = q[2]
        return np.array([[0.0, np.cos(th) / m],
                         [0.0, np.sin(th) / m],
                         [1.0 / J, 0.0]])

    def drho(q: Array) -> Array:
        th = q[2]
        d = np.zeros((3, 2, 3))
        d[0, 1, 2] = -np.sin(th) / m
        d[1, 1, 2] = np.cos(th) / m
        return d

    def d2rho(q: Array) -> Array:
        th = q[2]
        d = np.zeros((3, 2, 3, 3))
        d[0, 1, 2, 2] = -np.cos(th) / m
        d[1, 1, 2, 2] = -np.sin(th) / m
        return d

    def projector(q: Array, qdot: Array) -> Array:
        th = q[2]
        return np.array([J * qdot[2],
                         m * (qdot[0] * np.cos(th) + qdot[1] * np.sin(th))])

    def metric(q: Array) -> Array:
        return np.diag([m, m, J])

    dist = DistributionModel(
        n=3, k=2, rho=rho, drho=drho, d2rho=d2rho,
        projector=projector, metric=metric,
        coord_names=("x", "y", "theta"), fiber_names=("z1", "z2"))

    b = params.b
    zero_k = np.zeros(2)

    hamel = HamelModel(
        dist=dist,
        gd=lambda q: np.diag([b / J, 1.0 / m]),
        drift=lambda q, y: zero_k.copy(),
        drift_dq=lambda q, y: np.zeros((2, 3)),
        drift_dy=lambda q, y: np.zeros((2, 2)),
        drift_dqq=lambda q, y: np.zeros((2, 3, 3)),
        drift_dqy=lambda q, y: np.zeros((2, 3, 2)),
        drift_dyy=lambda q, y: np.zeros((2, 2, 2)))

    return OCPModel(hamel=hamel, weight=np.eye(2), control_order=(1, 0))


def no_slip_residual(q: Array, qdot: Array) -> float:
    """The pointwise constraint sin(theta) xdot - cos(theta) ydot."""
    th = q[2]
    return float(np.sin(th) * qdot[0] - np.cos(th) * qdot[1])


# Canonical benchmark values: start the sleigh at (1, 1, pi) with small
# equal fiber velocities, a unit transverse momentum and all other momenta
# zero, and run 20 time units at h = 0.005 with unit constants.
BENCHMARK_INIT = (1.0, 1.0, np.pi, 0.05, 0.05, 0.0, 1.0, 0.0, 0.0, 0.0)
BENCHMARK_H = 0.005
BENCHMARK_T_FINAL = 20.0


def paper_experiment_config(out_dir=None):
    """The canonical five-method benchmark configuration.

    Initial state (x, y, theta, z1, z2, px, py, ptheta, p1, p2) =
    (1, 1, pi, 0.05, 0.05, 0, 1, 0, 0, 0), h = 0.005 over 20 time units
    (4000 steps), m = J = 1 and a = 0, comparing the midpoint split, the
    end-point composition, explicit RK2/RK4 and the two-stage Gauss method.
    """
    from .harness import ExperimentConfig
    from .integrators import IntegratorSpec

    return ExperimentConfig(
        model="sleigh",
        model_params={"m": 1.0, "J": 1.0, "a": 0.0},
        init=np.array(BENCHMARK_INIT),
        h=BENCHMARK_H,
        t_final=BENCHMARK_T_FINAL,
        integrators=(IntegratorSpec("retraction", delta=0.5),
                     IntegratorSpec("verlet"),
                     IntegratorSpec("rk2"),
                     IntegratorSpec("rk4"),
                     IntegratorSpec("gl4")),
        out_dir=out_dir)
