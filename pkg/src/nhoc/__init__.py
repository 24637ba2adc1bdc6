"""Symplectic integrators built from discretization maps, applied to the
costate dynamics of fully actuated nonholonomic optimal control, with a
knife-edge sleigh benchmark."""

from .geometry import (CotangentDeltaMap, DeltaMap, check_discretization_axioms,
                       cotangent_lift_forward, cotangent_lift_inverse,
                       delta_map_forward, delta_map_inverse,
                       symplecticity_defect)
from .harness import (ExperimentConfig, build_model, convergence_study, phi_d,
                      run_experiment)
from .integrators import (IntegratorSpec, NewtonDivergence, SingularJacobian,
                          Trajectory, gl4_step, integrate, newton_solve,
                          retraction_step, rk2_step, rk4_step, verlet_step)
from .nonholonomic import (AdaptedPoint, DistributionModel, HamelModel,
                           admissibility_residual, hamel_vector_field, include,
                           induced_discretization, project)
from .ocp import (CostatePoint, OCPModel, hamiltonian, hamiltonian_gradient,
                  hamiltonian_vector_field, lagrangian_L, legendre,
                  reconstruct_controls_and_cost, regularity_check, ydot_from_p)
from .sleigh import SleighParams, paper_experiment_config, sleigh_model

__version__ = "0.1.0"

__all__ = [
    "AdaptedPoint", "CostatePoint", "CotangentDeltaMap", "DeltaMap",
    "DistributionModel", "ExperimentConfig", "HamelModel", "IntegratorSpec",
    "NewtonDivergence", "OCPModel", "SingularJacobian", "SleighParams",
    "Trajectory", "admissibility_residual", "build_model",
    "check_discretization_axioms", "convergence_study",
    "cotangent_lift_forward", "cotangent_lift_inverse", "delta_map_forward",
    "delta_map_inverse", "gl4_step", "hamel_vector_field", "hamiltonian",
    "hamiltonian_gradient", "hamiltonian_vector_field", "include",
    "induced_discretization", "integrate", "lagrangian_L", "legendre",
    "newton_solve", "paper_experiment_config", "phi_d", "project",
    "reconstruct_controls_and_cost", "regularity_check", "retraction_step",
    "rk2_step", "rk4_step", "run_experiment", "sleigh_model",
    "symplecticity_defect", "verlet_step", "ydot_from_p",
]
