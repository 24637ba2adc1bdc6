"""Experiment driver: run the benchmark integrations, compute drift metrics,
and write the delimited outputs the plotting component consumes.

Per-method trajectory files share one fixed schema,

    step,t,x,y,theta,z1,z2,px,py,ptheta,p1,p2,H,phi_d,newton_iters

with floats serialized at 17 significant digits so rereading is bit-exact.
The phi_d cell of row k holds the discrete no-slip value of the step ending
at row k and is empty on row 0, as is newton_iters.  A summary.csv collects
per-method drift maxima, solver effort, wall time and status.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .integrators import IntegratorSpec, Trajectory, integrate
from .ocp import CostatePoint, OCPModel, hamiltonian
from .sleigh import SleighParams, sleigh_model

Array = np.ndarray

SUMMARY_COLUMNS = ("method", "max_abs_phi_d", "max_abs_dH",
                   "mean_newton_iters", "wall_time_s", "status")


def phi_d(q_k, q_next) -> float:
    """Discrete no-slip constraint value of a configuration step.

    Both arguments are (x, y, theta) triples; the heading is taken at the
    averaged angle, so increments pointing along the averaged heading
    annihilate the value identically.
    """
    q_k = np.asarray(q_k, dtype=float)
    q_next = np.asarray(q_next, dtype=float)
    mid = 0.5 * (q_k[2] + q_next[2])
    return float((q_next[0] - q_k[0]) * np.sin(mid)
                 - (q_next[1] - q_k[1]) * np.cos(mid))


def _build_sleigh(params: dict) -> OCPModel:
    return sleigh_model(SleighParams(**params))


# name -> (model builder, optional per-step configuration constraint)
MODEL_REGISTRY = {
    "sleigh": (_build_sleigh, phi_d),
}


def build_model(name: str, params: dict | None = None):
    """Look up a registered model; returns (model, constraint_fn | None)."""
    try:
        builder, constraint = MODEL_REGISTRY[name]
    except KeyError:
        known = ", ".join(sorted(MODEL_REGISTRY))
        raise ValueError(f"unknown model {name!r}; registered models: {known}") from None
    return builder(dict(params or {})), constraint


@dataclass
class ExperimentConfig:
    """Everything needed to reproduce one benchmark run."""

    model: str = "sleigh"
    model_params: dict = field(default_factory=dict)
    init: Array | None = None
    h: float = 0.005
    t_final: float = 20.0
    integrators: tuple[IntegratorSpec, ...] = (IntegratorSpec("retraction", delta=0.5),)
    out_dir: str | Path | None = None
    seed: int = 0

    def __post_init__(self):
        if self.h <= 0 or self.t_final <= 0:
            raise ValueError("h and t_final must be positive")
        ratio = self.t_final / self.h
        if abs(ratio - round(ratio)) > 0.5 or round(ratio) < 1:
            raise ValueError(f"t_final/h = {ratio} does not give a usable step count")
        if self.init is not None:
            self.init = np.asarray(self.init, dtype=float)

    @property
    def n_steps(self) -> int:
        return int(round(self.t_final / self.h))


def state_column_names(model: OCPModel) -> list[str]:
    """Column names of the flat state, matching the trajectory file schema."""
    dist = model.dist
    cols = list(dist.coord_names) + list(dist.fiber_names)
    cols += [f"p{c}" for c in dist.coord_names]
    cols += [f"p{i + 1}" for i in range(dist.k)]
    return cols


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def trajectory_metrics(model: OCPModel, traj: Trajectory, constraint=None):
    """Per-row energies and per-step constraint values of a trajectory."""
    n, k = model.n, model.k
    energies = np.array([
        hamiltonian(model, CostatePoint.from_array(traj.states[i], n, k))
        for i in range(len(traj))
    ])
    phis = None
    if constraint is not None:
        phis = np.array([
            constraint(traj.states[i][:n], traj.states[i + 1][:n])
            for i in range(traj.n_steps)
        ])
    return energies, phis


def write_trajectory_csv(path, model: OCPModel, traj: Trajectory,
                         energies: Array, phis: Array | None) -> None:
    cols = ["step", "t"] + state_column_names(model) + ["H", "phi_d", "newton_iters"]
    lines = [",".join(cols)]
    for i in range(len(traj)):
        row = [str(i), _fmt(traj.times[i])]
        row += [_fmt(v) for v in traj.states[i]]
        row.append(_fmt(energies[i]))
        if i == 0:
            row += ["", ""]
        else:
            row.append(_fmt(phis[i - 1]) if phis is not None else "")
            row.append(str(int(traj.newton_iters[i - 1])))
        lines.append(",".join(row))
    Path(path).write_text("\n".join(lines) + "\n")


def read_trajectory_csv(path):
    """Read a trajectory file back; returns (header, rows) with floats where
    the cell is nonempty."""
    text = Path(path).read_text().strip().splitlines()
    header = text[0].split(",")
    rows = []
    for line in text[1:]:
        cells = line.split(",")
        rows.append([float(c) if c != "" else None for c in cells])
    return header, rows


@dataclass(frozen=True)
class MethodSummary:
    method: str
    max_abs_phi_d: float
    max_abs_dH: float
    mean_newton_iters: float
    wall_time_s: float
    status: str


def run_experiment(config: ExperimentConfig):
    """Integrate every configured method and write one trajectory file per
    method plus summary.csv.

    A Newton breakdown in one method is recorded in its summary row while
    the remaining methods still run.  Returns the list of summaries.
    """
    if config.out_dir is None:
        raise ValueError("config.out_dir must be set")
    if config.init is None:
        raise ValueError("config.init must be set")
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    model, constraint = build_model(config.model, config.model_params)

    summaries = []
    for spec in config.integrators:
        t0 = time.perf_counter()
        traj = integrate(model, config.init, config.h, config.n_steps, spec)
        wall = time.perf_counter() - t0
        energies, phis = trajectory_metrics(model, traj, constraint)
        write_trajectory_csv(out / f"{spec.label}.csv", model, traj, energies, phis)
        status = "ok" if traj.ok else f"diverged@{traj.failure.step_index}"
        summaries.append(MethodSummary(
            method=spec.label,
            max_abs_phi_d=float(np.max(np.abs(phis))) if phis is not None and len(phis) else float("nan"),
            max_abs_dH=float(np.max(np.abs(energies - energies[0]))),
            mean_newton_iters=float(np.mean(traj.newton_iters)) if traj.n_steps else 0.0,
            wall_time_s=wall,
            status=status))

    lines = [",".join(SUMMARY_COLUMNS)]
    for s in summaries:
        lines.append(",".join([s.method, _fmt(s.max_abs_phi_d), _fmt(s.max_abs_dH),
                               _fmt(s.mean_newton_iters), f"{s.wall_time_s:.6f}",
                               s.status]))
    (out / "summary.csv").write_text("\n".join(lines) + "\n")
    return summaries


@dataclass(frozen=True)
class OrderFit:
    """Least-squares slope of log(global error) against log(h)."""

    label: str
    slope: float
    h_list: tuple[float, ...]
    errors: tuple[float, ...]


def convergence_study(model: OCPModel, init, specs, h_list, t_final: float,
                      ref_h: float = 1e-5):
    """Fit the observed convergence order of each method.

    The global error is the max-norm difference of the final state against
    a fourth-order explicit reference computed at ``ref_h``.  ``h_list``
    must be descending with at least three entries, each dividing t_final.
    """
    h_list = list(h_list)
    if len(h_list) < 3 or any(h_list[i] <= h_list[i + 1] for i in range(len(h_list) - 1)):
        raise ValueError("h_list must be descending with at least 3 entries")
    init = np.asarray(init, dtype=float)

    n_ref = int(round(t_final / ref_h))
    ref = integrate(model, init, ref_h, n_ref, IntegratorSpec("rk4"))
    if not ref.ok:
        raise RuntimeError("reference integration failed")
    z_ref = ref.states[-1]

    fits = []
    for spec in specs:
        errors = []
        for h in h_list:
            n = int(round(t_final / h))
            if abs(t_final / h - n) > 1e-9:
                raise ValueError(f"h={h} does not divide t_final={t_final}")
            traj = integrate(model, init, h, n, spec)
            if not traj.ok:
                raise RuntimeError(f"{spec.label} diverged at h={h}: {traj.failure.message}")
            errors.append(float(np.max(np.abs(traj.states[-1] - z_ref))))
        slope = float(np.polyfit(np.log(h_list), np.log(errors), 1)[0])
        fits.append(OrderFit(spec.label, slope, tuple(h_list), tuple(errors)))
    return fits


def parse_config_file(path) -> dict[str, str]:
    """Flat key=value experiment file; '#' starts a comment."""
    values: dict[str, str] = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"bad config line: {raw!r}")
        key, val = line.split("=", 1)
        values[key.strip()] = val.strip()
    return values
