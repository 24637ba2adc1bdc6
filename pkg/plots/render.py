#!/usr/bin/env python3
"""Render the four benchmark figures from the trajectory CSVs.

Reads the per-method files written by `nhoc paper` (schema
step,t,x,y,theta,z1,z2,px,py,ptheta,p1,p2,H,phi_d,newton_iters) and writes
one PNG per figure:

  fig 3   discrete no-slip value phi_d: explicit RK2/RK4 vs the midpoint
          retraction scheme
  fig 4   phi_d for the two retraction-based (symplectic) schemes only
  fig 5   |H - H0| on a log scale: midpoint retraction vs explicit RK4
  fig 6   |H - H0| on a log scale: Gauss RK4 vs explicit RK4

Usage:
  python plots/render.py --fig {3,4,5,6,all} --in <dir> --out <dir>

Exit codes: 0 on success, 1 on missing or malformed input.
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

EXPECTED_HEADER = ["step", "t", "x", "y", "theta", "z1", "z2", "px", "py",
                   "ptheta", "p1", "p2", "H", "phi_d", "newton_iters"]

METHOD_LABELS = {
    "retraction_d0.5": "midpoint retraction (delta = 1/2)",
    "verlet": "end-point composition (Verlet)",
    "rk2": "explicit RK2",
    "rk4": "explicit RK4",
    "gl4": "Gauss RK4 (symplectic)",
}


@dataclass(frozen=True)
class FigureSpec:
    """Which files feed one figure and how the drift column is scaled."""

    methods: tuple[str, ...]
    column: str          # "phi_d" | "H"
    output: str
    title: str
    log_y: bool


FIGURES = {
    3: FigureSpec(("rk2", "rk4", "retraction_d0.5"), "phi_d",
                  "fig3_constraint_rk_vs_retraction.png",
                  "Discrete no-slip constraint per step", False),
    4: FigureSpec(("retraction_d0.5", "verlet"), "phi_d",
                  "fig4_constraint_symplectic_only.png",
                  "Discrete no-slip constraint, symplectic schemes", False),
    5: FigureSpec(("retraction_d0.5", "rk4"), "H",
                  "fig5_energy_midpoint_vs_rk4.png",
                  "Energy drift |H - H0|, order 2 symplectic vs RK4", True),
    6: FigureSpec(("gl4", "rk4"), "H",
                  "fig6_energy_gauss_vs_rk4.png",
                  "Energy drift |H - H0|, order 4 symplectic vs RK4", True),
}


class InputError(Exception):
    pass


def load_series(path: Path, column: str) -> tuple[list[int], list[float]]:
    """Read (iteration, value) pairs for one drift column of one method."""
    if not path.exists():
        raise InputError(f"missing input file: {path}")
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise InputError(f"empty file: {path}") from None
        if header != EXPECTED_HEADER:
            raise InputError(f"unexpected schema in {path}: {header}")
        idx = header.index(column)
        steps, values = [], []
        for row in reader:
            if row[idx] == "":
                continue
            steps.append(int(row[0]))
            values.append(float(row[idx]))
    if not values:
        raise InputError(f"no data rows in {path}")
    return steps, values


def render(spec: FigureSpec, in_dir: Path, out_dir: Path) -> Path:
    """Write one figure; returns the output path."""
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    for method in spec.methods:
        steps, values = load_series(in_dir / f"{method}.csv", spec.column)
        if spec.column == "H":
            h0 = values[0]
            # skip iteration 0 where the drift is identically zero
            steps = steps[1:]
            values = [max(abs(v - h0), 1e-18) for v in values[1:]]
        ax.plot(steps, values, label=METHOD_LABELS.get(method, method),
                linewidth=1.0)
    if spec.log_y:
        ax.set_yscale("log")
    ax.set_xlabel("iteration")
    ax.set_ylabel("|H - H0|" if spec.column == "H" else "phi_d")
    ax.set_title(spec.title)
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    out_dir.mkdir(parents=True, exist_ok=True)
    out_path = out_dir / spec.output
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        description="Render benchmark figures from nhoc trajectory CSVs.")
    parser.add_argument("--fig", choices=["3", "4", "5", "6", "all"],
                        default="all")
    parser.add_argument("--in", dest="in_dir", required=True,
                        help="directory holding the per-method CSVs")
    parser.add_argument("--out", dest="out_dir", required=True,
                        help="directory for the PNG output")
    args = parser.parse_args(argv)

    numbers = [3, 4, 5, 6] if args.fig == "all" else [int(args.fig)]
    try:
        for number in numbers:
            path = render(FIGURES[number], Path(args.in_dir), Path(args.out_dir))
            print(f"wrote {path}")
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
