"""Scenario execution: build the mesh, pin the boundary rows, march the tool,
step the dynamics, and track energy. Fully deterministic: two runs of the same
scenario produce identical outputs bit for bit.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .constraints import ConstraintSet
from .csvio import write_energy_csv
from .dynamics import ParticleSystem, apply_boundary, step
from .energy import EnergyRecord, implicit_euler_energy
from .interaction import ToolState, tool_at
from .meshgen import Mesh, build_constraints, cull_outside, delaunay, load_mesh, load_polygon, sample_points
from .pgm import load_mask_file
from .scenario import MeshSource, Scenario
from .svg import render_svg
from . import meshgen


@dataclass
class Frame:
    """Particle snapshot at the start of a step (step 0 is the rest state)."""

    step: int
    time: float
    positions: np.ndarray
    tool: ToolState | None


@dataclass
class RunOutput:
    energy_series: list[EnergyRecord]
    frames: list[Frame]
    final_state: ParticleSystem
    mesh: Mesh
    constraints: ConstraintSet
    collision_counts: list[int] = field(default_factory=list)


def build_mesh(source: MeshSource) -> Mesh:
    """Materialize a scenario mesh source into a triangle mesh."""
    if source.kind == "mesh_file":
        return load_mesh(source.path)
    if source.kind == "mask":
        mask = load_mask_file(source.path, source.threshold)
        polygon = meshgen.trace_boundary(mask)
    else:
        polygon = load_polygon(source.path)
    points = sample_points(polygon, source.spacing)
    return cull_outside(delaunay(points), polygon)


def run(scenario: Scenario) -> RunOutput:
    """Execute a scenario; energy is recorded every step, frames every
    `frame_stride` steps starting at step 0."""
    params = scenario.params
    mesh = build_mesh(scenario.mesh_source)
    constraints = build_constraints(mesh, params.k_spring, params.k_area)
    n = len(mesh.vertices)
    ps = ParticleSystem(
        positions=mesh.vertices.copy(),
        velocities=np.zeros((n, 2)),
        inverse_masses=np.full(n, 1.0 / params.particle_mass),
    )
    ps = apply_boundary(ps, scenario.boundary)  # pin particles on the lines up front
    masses = params.masses(n)
    trajectory = scenario.resolved_trajectory()

    records: list[EnergyRecord] = []
    frames: list[Frame] = []
    collision_counts: list[int] = []
    for s in range(scenario.total_steps):
        t = s * params.dt
        tool = tool_at(trajectory, t, params.tool_radius)
        if s % scenario.frame_stride == 0:
            frames.append(Frame(step=s, time=t, positions=ps.positions.copy(), tool=tool))
        try:
            ps, report = step(ps, constraints, params, scenario.boundary, tool)
            records.append(
                implicit_euler_energy(
                    report.x_next, report.x_pred, masses, constraints, params.dt, step=s, time=t
                )
            )
        except Exception as e:
            raise RuntimeError(f"step {s}: {e}") from e
        collision_counts.append(len(report.events))
    return RunOutput(
        energy_series=records,
        frames=frames,
        final_state=ps,
        mesh=mesh,
        constraints=constraints,
        collision_counts=collision_counts,
    )


def write_outputs(output: RunOutput, scenario: Scenario, out_dir) -> Path:
    """Persist a run: energy.csv, frames/*.svg, final_state.json."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_energy_csv(output.energy_series, out / "energy.csv")
    frame_dir = out / "frames"
    frame_dir.mkdir(exist_ok=True)
    goal = scenario.resolved_trajectory().goal
    for frame in output.frames:
        render_svg(
            frame.positions,
            output.mesh.edges,
            frame_dir / f"frame_{frame.step:05d}.svg",
            tool=frame.tool,
            goal=goal,
        )
    state = {
        "positions": [[float(x), float(y)] for x, y in output.final_state.positions],
        "velocities": [[float(x), float(y)] for x, y in output.final_state.velocities],
        "inverse_masses": [float(w) for w in output.final_state.inverse_masses],
    }
    with open(out / "final_state.json", "w", encoding="utf-8") as fh:
        json.dump(state, fh)
        fh.write("\n")
    return out
