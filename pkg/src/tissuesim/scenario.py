"""Scenario documents: JSON parsing, strict validation, defaulting.

A scenario bundles everything one simulation run needs: the mesh source, the
simulation parameters (missing entries fall back to the reference defaults),
the boundary lines, the tool trajectory (explicit start/goal or an insertion
angle), the step count, and output settings. Unknown keys are rejected at
every level so typos fail loudly, with path-qualified messages.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from pathlib import Path

from .dynamics import BoundaryConditions, SimParams
from .interaction import Trajectory


class ScenarioError(ValueError):
    """Invalid scenario document; the message names the offending key path."""


@dataclass(frozen=True)
class MeshSource:
    """Where the mesh comes from: a thresholded mask image, a polygon file to
    sample and triangulate, or a prebuilt mesh document."""

    kind: str  # "mask" | "polygon" | "mesh_file"
    path: Path
    threshold: int | None = None
    spacing: float | None = None


@dataclass(frozen=True)
class InsertionSpec:
    """Trajectory given as an insertion: angle from the upward vertical
    (clockwise toward +x), aimed at a goal from a given distance."""

    angle_deg: float
    goal: tuple[float, float]
    approach_distance: float
    speed: float

    def __post_init__(self):
        if not self.approach_distance > 0.0:
            raise ScenarioError(
                f"trajectory.approach_distance must be positive, got {self.approach_distance}"
            )
        if not self.speed > 0.0:
            raise ScenarioError(f"trajectory.speed must be positive, got {self.speed}")


def insertion_to_trajectory(
    angle_deg: float, goal: tuple[float, float], approach_distance: float, speed: float
) -> Trajectory:
    """Start point at `approach_distance` from the goal along the insertion
    direction; angle 0 descends straight down onto the goal."""
    if not approach_distance > 0.0:
        raise ValueError(f"approach_distance must be positive, got {approach_distance}")
    theta = math.radians(angle_deg)
    start = (
        goal[0] + approach_distance * math.sin(theta),
        goal[1] + approach_distance * math.cos(theta),
    )
    return Trajectory(start=start, goal=tuple(goal), speed=speed)


@dataclass(frozen=True)
class Scenario:
    mesh_source: MeshSource
    params: SimParams
    boundary: BoundaryConditions
    trajectory: Trajectory | InsertionSpec
    total_steps: int
    output_dir: Path | None = None
    frame_stride: int = 50

    def resolved_trajectory(self) -> Trajectory:
        if isinstance(self.trajectory, Trajectory):
            return self.trajectory
        t = self.trajectory
        return insertion_to_trajectory(t.angle_deg, t.goal, t.approach_distance, t.speed)

    def with_angle(self, angle_deg: float) -> "Scenario":
        """Same scenario with a different insertion angle."""
        if not isinstance(self.trajectory, InsertionSpec):
            raise ScenarioError(
                "trajectory: setting an insertion angle requires an angle-style trajectory "
                "(angle/goal/approach_distance/speed)"
            )
        return replace(self, trajectory=replace(self.trajectory, angle_deg=angle_deg))


def _require_keys(section: dict, allowed: set[str], required: set[str], where: str):
    if not isinstance(section, dict):
        raise ScenarioError(f"{where}: expected an object")
    unknown = sorted(set(section) - allowed)
    if unknown:
        raise ScenarioError(f"{where}: unknown key(s): {', '.join(unknown)}")
    missing = sorted(required - set(section))
    if missing:
        raise ScenarioError(f"{where}: missing key(s): {', '.join(missing)}")


def _number(section: dict, key: str, where: str, kind=float):
    v = section[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ScenarioError(f"{where}.{key}: expected a number, got {v!r}")
    if kind is int and int(v) != v:
        raise ScenarioError(f"{where}.{key}: expected an integer, got {v!r}")
    return kind(v)


def _point(section: dict, key: str, where: str) -> tuple[float, float]:
    v = section[key]
    if not (isinstance(v, list) and len(v) == 2 and all(isinstance(c, (int, float)) for c in v)):
        raise ScenarioError(f"{where}.{key}: expected [x, y], got {v!r}")
    return float(v[0]), float(v[1])


def _parse_mesh(section: dict, base: Path) -> MeshSource:
    _require_keys(section, {"mask", "threshold", "spacing", "polygon", "mesh_file"}, set(), "mesh")
    sources = [k for k in ("mask", "polygon", "mesh_file") if k in section]
    if len(sources) != 1:
        raise ScenarioError("mesh: exactly one of mask, polygon, or mesh_file is required")
    kind = sources[0]
    path = base / str(section[kind])
    if not path.is_file():
        raise ScenarioError(f"mesh.{kind}: file not found: {path}")
    if kind == "mesh_file":
        if "threshold" in section or "spacing" in section:
            raise ScenarioError("mesh: threshold/spacing do not apply to a prebuilt mesh_file")
        return MeshSource(kind=kind, path=path)
    if "spacing" not in section:
        raise ScenarioError(f"mesh.spacing: required with mesh.{kind}")
    spacing = _number(section, "spacing", "mesh")
    if not spacing > 0.0:
        raise ScenarioError(f"mesh.spacing: must be positive, got {spacing}")
    threshold = None
    if kind == "mask":
        if "threshold" not in section:
            raise ScenarioError("mesh.threshold: required with mesh.mask")
        threshold = _number(section, "threshold", "mesh", int)
        if not 0 <= threshold <= 255:
            raise ScenarioError(f"mesh.threshold: must lie in [0, 255], got {threshold}")
    elif "threshold" in section:
        raise ScenarioError("mesh.threshold: only applies to mesh.mask")
    return MeshSource(kind=kind, path=path, threshold=threshold, spacing=spacing)


_PARAM_KEYS = {
    "dt",
    "solver_iterations",
    "gravity",
    "k_spring",
    "k_area",
    "tool_radius",
    "collision_threshold",
    "particle_mass",
}


def _parse_params(section: dict) -> SimParams:
    _require_keys(section, _PARAM_KEYS, set(), "params")
    kwargs = {}
    for key in _PARAM_KEYS & set(section):
        if key == "gravity":
            kwargs[key] = _point(section, key, "params")
        elif key == "solver_iterations":
            kwargs[key] = _number(section, key, "params", int)
        else:
            kwargs[key] = _number(section, key, "params")
    try:
        return SimParams(**kwargs)
    except ValueError as e:
        raise ScenarioError(f"params: {e}") from e


def _parse_trajectory(section: dict) -> Trajectory | InsertionSpec:
    if "start" in section:
        _require_keys(section, {"start", "goal", "speed"}, {"start", "goal", "speed"}, "trajectory")
        try:
            return Trajectory(
                start=_point(section, "start", "trajectory"),
                goal=_point(section, "goal", "trajectory"),
                speed=_number(section, "speed", "trajectory"),
            )
        except ValueError as e:
            raise ScenarioError(f"trajectory: {e}") from e
    _require_keys(
        section,
        {"angle", "goal", "approach_distance", "speed"},
        {"angle", "goal", "approach_distance", "speed"},
        "trajectory",
    )
    return InsertionSpec(
        angle_deg=_number(section, "angle", "trajectory"),
        goal=_point(section, "goal", "trajectory"),
        approach_distance=_number(section, "approach_distance", "trajectory"),
        speed=_number(section, "speed", "trajectory"),
    )


def parse_scenario(text: str, base_dir=".") -> Scenario:
    """Parse and validate a scenario JSON document. Relative file references
    resolve against base_dir (the scenario file's directory)."""
    base = Path(base_dir)
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ScenarioError(f"invalid JSON: {e}") from e
    _require_keys(
        doc,
        {"mesh", "params", "boundary", "trajectory", "total_steps", "output"},
        {"mesh", "boundary", "trajectory", "total_steps"},
        "scenario",
    )
    mesh_source = _parse_mesh(doc["mesh"], base)
    params = _parse_params(doc.get("params", {}))
    _require_keys(doc["boundary"], {"y_top", "y_bottom"}, {"y_top", "y_bottom"}, "boundary")
    try:
        boundary = BoundaryConditions(
            y_top=_number(doc["boundary"], "y_top", "boundary"),
            y_bottom=_number(doc["boundary"], "y_bottom", "boundary"),
        )
    except ValueError as e:
        raise ScenarioError(f"boundary: {e}") from e
    trajectory = _parse_trajectory(doc["trajectory"])
    total_steps = _number(doc, "total_steps", "scenario", int)
    if total_steps < 1:
        raise ScenarioError(f"total_steps: must be >= 1, got {total_steps}")

    output_dir = None
    frame_stride = 50
    if "output" in doc:
        _require_keys(doc["output"], {"directory", "frame_stride"}, set(), "output")
        if "directory" in doc["output"]:
            output_dir = base / str(doc["output"]["directory"])
        if "frame_stride" in doc["output"]:
            frame_stride = _number(doc["output"], "frame_stride", "output", int)
            if frame_stride < 1:
                raise ScenarioError(f"output.frame_stride: must be >= 1, got {frame_stride}")

    # anti-tunneling: the tool must not move further than the activation band per step
    if params.dt * trajectory.speed >= params.collision_threshold:
        raise ScenarioError(
            f"params.dt * trajectory.speed = {params.dt * trajectory.speed:g} must stay below "
            f"params.collision_threshold = {params.collision_threshold:g} (tool would tunnel)"
        )
    return Scenario(
        mesh_source=mesh_source,
        params=params,
        boundary=boundary,
        trajectory=trajectory,
        total_steps=total_steps,
        output_dir=output_dir,
        frame_stride=frame_stride,
    )


def load_scenario(path) -> Scenario:
    path = Path(path)
    if not path.is_file():
        raise ScenarioError(f"scenario file not found: {path}")
    return parse_scenario(path.read_text(encoding="utf-8"), base_dir=path.parent)
