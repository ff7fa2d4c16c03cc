"""Circular manipulator: scripted straight-line motion, proximity detection,
and the scripted position-update field applied to nearby particles.

A particle q collides when its distance d to the circle boundary (zero inside
the circle) drops below the threshold alpha while the tool is moving. Its
penetration depth is d_* = alpha - d, and every particle i within one radius
of q is displaced along the tool velocity direction by

    ((r - |x_q - x_i|) / r) * d_*

i.e. a linear falloff from d_* at q itself to zero at distance r.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ToolState:
    """Circular manipulator: center, radius, and current velocity."""

    center: tuple[float, float]
    radius: float
    v_mani: tuple[float, float]

    def __post_init__(self):
        if not self.radius > 0.0:
            raise ValueError(f"tool radius must be positive, got {self.radius}")
        if not all(math.isfinite(c) for c in (*self.center, *self.v_mani)):
            raise ValueError("tool state contains non-finite values")

    @property
    def speed(self) -> float:
        return math.hypot(self.v_mani[0], self.v_mani[1])


@dataclass(frozen=True)
class Trajectory:
    """Straight-line path from start to goal at constant speed, then rest."""

    start: tuple[float, float]
    goal: tuple[float, float]
    speed: float

    def __post_init__(self):
        if not self.speed > 0.0:
            raise ValueError(f"trajectory speed must be positive, got {self.speed}")
        if self.start == self.goal:
            raise ValueError("trajectory start and goal coincide")

    @property
    def length(self) -> float:
        return math.hypot(self.goal[0] - self.start[0], self.goal[1] - self.start[1])


@dataclass(frozen=True)
class CollisionEvent:
    """A particle within the activation band of the moving tool."""

    q: int
    d_star: float
    direction: tuple[float, float]


def tool_at(traj: Trajectory, t: float, radius: float) -> ToolState:
    """Tool state at time t: advances along the path, parks at the goal."""
    if t < 0.0:
        raise ValueError(f"time must be non-negative, got {t}")
    ux = traj.goal[0] - traj.start[0]
    uy = traj.goal[1] - traj.start[1]
    length = math.hypot(ux, uy)
    ux /= length
    uy /= length
    travelled = t * traj.speed
    if travelled >= length:
        return ToolState(center=traj.goal, radius=radius, v_mani=(0.0, 0.0))
    return ToolState(
        center=(traj.start[0] + travelled * ux, traj.start[1] + travelled * uy),
        radius=radius,
        v_mani=(traj.speed * ux, traj.speed * uy),
    )


def detect_collisions(x: np.ndarray, tool: ToolState, alpha: float) -> list[CollisionEvent]:
    """Events for all particles closer than alpha to the circle boundary
    (distance clamps to zero inside), ordered by particle index. A stationary
    tool produces none: the update direction v/|v| would be undefined."""
    if not alpha > 0.0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    speed = tool.speed
    if speed == 0.0:
        return []
    direction = (tool.v_mani[0] / speed, tool.v_mani[1] / speed)
    d = np.hypot(x[:, 0] - tool.center[0], x[:, 1] - tool.center[1]) - tool.radius
    np.maximum(d, 0.0, out=d)
    hits = np.nonzero(d < alpha)[0]
    return [
        CollisionEvent(q=int(p), d_star=min(max(alpha - d[p], 0.0), alpha), direction=direction)
        for p in hits
    ]


def displacement_field(
    event: CollisionEvent,
    x: np.ndarray,
    r: float,
    inverse_masses: np.ndarray | None = None,
) -> np.ndarray:
    """Per-particle (N,2) displacement of one event: linear falloff from the
    collision point, along the tool direction. Pinned particles get zero."""
    if not r > 0.0:
        raise ValueError(f"r must be positive, got {r}")
    dist = np.hypot(x[:, 0] - x[event.q, 0], x[:, 1] - x[event.q, 1])
    scale = np.where(dist <= r, (r - dist) / r * event.d_star, 0.0)
    if inverse_masses is not None:
        scale = np.where(inverse_masses == 0.0, 0.0, scale)
    out = np.empty_like(x)
    out[:, 0] = scale * event.direction[0]
    out[:, 1] = scale * event.direction[1]
    return out


def apply_tool(
    x_star: np.ndarray,
    events: list[CollisionEvent],
    r: float,
    inverse_masses: np.ndarray,
) -> np.ndarray:
    """Superpose the displacement fields of all events onto x*. Fields are all
    evaluated at the incoming positions, so the sum is order-independent."""
    out = x_star.copy()
    if not events:
        return out
    total = np.zeros_like(x_star)
    for event in events:
        total += displacement_field(event, x_star, r, inverse_masses)
    out += total
    return out
