"""Position-based dynamics timestep: predict, Gauss-Seidel solve, integrate, pin.

One step runs
    x* = x + dt*v + dt^2 * a_ext            (pinned particles keep x)
    x* += scripted tool displacement        (interaction module, optional)
    x  = solve(x*)                          (Gauss-Seidel constraint sweeps)
    v  = (x - x_old) / dt, positions updated
    particles crossing the horizontal boundary lines are pinned for good

The Gauss-Seidel sweeps are sequential by construction; the inner loop is
JIT-compiled (numba) over the packed constraint arrays, with arithmetic
matching the reference projections in `constraints`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numba
import numpy as np

from .constraints import ConstraintSet
from .interaction import CollisionEvent, ToolState, apply_tool, detect_collisions


@dataclass
class ParticleSystem:
    """Positions (N,2), velocities (N,2) and inverse masses (N,) of the mesh
    particles. An inverse mass of zero encodes a pinned particle."""

    positions: np.ndarray
    velocities: np.ndarray
    inverse_masses: np.ndarray

    def __post_init__(self):
        self.positions = np.ascontiguousarray(self.positions, dtype=np.float64)
        self.velocities = np.ascontiguousarray(self.velocities, dtype=np.float64)
        self.inverse_masses = np.ascontiguousarray(self.inverse_masses, dtype=np.float64)
        n = self.positions.shape[0]
        if n < 1 or self.positions.shape != (n, 2):
            raise ValueError(f"positions must be (N, 2) with N >= 1, got {self.positions.shape}")
        if self.velocities.shape != (n, 2):
            raise ValueError("velocities shape does not match positions")
        if self.inverse_masses.shape != (n,):
            raise ValueError("inverse_masses shape does not match positions")
        if np.any(self.inverse_masses < 0.0):
            raise ValueError("inverse masses must be non-negative")
        if not (np.all(np.isfinite(self.positions)) and np.all(np.isfinite(self.velocities))):
            raise ValueError("particle state contains non-finite values")

    @property
    def n(self) -> int:
        return self.positions.shape[0]

    def copy(self) -> "ParticleSystem":
        return ParticleSystem(self.positions.copy(), self.velocities.copy(), self.inverse_masses.copy())


@dataclass(frozen=True)
class SimParams:
    """Simulation parameters; defaults are the reference parameter set."""

    dt: float = 0.01
    solver_iterations: int = 30
    gravity: tuple[float, float] = (0.0, -9.8)
    k_spring: float = 0.15
    k_area: float = 1.0
    tool_radius: float = 0.25
    collision_threshold: float = 0.025
    particle_mass: float = 0.0001

    def __post_init__(self):
        if not self.dt > 0.0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.solver_iterations < 1:
            raise ValueError(f"solver_iterations must be >= 1, got {self.solver_iterations}")
        if not 0.0 <= self.k_spring <= 1.0:
            raise ValueError(f"k_spring must lie in [0, 1], got {self.k_spring}")
        if not 0.0 <= self.k_area <= 1.0:
            raise ValueError(f"k_area must lie in [0, 1], got {self.k_area}")
        if not self.tool_radius > 0.0:
            raise ValueError(f"tool_radius must be positive, got {self.tool_radius}")
        if not self.collision_threshold > 0.0:
            raise ValueError(f"collision_threshold must be positive, got {self.collision_threshold}")
        if not self.particle_mass > 0.0:
            raise ValueError(f"particle_mass must be positive, got {self.particle_mass}")

    def masses(self, n: int) -> np.ndarray:
        return np.full(n, self.particle_mass)


@dataclass(frozen=True)
class BoundaryConditions:
    """Two horizontal lines; particles reaching them are pinned permanently."""

    y_top: float
    y_bottom: float

    def __post_init__(self):
        if not self.y_top > self.y_bottom:
            raise ValueError(f"y_top ({self.y_top}) must exceed y_bottom ({self.y_bottom})")


@dataclass
class StepReport:
    """Per-step byproducts consumed by the energy module: the predicted
    positions (after any tool displacement), the solved positions, and the
    collision events of the step."""

    x_pred: np.ndarray
    x_next: np.ndarray
    events: list[CollisionEvent] = field(default_factory=list)


def predict(ps: ParticleSystem, params: SimParams, external_accel) -> np.ndarray:
    """Prediction step: x* = x + dt*v + dt^2*a for movable particles; pinned
    particles keep their position."""
    a = np.asarray(external_accel, dtype=np.float64)
    dt = params.dt
    x_star = ps.positions + dt * ps.velocities + (dt * dt) * a
    pinned = ps.inverse_masses == 0.0
    x_star[pinned] = ps.positions[pinned]
    if not np.all(np.isfinite(x_star)):
        bad = int(np.argwhere(~np.isfinite(x_star))[0][0])
        raise ValueError(f"non-finite predicted position for particle {bad}")
    return x_star


@numba.njit(cache=True)
def _solve_kernel(x, w, d_ij, d_rest, d_stiff, t_ijk, t_rest, t_stiff, iterations):  # pragma: no cover
    for _ in range(iterations):
        for m in range(d_ij.shape[0]):
            i = d_ij[m, 0]
            j = d_ij[m, 1]
            dx = x[i, 0] - x[j, 0]
            dy = x[i, 1] - x[j, 1]
            dist = math.sqrt(dx * dx + dy * dy)
            if dist < 1e-12:
                return m
            wsum = w[i] + w[j]
            if wsum == 0.0:
                continue
            cval = dist - d_rest[m]
            nx = dx / dist
            ny = dy / dist
            k = d_stiff[m]
            x[i, 0] += -k * (w[i] / wsum) * cval * nx
            x[i, 1] += -k * (w[i] / wsum) * cval * ny
            x[j, 0] += k * (w[j] / wsum) * cval * nx
            x[j, 1] += k * (w[j] / wsum) * cval * ny
        for m in range(t_ijk.shape[0]):
            i = t_ijk[m, 0]
            j = t_ijk[m, 1]
            kk = t_ijk[m, 2]
            ax = x[i, 0]
            ay = x[i, 1]
            bx = x[j, 0]
            by = x[j, 1]
            cx = x[kk, 0]
            cy = x[kk, 1]
            cross = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
            sign = 1.0 if cross > 0.0 else (-1.0 if cross < 0.0 else 0.0)
            gax = 0.5 * sign * (by - cy)
            gay = 0.5 * sign * (cx - bx)
            gbx = 0.5 * sign * (cy - ay)
            gby = 0.5 * sign * (ax - cx)
            gcx = 0.5 * sign * (ay - by)
            gcy = 0.5 * sign * (bx - ax)
            denom = (
                w[i] * (gax * gax + gay * gay)
                + w[j] * (gbx * gbx + gby * gby)
                + w[kk] * (gcx * gcx + gcy * gcy)
            )
            if denom < 1e-12:
                continue
            cval = 0.5 * abs(cross) - t_rest[m]
            s = cval / denom
            k = t_stiff[m]
            x[i, 0] += -k * s * w[i] * gax
            x[i, 1] += -k * s * w[i] * gay
            x[j, 0] += -k * s * w[j] * gbx
            x[j, 1] += -k * s * w[j] * gby
            x[kk, 0] += -k * s * w[kk] * gcx
            x[kk, 1] += -k * s * w[kk] * gcy
    return -1


def solve(x_star: np.ndarray, inverse_masses: np.ndarray, constraints: ConstraintSet, iterations: int) -> np.ndarray:
    """Run `iterations` Gauss-Seidel sweeps over the constraints (distances in
    build order, then areas), applying each correction immediately. Returns
    the corrected positions; the input array is left untouched."""
    if iterations < 1:
        raise ValueError(f"iterations must be >= 1, got {iterations}")
    x = np.ascontiguousarray(x_star, dtype=np.float64).copy()
    w = np.ascontiguousarray(inverse_masses, dtype=np.float64)
    d_ij, d_rest, d_stiff, t_ijk, t_rest, t_stiff = constraints.packed()
    status = _solve_kernel(x, w, d_ij, d_rest, d_stiff, t_ijk, t_rest, t_stiff, iterations)
    if status >= 0:
        c = constraints.distance[status]
        raise ValueError(
            f"degenerate configuration while solving: particles {c.i} and {c.j} coincide"
        )
    return x


def integrate(ps: ParticleSystem, x_new: np.ndarray, dt: float) -> ParticleSystem:
    """Velocity update v = (x_new - x)/dt and position commit; pinned particles
    keep zero velocity."""
    x_new = np.asarray(x_new, dtype=np.float64)
    if x_new.shape != ps.positions.shape:
        raise ValueError("position array length mismatch")
    v = (x_new - ps.positions) / dt
    pinned = ps.inverse_masses == 0.0
    v[pinned] = 0.0
    return ParticleSystem(x_new.copy(), v, ps.inverse_masses.copy())


def apply_boundary(ps: ParticleSystem, bc: BoundaryConditions) -> ParticleSystem:
    """Pin (v = 0, w = 0) every particle at or beyond either horizontal line.

    Pinning is permanent: once w hits zero nothing restores it."""
    y = ps.positions[:, 1]
    crossed = (y >= bc.y_top) | (y <= bc.y_bottom)
    if not np.any(crossed):
        return ps
    out = ps.copy()
    out.velocities[crossed] = 0.0
    out.inverse_masses[crossed] = 0.0
    return out


def step(
    ps: ParticleSystem,
    constraints: ConstraintSet,
    params: SimParams,
    bc: BoundaryConditions,
    tool: ToolState | None = None,
) -> tuple[ParticleSystem, StepReport]:
    """Advance one timestep; returns the new state and a StepReport.

    The scripted tool displacement is folded into the prediction (it stands in
    for the unknown driving force), so the report's x_pred already includes it
    and the energy module sees only the solver's correction as inertial work.
    """
    x_star = predict(ps, params, params.gravity)
    events: list[CollisionEvent] = []
    if tool is not None:
        events = detect_collisions(x_star, tool, params.collision_threshold)
        if events:
            x_star = apply_tool(x_star, events, params.tool_radius, ps.inverse_masses)
    x_next = solve(x_star, ps.inverse_masses, constraints, params.solver_iterations)
    out = integrate(ps, x_next, params.dt)
    out = apply_boundary(out, bc)
    return out, StepReport(x_pred=x_star, x_next=x_next, events=events)
