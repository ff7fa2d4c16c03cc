"""Distance and area constraints: types, evaluation, and Gauss-Seidel projection.

The two constraint families are
    C_spring(x_i, x_j)      = |x_i - x_j| - d0
    C_area(x_i, x_j, x_k)   = 0.5 * |cross(x_j - x_i, x_k - x_i)| - A0
and projections are the standard mass-weighted gradient corrections, each
scaled linearly by the constraint stiffness k (applied once per solver
iteration).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

DEGENERACY_EPS = 1e-12


@dataclass(frozen=True)
class DistanceConstraint:
    i: int
    j: int
    d0: float
    k: float

    def __post_init__(self):
        if self.i == self.j:
            raise ValueError(f"distance constraint endpoints coincide (index {self.i})")
        if not self.d0 > 0.0:
            raise ValueError(f"rest length must be positive, got {self.d0}")
        if not 0.0 <= self.k <= 1.0:
            raise ValueError(f"stiffness must lie in [0, 1], got {self.k}")


@dataclass(frozen=True)
class AreaConstraint:
    i: int
    j: int
    k_idx: int
    A0: float
    k: float

    def __post_init__(self):
        if len({self.i, self.j, self.k_idx}) != 3:
            raise ValueError(f"area constraint indices must be distinct: {self.i}, {self.j}, {self.k_idx}")
        if not self.A0 > 0.0:
            raise ValueError(f"rest area must be positive, got {self.A0}")
        if not 0.0 <= self.k <= 1.0:
            raise ValueError(f"stiffness must lie in [0, 1], got {self.k}")


@dataclass
class ConstraintSet:
    """All constraints of a mesh, in solve order: distances first, then areas."""

    distance: list[DistanceConstraint] = field(default_factory=list)
    area: list[AreaConstraint] = field(default_factory=list)
    _packed: tuple | None = field(default=None, repr=False, compare=False)

    def __len__(self):
        return len(self.distance) + len(self.area)

    def packed(self):
        """Flat-array view (cached) consumed by the jitted solver kernel."""
        if self._packed is None:
            d_ij = np.array([[c.i, c.j] for c in self.distance], dtype=np.int64).reshape(-1, 2)
            d_rest = np.array([c.d0 for c in self.distance], dtype=np.float64)
            d_stiff = np.array([c.k for c in self.distance], dtype=np.float64)
            t_ijk = np.array([[c.i, c.j, c.k_idx] for c in self.area], dtype=np.int64).reshape(-1, 3)
            t_rest = np.array([c.A0 for c in self.area], dtype=np.float64)
            t_stiff = np.array([c.k for c in self.area], dtype=np.float64)
            self._packed = (d_ij, d_rest, d_stiff, t_ijk, t_rest, t_stiff)
        return self._packed


def eval_distance(c: DistanceConstraint, x: np.ndarray) -> float:
    """C = |x_i - x_j| - d0; raises if the pair has (near-)zero separation."""
    dx = x[c.i, 0] - x[c.j, 0]
    dy = x[c.i, 1] - x[c.j, 1]
    dist = math.sqrt(dx * dx + dy * dy)
    if dist < DEGENERACY_EPS:
        raise ValueError(f"degenerate configuration: particles {c.i} and {c.j} coincide")
    return dist - c.d0


def eval_area(c: AreaConstraint, x: np.ndarray) -> float:
    """C = 0.5 * |cross(x_j - x_i, x_k - x_i)| - A0 (collinear triangles give -A0)."""
    ax, ay = x[c.i, 0], x[c.i, 1]
    bx, by = x[c.j, 0], x[c.j, 1]
    cx, cy = x[c.k_idx, 0], x[c.k_idx, 1]
    cross = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
    return 0.5 * abs(cross) - c.A0


def project_distance(c: DistanceConstraint, x: np.ndarray, w: np.ndarray):
    """Mass-weighted correction pair (dx_i, dx_j) scaled by k.

    dx_i = -k * (w_i / (w_i + w_j)) * C * n   with n = (x_i - x_j)/|x_i - x_j|,
    dx_j the opposite share. Both zero when both endpoints are pinned.
    """
    dx = x[c.i, 0] - x[c.j, 0]
    dy = x[c.i, 1] - x[c.j, 1]
    dist = math.sqrt(dx * dx + dy * dy)
    if dist < DEGENERACY_EPS:
        raise ValueError(f"degenerate configuration: particles {c.i} and {c.j} coincide")
    wi, wj = w[c.i], w[c.j]
    wsum = wi + wj
    if wsum == 0.0:
        return np.zeros(2), np.zeros(2)
    cval = dist - c.d0
    nx, ny = dx / dist, dy / dist
    di = np.array([-c.k * (wi / wsum) * cval * nx, -c.k * (wi / wsum) * cval * ny])
    dj = np.array([c.k * (wj / wsum) * cval * nx, c.k * (wj / wsum) * cval * ny])
    return di, dj


def _area_gradients(x: np.ndarray, i: int, j: int, k_idx: int):
    """Gradients of 0.5*|cross| wrt the three vertices: half-perpendicular of the
    opposite edge times sign of the signed area (zero when exactly collinear)."""
    ax, ay = x[i, 0], x[i, 1]
    bx, by = x[j, 0], x[j, 1]
    cx, cy = x[k_idx, 0], x[k_idx, 1]
    cross = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
    sign = 1.0 if cross > 0.0 else (-1.0 if cross < 0.0 else 0.0)
    ga = np.array([0.5 * sign * (by - cy), 0.5 * sign * (cx - bx)])
    gb = np.array([0.5 * sign * (cy - ay), 0.5 * sign * (ax - cx)])
    gc = np.array([0.5 * sign * (ay - by), 0.5 * sign * (bx - ax)])
    return cross, ga, gb, gc


def project_area(c: AreaConstraint, x: np.ndarray, w: np.ndarray):
    """Mass-weighted corrections (dx_i, dx_j, dx_k) scaled by k.

    dx_p = -k * s * w_p * grad_p C with s = C / sum_p w_p |grad_p C|^2.
    All zero when the gradient-norm sum falls below 1e-12 (degenerate or
    fully pinned triangle).
    """
    cross, ga, gb, gc = _area_gradients(x, c.i, c.j, c.k_idx)
    cval = 0.5 * abs(cross) - c.A0
    wi, wj, wk = w[c.i], w[c.j], w[c.k_idx]
    denom = wi * (ga @ ga) + wj * (gb @ gb) + wk * (gc @ gc)
    if denom < DEGENERACY_EPS:
        z = np.zeros(2)
        return z, z.copy(), z.copy()
    s = cval / denom
    return -c.k * s * wi * ga, -c.k * s * wj * gb, -c.k * s * wk * gc
