"""Tissue shape to triangle mesh: contour tracing, point sampling, Delaunay
triangulation (Bowyer-Watson), culling to the shape, and constraint building.

The pipeline is deterministic end to end: fixed scan and insertion orders,
fixed cocircularity tie-break (a point exactly on a circumcircle counts as
inside), so identical inputs produce bit-identical meshes.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .constraints import AreaConstraint, ConstraintSet, DistanceConstraint
from .pgm import BinaryMask

AREA_FLOOR = 1e-12
# a point whose squared circumcircle distance is within this of r^2 counts as inside
COCIRCULAR_EPS = 1e-12


@dataclass
class Polygon:
    """Simple counterclockwise polygon in world units.

    Duplicate vertices and non-positive signed area are rejected; full
    self-intersection checking is not performed.
    """

    vertices: np.ndarray

    def __post_init__(self):
        self.vertices = np.asarray(self.vertices, dtype=np.float64)
        if self.vertices.ndim != 2 or self.vertices.shape[1] != 2 or len(self.vertices) < 3:
            raise ValueError("polygon needs at least 3 [x, y] vertices")
        seen = set()
        for x, y in self.vertices:
            if (x, y) in seen:
                raise ValueError(f"polygon has a repeated vertex ({x}, {y})")
            seen.add((x, y))
        if self.signed_area() <= 0.0:
            raise ValueError("polygon must be counterclockwise (signed area > 0)")

    def signed_area(self) -> float:
        v = self.vertices
        x, y = v[:, 0], v[:, 1]
        return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


@dataclass
class Mesh:
    """Triangle mesh: vertices (V,2), counterclockwise triangles (T,3), and the
    deduplicated edge list (E,2) with each pair stored lower index first."""

    vertices: np.ndarray
    triangles: np.ndarray
    edges: np.ndarray

    def __post_init__(self):
        self.vertices = np.asarray(self.vertices, dtype=np.float64).reshape(-1, 2)
        self.triangles = np.asarray(self.triangles, dtype=np.int64).reshape(-1, 3)
        self.edges = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        n = len(self.vertices)
        if n < 3 or len(self.triangles) < 1:
            raise ValueError("mesh needs at least 3 vertices and 1 triangle")
        if self.triangles.min() < 0 or self.triangles.max() >= n:
            raise ValueError("triangle vertex index out of range")
        if len(self.edges) and (self.edges.min() < 0 or self.edges.max() >= n):
            raise ValueError("edge vertex index out of range")
        for t, (i, j, k) in enumerate(self.triangles):
            a, b, c = self.vertices[i], self.vertices[j], self.vertices[k]
            area2 = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
            if 0.5 * area2 < AREA_FLOOR:
                raise ValueError(
                    f"triangle {t} is degenerate or clockwise (signed area {0.5 * area2:g})"
                )
        expected = _edges_of(self.triangles)
        got = [tuple(e) for e in self.edges]
        if any(e[0] >= e[1] for e in got):
            raise ValueError("edges must be stored lower index first")
        if len(set(got)) != len(got) or set(got) != set(expected):
            raise ValueError("edge list does not match the union of triangle edges")


def _edges_of(triangles) -> list[tuple[int, int]]:
    """Unique triangle edges (lower index first) in first-seen traversal order."""
    seen: dict[tuple[int, int], None] = {}
    for i, j, k in triangles:
        for a, b in ((i, j), (j, k), (k, i)):
            key = (int(a), int(b)) if a < b else (int(b), int(a))
            if key not in seen:
                seen[key] = None
    return list(seen)


# ---------------------------------------------------------------------------
# boundary tracing

# image-coordinate (row, col) Moore neighborhood, clockwise from north
_MOORE = ((-1, 0), (-1, 1), (0, 1), (1, 1), (1, 0), (1, -1), (0, -1), (-1, -1))
_MOORE_INDEX = {d: n for n, d in enumerate(_MOORE)}


def trace_boundary(mask: BinaryMask) -> Polygon:
    """Outer contour of the mask's single tissue component, counterclockwise.

    Moore-neighbor tracing over pixel centers, mapped to world units with
    x = column and y = height-1-row (so world y points up); collinear runs
    along the contour are merged. Requires exactly one 4-connected component
    that stays clear of the image border.
    """
    bits = mask.bits
    h, w = mask.height, mask.width
    filled = np.argwhere(bits)
    if len(filled) == 0:
        raise ValueError("empty mask: no tissue pixels")
    # single 4-connected component check (BFS from the first pixel in scan order)
    start = (int(filled[0][0]), int(filled[0][1]))
    visited = np.zeros_like(bits)
    queue = [start]
    visited[start] = True
    while queue:
        r, c = queue.pop()
        for dr, dc in ((-1, 0), (1, 0), (0, -1), (0, 1)):
            rr, cc = r + dr, c + dc
            if 0 <= rr < h and 0 <= cc < w and bits[rr, cc] and not visited[rr, cc]:
                visited[rr, cc] = True
                queue.append((rr, cc))
    if visited.sum() != len(filled):
        raise ValueError("multiple components: mask must contain exactly one tissue region")
    if bits[0, :].any() or bits[-1, :].any() or bits[:, 0].any() or bits[:, -1].any():
        raise ValueError("component touches the image border")

    def alive(r, c):
        return 0 <= r < h and 0 <= c < w and bits[r, c]

    contour = [start]
    backtrack = (start[0], start[1] - 1)
    cur = start
    first_state = None
    for _ in range(8 * w * h):
        d = _MOORE_INDEX[(backtrack[0] - cur[0], backtrack[1] - cur[1])]
        nxt = None
        prev = backtrack
        for turn in range(1, 9):
            dr, dc = _MOORE[(d + turn) % 8]
            cand = (cur[0] + dr, cur[1] + dc)
            if alive(*cand):
                nxt = cand
                break
            prev = cand
        if nxt is None:
            break  # isolated pixel; the degenerate contour fails Polygon validation
        state = (nxt, prev)
        if first_state is None:
            first_state = state
        elif state == first_state:
            break
        cur, backtrack = nxt, prev
        contour.append(cur)
    if len(contour) > 1 and contour[-1] == contour[0]:
        contour.pop()

    world = [(float(c), float(h - 1 - r)) for r, c in contour]
    # counterclockwise in world coordinates
    area2 = sum(
        world[i][0] * world[(i + 1) % len(world)][1] - world[(i + 1) % len(world)][0] * world[i][1]
        for i in range(len(world))
    )
    if area2 < 0.0:
        world.reverse()
    return Polygon(np.array(_merge_collinear(world)))


def _merge_collinear(points):
    """Drop vertices lying exactly on the line through their neighbors."""
    pts = list(points)
    while len(pts) > 3:
        n = len(pts)
        kept = []
        for i in range(n):
            a, b, c = pts[i - 1], pts[i], pts[(i + 1) % n]
            cross = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
            if cross != 0.0:
                kept.append(b)
        if len(kept) == len(pts):
            break
        pts = kept  # fully collinear contours die in Polygon validation
    return pts


# ---------------------------------------------------------------------------
# point sampling

def point_in_polygon(point, polygon: Polygon) -> bool:
    """Even-odd ray test (ray towards +x)."""
    x, y = float(point[0]), float(point[1])
    v = polygon.vertices
    inside = False
    for i in range(len(v)):
        x1, y1 = v[i]
        x2, y2 = v[(i + 1) % len(v)]
        if (y1 > y) != (y2 > y):
            x_int = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
            if x < x_int:
                inside = not inside
    return inside


def distance_to_boundary(point, polygon: Polygon) -> float:
    """Minimum distance from a point to the polygon outline."""
    px, py = float(point[0]), float(point[1])
    v = polygon.vertices
    best = math.inf
    for i in range(len(v)):
        x1, y1 = v[i]
        x2, y2 = v[(i + 1) % len(v)]
        ex, ey = x2 - x1, y2 - y1
        t = ((px - x1) * ex + (py - y1) * ey) / (ex * ex + ey * ey)
        t = min(1.0, max(0.0, t))
        best = min(best, math.hypot(px - (x1 + t * ex), py - (y1 + t * ey)))
    return best


def sample_points(polygon: Polygon, spacing: float) -> np.ndarray:
    """Mesh vertex candidates for a polygon.

    Every polygon edge is subdivided into equal intervals no longer than
    `spacing` (original vertices always kept), followed by interior points on
    the axis-aligned grid of pitch `spacing` anchored at integer multiples of
    the pitch, keeping only grid points strictly inside and more than
    spacing/2 away from the outline. Boundary points come first in contour
    order, then grid points row-major (y ascending, x ascending).
    """
    if not spacing > 0.0:
        raise ValueError(f"spacing must be positive, got {spacing}")
    v = polygon.vertices
    pts: list[tuple[float, float]] = []
    for i in range(len(v)):
        x1, y1 = v[i]
        x2, y2 = v[(i + 1) % len(v)]
        segs = max(1, math.ceil(math.hypot(x2 - x1, y2 - y1) / spacing))
        for s in range(segs):
            t = s / segs
            pts.append((float(x1 + t * (x2 - x1)), float(y1 + t * (y2 - y1))))
    minx, miny = v.min(axis=0)
    maxx, maxy = v.max(axis=0)
    kx0, kx1 = math.ceil(minx / spacing) - 1, math.floor(maxx / spacing) + 1
    ky0, ky1 = math.ceil(miny / spacing) - 1, math.floor(maxy / spacing) + 1
    clearance = spacing / 2.0
    for ky in range(ky0, ky1 + 1):
        y = ky * spacing
        for kx in range(kx0, kx1 + 1):
            x = kx * spacing
            if point_in_polygon((x, y), polygon) and distance_to_boundary((x, y), polygon) > clearance:
                pts.append((x, y))
    return np.array(pts, dtype=np.float64)


# ---------------------------------------------------------------------------
# Delaunay triangulation

def _circumcircle(ax, ay, bx, by, cx, cy):
    """Circumcenter and squared radius; collinear triangles get an infinite
    circle so any later insertion evicts them."""
    d = 2.0 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by))
    if d == 0.0:
        return 0.0, 0.0, math.inf
    a2 = ax * ax + ay * ay
    b2 = bx * bx + by * by
    c2 = cx * cx + cy * cy
    ux = (a2 * (by - cy) + b2 * (cy - ay) + c2 * (ay - by)) / d
    uy = (a2 * (cx - bx) + b2 * (ax - cx) + c2 * (bx - ax)) / d
    r2 = (ax - ux) ** 2 + (ay - uy) ** 2
    return ux, uy, r2


def delaunay(points) -> Mesh:
    """Bowyer-Watson triangulation of distinct, non-collinear points.

    Points are inserted in input order inside a super-triangle whose incircle
    radius is 10x the point cloud's bounding-circle radius; a point lying
    exactly on a circumcircle counts as inside it, which fixes the cocircular
    tie deterministically.
    """
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    n = len(pts)
    if n < 3:
        raise ValueError(f"need at least 3 points, got {n}")
    seen: set[tuple[float, float]] = set()
    for x, y in pts:
        if (x, y) in seen:
            raise ValueError(f"duplicate point ({x}, {y})")
        seen.add((x, y))
    ex, ey = pts[1, 0] - pts[0, 0], pts[1, 1] - pts[0, 1]
    if all(
        abs(ex * (pts[i, 1] - pts[0, 1]) - ey * (pts[i, 0] - pts[0, 0])) < AREA_FLOOR
        for i in range(2, n)
    ):
        raise ValueError("all points are collinear")

    center = (pts.min(axis=0) + pts.max(axis=0)) / 2.0
    radius = float(np.max(np.hypot(pts[:, 0] - center[0], pts[:, 1] - center[1])))
    rc = 2.0 * (10.0 * radius)  # equilateral: circumradius = 2 * inradius
    sup = np.array(
        [
            [center[0] + rc * math.cos(a), center[1] + rc * math.sin(a)]
            for a in (math.pi / 2.0, math.pi * 7.0 / 6.0, math.pi * 11.0 / 6.0)
        ]
    )
    allp = np.vstack([pts, sup])
    tri_v: list[tuple[int, int, int]] = [(n, n + 1, n + 2)]
    tri_cc = [_circumcircle(*allp[n], *allp[n + 1], *allp[n + 2])]

    for p in range(n):
        px, py = pts[p]
        bad = []
        for t, (ux, uy, r2) in enumerate(tri_cc):
            if (px - ux) ** 2 + (py - uy) ** 2 - r2 < COCIRCULAR_EPS:
                bad.append(t)
        counts: dict[tuple[int, int], int] = {}
        for t in bad:
            i, j, k = tri_v[t]
            for a, b in ((i, j), (j, k), (k, i)):
                key = (a, b) if a < b else (b, a)
                counts[key] = counts.get(key, 0) + 1
        boundary = [e for e, cnt in counts.items() if cnt == 1]
        bad_set = set(bad)
        tri_v = [tv for t, tv in enumerate(tri_v) if t not in bad_set]
        tri_cc = [cc for t, cc in enumerate(tri_cc) if t not in bad_set]
        for a, b in boundary:
            tri_v.append((p, a, b))
            tri_cc.append(_circumcircle(px, py, *allp[a], *allp[b]))

    tris = []
    for i, j, k in tri_v:
        if i >= n or j >= n or k >= n:
            continue
        ax, ay = pts[i]
        bx, by = pts[j]
        cx, cy = pts[k]
        if (bx - ax) * (cy - ay) - (by - ay) * (cx - ax) < 0.0:
            j, k = k, j
        # rotate so the smallest index leads, preserving orientation
        if j < i and j <= k:
            i, j, k = j, k, i
        elif k < i and k <= j:
            i, j, k = k, i, j
        tris.append((i, j, k))
    return Mesh(vertices=pts, triangles=np.array(tris), edges=np.array(_edges_of(tris)))


# ---------------------------------------------------------------------------
# culling and constraints

def cull_outside(mesh: Mesh, polygon: Polygon) -> Mesh:
    """Keep triangles whose centroid falls inside the polygon (even-odd test);
    drop now-unreferenced vertices, compacting indices in order."""
    kept = []
    for tri in mesh.triangles:
        cen = mesh.vertices[tri].mean(axis=0)
        if point_in_polygon(cen, polygon):
            kept.append(tri)
    if not kept:
        raise ValueError("shape too thin for spacing: no triangle centroid falls inside")
    used = sorted({int(i) for tri in kept for i in tri})
    remap = {old: new for new, old in enumerate(used)}
    tris = [(remap[int(i)], remap[int(j)], remap[int(k)]) for i, j, k in kept]
    return Mesh(
        vertices=mesh.vertices[used],
        triangles=np.array(tris),
        edges=np.array(_edges_of(tris)),
    )


def build_constraints(mesh: Mesh, k_spring: float, k_area: float) -> ConstraintSet:
    """One distance constraint per edge (rest length = current distance) and one
    area constraint per triangle (rest area = current unsigned area)."""
    distance = []
    for i, j in mesh.edges:
        dx = mesh.vertices[i] - mesh.vertices[j]
        d0 = math.sqrt(dx[0] * dx[0] + dx[1] * dx[1])  # same arithmetic as the solver
        if d0 < AREA_FLOOR:
            raise ValueError(f"degenerate rest state: zero-length edge ({i}, {j})")
        distance.append(DistanceConstraint(i=int(i), j=int(j), d0=d0, k=k_spring))
    area = []
    for i, j, k in mesh.triangles:
        a, b, c = mesh.vertices[i], mesh.vertices[j], mesh.vertices[k]
        a0 = 0.5 * abs((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))
        if a0 < AREA_FLOOR:
            raise ValueError(f"degenerate rest state: zero-area triangle ({i}, {j}, {k})")
        area.append(AreaConstraint(i=int(i), j=int(j), k_idx=int(k), A0=a0, k=k_area))
    return ConstraintSet(distance=distance, area=area)


# ---------------------------------------------------------------------------
# document IO ("vertices"/"triangles"/"edges" is the mesh contract)

def load_polygon(path) -> Polygon:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict) or "vertices" not in doc:
        raise ValueError(f"{path}: polygon document needs a 'vertices' key")
    extra = set(doc) - {"vertices"}
    if extra:
        raise ValueError(f"{path}: unknown keys {sorted(extra)}")
    return Polygon(np.array(doc["vertices"], dtype=np.float64))


def save_mesh(mesh: Mesh, path) -> None:
    doc = {
        "vertices": [[float(x), float(y)] for x, y in mesh.vertices],
        "triangles": [[int(i), int(j), int(k)] for i, j, k in mesh.triangles],
        "edges": [[int(i), int(j)] for i, j in mesh.edges],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh)
        fh.write("\n")


def load_mesh(path) -> Mesh:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    required = {"vertices", "triangles", "edges"}
    if not isinstance(doc, dict) or set(doc) != required:
        raise ValueError(f"{path}: mesh document must have exactly the keys {sorted(required)}")
    return Mesh(
        vertices=np.array(doc["vertices"], dtype=np.float64),
        triangles=np.array(doc["triangles"], dtype=np.int64),
        edges=np.array(doc["edges"], dtype=np.int64),
    )
