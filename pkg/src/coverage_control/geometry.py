"""Voronoi tessellations of a convex polygonal domain.

Cells are built by iterated half-plane clipping (O(n^2) per tessellation,
robust at the tens-of-robots scale this toolkit targets). Shared faces
between cells and the induced Delaunay adjacency are exposed explicitly
because the downstream centroid-sensitivity computation integrates over
exactly those faces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    CoincidentRobots,
    IndexOutOfRange,
    InvalidDomain,
    PositionOutsideDomain,
)

# Faces shorter than this are treated as vertex contact, not adjacency.
FACE_MIN_LENGTH = 1e-9
# Robots closer than this have no numerically meaningful bisector.
EPS_SEPARATION = 1e-9


def polygon_area(vertices) -> float:
    """Signed shoelace area; positive for counterclockwise order."""
    v = np.asarray(vertices, dtype=float)
    if len(v) < 3:
        return 0.0
    x, y = v[:, 0], v[:, 1]
    wrap = x[-1] * y[0] - x[0] * y[-1]
    return 0.5 * (float(np.dot(x[:-1], y[1:]) - np.dot(x[1:], y[:-1])) + float(wrap))


def polygon_centroid(vertices) -> np.ndarray:
    """Area centroid of a simple polygon (vertex mean if nearly degenerate)."""
    v = np.asarray(vertices, dtype=float)
    a = polygon_area(v)
    if abs(a) < 1e-14:
        return v.mean(axis=0)
    x, y = v[:, 0], v[:, 1]
    x1 = np.concatenate([x[1:], x[:1]])
    y1 = np.concatenate([y[1:], y[:1]])
    cross = x * y1 - x1 * y
    cx = float(np.dot(x + x1, cross)) / (6.0 * a)
    cy = float(np.dot(y + y1, cross)) / (6.0 * a)
    return np.array([cx, cy])


def clip_halfplane(polygon, a, b: float) -> np.ndarray:
    """Intersect a convex polygon with the half-plane {q : a . q <= b}.

    Returns the clipped polygon (counterclockwise, possibly empty with
    shape (0, 2)). Single-plane Sutherland-Hodgman pass; scalar inner loop
    because cells have ~10 vertices and this sits on the simulation hot path.
    """
    poly = np.asarray(polygon, dtype=float)
    if poly.size == 0:
        return poly.reshape(0, 2)
    a = np.asarray(a, dtype=float)
    d = (poly @ a - b).tolist()
    pts = poly.tolist()
    m = len(pts)
    if max(d) <= 0.0:
        return poly
    out: list = []
    for k in range(m):
        k1 = k + 1 if k + 1 < m else 0
        d0, d1 = d[k], d[k1]
        if d0 <= 0.0:
            out.append(pts[k])
        if (d0 < 0.0 < d1) or (d1 < 0.0 < d0):
            s = d0 / (d0 - d1)
            x0, y0 = pts[k]
            x1, y1 = pts[k1]
            out.append([x0 + s * (x1 - x0), y0 + s * (y1 - y0)])
    if not out:
        return np.zeros((0, 2))
    # Drop consecutive duplicates introduced by vertices lying on the cut line.
    kept: list = []
    for q in out:
        if kept and abs(q[0] - kept[-1][0]) <= 1e-13 and abs(q[1] - kept[-1][1]) <= 1e-13:
            continue
        kept.append(q)
    if len(kept) > 1 and abs(kept[0][0] - kept[-1][0]) <= 1e-13 \
            and abs(kept[0][1] - kept[-1][1]) <= 1e-13:
        kept.pop()
    if len(kept) < 3:
        return np.zeros((0, 2))
    return np.array(kept)


@dataclass(frozen=True)
class Domain:
    """Convex polygonal domain, vertices in counterclockwise order (meters)."""

    vertices: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        object.__setattr__(self, "vertices", v)
        if v.ndim != 2 or v.shape[1] != 2 or len(v) < 3:
            raise InvalidDomain("domain needs at least 3 planar vertices")
        area = polygon_area(v)
        if area <= 0.0:
            raise InvalidDomain(
                f"domain must be counterclockwise with positive area (got area {area:g})"
            )
        # Convexity: every cross product of consecutive edges non-negative.
        e = np.roll(v, -1, axis=0) - v
        cross = e[:, 0] * np.roll(e, -1, axis=0)[:, 1] - e[:, 1] * np.roll(e, -1, axis=0)[:, 0]
        scale = float(np.abs(e).max()) ** 2
        if np.any(cross < -1e-12 * max(scale, 1.0)):
            raise InvalidDomain("domain polygon is not convex")
        # Inward half-planes, cached: a_k . q <= b_k inside, a_k unit outward.
        normals = np.stack([e[:, 1], -e[:, 0]], axis=1)
        normals /= np.linalg.norm(normals, axis=1)[:, None]
        offsets = np.einsum("ij,ij->i", normals, v)
        object.__setattr__(self, "_normals", normals)
        object.__setattr__(self, "_offsets", offsets)

    @classmethod
    def box(cls, xmin: float, xmax: float, ymin: float, ymax: float) -> "Domain":
        return cls(np.array([[xmin, ymin], [xmax, ymin], [xmax, ymax], [xmin, ymax]]))

    @property
    def area(self) -> float:
        return polygon_area(self.vertices)

    def halfplanes(self):
        """Inward half-planes (a_k, b_k) with a_k . q <= b_k inside, a_k unit."""
        return self._normals, self._offsets

    def signed_distance(self, q) -> float:
        """Max over edges of a . q - b: negative strictly inside, 0 on boundary."""
        return float(np.max(self._normals @ np.asarray(q, dtype=float) - self._offsets))

    def signed_distances(self, pts) -> np.ndarray:
        """Vectorized signed_distance over an (N, 2) batch."""
        pts = np.asarray(pts, dtype=float)
        return np.max(pts @ self._normals.T - self._offsets[None, :], axis=1)

    def contains(self, q, tol: float = 1e-12) -> bool:
        return self.signed_distance(q) <= tol

    def inset(self, margin: float) -> np.ndarray:
        """Polygon of points at least `margin` inside every edge."""
        poly = self.vertices
        normals, offsets = self.halfplanes()
        for a, b in zip(normals, offsets):
            poly = clip_halfplane(poly, a, b - margin)
        if len(poly) < 3:
            raise InvalidDomain(f"margin {margin:g} collapses the domain")
        return poly


def project_into_polygon(polygon, q) -> np.ndarray:
    """Nearest point of a convex polygon to q (q itself when inside)."""
    poly = np.asarray(polygon, dtype=float)
    q = np.asarray(q, dtype=float)
    e = np.roll(poly, -1, axis=0) - poly
    normals = np.stack([e[:, 1], -e[:, 0]], axis=1)
    if np.all(np.einsum("ij,j->i", normals, q) <= np.einsum("ij,ij->i", normals, poly)):
        return q.copy()
    best, best_d2 = None, np.inf
    for k in range(len(poly)):
        p0 = poly[k]
        d = e[k]
        denom = float(d @ d)
        s = 0.0 if denom == 0.0 else float(np.clip((q - p0) @ d / denom, 0.0, 1.0))
        cand = p0 + s * d
        d2 = float(np.sum((q - cand) ** 2))
        if d2 < best_d2:
            best, best_d2 = cand, d2
    return best


@dataclass(frozen=True)
class Tessellation:
    """Voronoi partition of a domain induced by robot positions.

    `shared_boundaries` maps ordered index pairs (i, j), i < j, to a (2, 2)
    segment array; both orders resolve through `boundary_segment`.
    """

    domain: Domain
    positions: np.ndarray
    cells: list = field(repr=False)
    shared_boundaries: dict = field(repr=False)
    adjacency: dict = field(repr=False)

    @property
    def n(self) -> int:
        return len(self.positions)

    def neighbors(self, i: int):
        return self.adjacency[i]


def _face_on_line(cell: np.ndarray, a: np.ndarray, b: float):
    """Extract the (possibly empty) edge of `cell` lying on {a . q = b}."""
    d = cell @ a - b
    on_line = np.abs(d) <= FACE_MIN_LENGTH
    if np.count_nonzero(on_line) < 2:
        return None
    pts = cell[on_line]
    tangent = np.array([-a[1], a[0]])
    s = pts @ tangent
    lo, hi = np.argmin(s), np.argmax(s)
    if s[hi] - s[lo] <= FACE_MIN_LENGTH:
        return None
    return np.array([pts[lo], pts[hi]])


def tessellate(positions, domain: Domain, eps_sep: float = EPS_SEPARATION) -> Tessellation:
    """Voronoi tessellation: each cell is the domain cut by n-1 bisector half-planes.

    Raises PositionOutsideDomain or CoincidentRobots on invalid input.
    """
    p = np.asarray(positions, dtype=float)
    if p.ndim == 1:
        p = p.reshape(1, 2)
    n = len(p)
    sd = domain.signed_distances(p)
    if np.any(sd >= 0.0):
        i = int(np.argmax(sd))
        raise PositionOutsideDomain(f"robot {i} at {p[i].tolist()} not strictly inside domain")
    if n > 1:
        diffs = p[:, None, :] - p[None, :, :]
        d2 = np.einsum("ijk,ijk->ij", diffs, diffs)
        np.fill_diagonal(d2, np.inf)
        imin = np.unravel_index(np.argmin(d2), d2.shape)
        if d2[imin] < eps_sep**2:
            raise CoincidentRobots(
                f"robots {imin[0]} and {imin[1]} closer than {eps_sep:g} m"
            )

    # Bisector of (i, j): unit normal towards p_j, passing through the midpoint.
    cells = []
    planes = {}
    for i in range(n):
        poly = domain.vertices
        pi = p[i]
        for j in range(n):
            if j == i:
                continue
            pj = p[j]
            dx, dy = pj[0] - pi[0], pj[1] - pi[1]
            inv = 1.0 / math.sqrt(dx * dx + dy * dy)
            a = np.array([dx * inv, dy * inv])
            b = 0.5 * (a[0] * (pi[0] + pj[0]) + a[1] * (pi[1] + pj[1]))
            planes[(i, j)] = (a, b)
            poly = clip_halfplane(poly, a, b)
            if len(poly) == 0:
                break
        cells.append(poly)

    shared = {}
    adjacency = {i: set() for i in range(n)}
    for i in range(n):
        for j in range(i + 1, n):
            if len(cells[i]) == 0:
                continue
            a, b = planes[(i, j)]
            seg = _face_on_line(cells[i], a, b)
            if seg is not None:
                shared[(i, j)] = seg
                adjacency[i].add(j)
                adjacency[j].add(i)
    adjacency = {i: frozenset(v) for i, v in adjacency.items()}
    return Tessellation(domain=domain, positions=p, cells=cells,
                        shared_boundaries=shared, adjacency=adjacency)


def boundary_segment(tess: Tessellation, i: int, j: int):
    """Shared face of cells i and j as a (2, 2) segment, or None if not adjacent."""
    n = tess.n
    if not (0 <= i < n and 0 <= j < n) or i == j:
        raise IndexOutOfRange(f"invalid pair ({i}, {j}) for n={n}")
    key = (i, j) if i < j else (j, i)
    seg = tess.shared_boundaries.get(key)
    return None if seg is None else seg.copy()


def delaunay_distances(tess: Tessellation) -> np.ndarray:
    """All-pairs hop distances in the Delaunay adjacency graph (inf if disconnected)."""
    n = tess.n
    dist = np.full((n, n), np.inf)
    for s in range(n):
        dist[s, s] = 0
        frontier = [s]
        d = 0
        seen = {s}
        while frontier:
            d += 1
            nxt = []
            for u in frontier:
                for v in tess.adjacency[u]:
                    if v not in seen:
                        seen.add(v)
                        dist[s, v] = d
                        nxt.append(v)
            frontier = nxt
    return dist
