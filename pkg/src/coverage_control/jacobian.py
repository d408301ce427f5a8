"""Centroid sensitivity dc/dp from boundary integrals over shared Voronoi faces.

The block (i, j) is nonzero only for j = i or j a Delaunay neighbor of i:
moving a non-adjacent robot leaves cell i untouched. For an adjacent pair the
shared face sweeps as the bisector moves, and the sensitivity reduces to line
integrals of the density along that face:

    block(i, j)[a, b] = (I1[a, b] - c_i[a] * I0[b]) / m_i

with I0[b] = integral of phi * g_b, I1[a, b] = integral of phi * q[a] * g_b
over the face, where g_b(q) = (p_j[b] - q[b]) / |p_j - p_i| for i != j and
g_b(q) = (q[b] - p_i[b]) / |p_j - p_i| summed over all faces for i = j.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .density import DensityField
from .errors import EigensolveFailure, NotAdjacent, SingularSystem
from .geometry import Tessellation
from .moments import DEFAULT_QUADRATURE, MomentSet, QuadratureConfig
from .quadrature import segment_nodes

COND_LIMIT = 1e12
PIVOT_LIMIT = 1e-12


@dataclass
class CentroidJacobian:
    """Sparse block matrix: (i, j) -> 2x2 block, keys only on the Delaunay
    graph plus the diagonal. Missing blocks are zero."""

    n: int
    blocks: dict = field(repr=False)
    _spectral_radius: float | None = None

    def block(self, i: int, j: int) -> np.ndarray:
        b = self.blocks.get((i, j))
        return np.zeros((2, 2)) if b is None else b

    def dense(self) -> np.ndarray:
        out = np.zeros((2 * self.n, 2 * self.n))
        for (i, j), b in self.blocks.items():
            out[2 * i:2 * i + 2, 2 * j:2 * j + 2] = b
        return out

    def matvec(self, v: np.ndarray) -> np.ndarray:
        out = np.zeros_like(v)
        for (i, j), b in self.blocks.items():
            out[2 * i:2 * i + 2] += b @ v[2 * j:2 * j + 2]
        return out


def _face_moments(seg, phi_vals, wts, pts, ref, dist):
    """I0[b] and I1[a, b] for integrand factor (ref[b] - q[b]) / dist."""
    g = (ref[None, :] - pts) / dist  # (N, 2)
    wphi = wts * phi_vals
    i0 = wphi @ g
    i1 = pts.T @ (wphi[:, None] * g)
    return i0, i1


def dc_dp_block(tess: Tessellation, field: DensityField, t: float, i: int, j: int,
                mset: MomentSet, cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> np.ndarray:
    """Single 2x2 block dc_i/dp_j. For i != j the pair must share a face."""
    p = tess.positions
    m_i = mset.masses[i]
    c_i = mset.centroids[i]
    if i != j:
        if j not in tess.adjacency[i]:
            raise NotAdjacent(f"cells {i} and {j} share no face; block is zero")
        seg = tess.shared_boundaries[(i, j) if i < j else (j, i)]
        pts, wts = segment_nodes(seg[0], seg[1], cfg.segment_nodes)
        phi = field.values(pts, t)
        dist = float(np.linalg.norm(p[j] - p[i]))
        i0, i1 = _face_moments(seg, phi, wts, pts, p[j], dist)
        return (i1 - np.outer(c_i, i0)) / m_i
    out = np.zeros((2, 2))
    for k in tess.adjacency[i]:
        seg = tess.shared_boundaries[(i, k) if i < k else (k, i)]
        pts, wts = segment_nodes(seg[0], seg[1], cfg.segment_nodes)
        phi = field.values(pts, t)
        dist = float(np.linalg.norm(p[k] - p[i]))
        # (q[b] - p_i[b]) = -(p_i[b] - q[b]): reuse the same helper, negated.
        i0, i1 = _face_moments(seg, phi, wts, pts, p[i], dist)
        out += (-i1 + np.outer(c_i, i0)) / m_i
    return out


def assemble(tess: Tessellation, field: DensityField, t: float, mset: MomentSet,
             cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> CentroidJacobian:
    """All diagonal and Delaunay-edge blocks; each face is integrated once."""
    p = tess.positions
    n = tess.n
    blocks = {(i, i): np.zeros((2, 2)) for i in range(n)}
    for (i, j), seg in tess.shared_boundaries.items():
        pts, wts = segment_nodes(seg[0], seg[1], cfg.segment_nodes)
        phi = field.values(pts, t)
        dist = float(np.linalg.norm(p[j] - p[i]))
        i0_j, i1_j = _face_moments(seg, phi, wts, pts, p[j], dist)
        i0_i, i1_i = _face_moments(seg, phi, wts, pts, p[i], dist)
        m_i, c_i = mset.masses[i], mset.centroids[i]
        m_j, c_j = mset.masses[j], mset.centroids[j]
        blocks[(i, j)] = (i1_j - np.outer(c_i, i0_j)) / m_i
        blocks[(j, i)] = (i1_i - np.outer(c_j, i0_i)) / m_j
        blocks[(i, i)] += (-i1_i + np.outer(c_i, i0_i)) / m_i
        blocks[(j, j)] += (-i1_j + np.outer(c_j, i0_j)) / m_j
    return CentroidJacobian(n=n, blocks=blocks)


DENSE_EIG_MAX_ROBOTS = 100


def power_iteration_radius(jac: CentroidJacobian, iters: int = 200,
                           seed: int = 0) -> float:
    """Gelfand-style estimate (|J^m v| / |v|)^(1/m) of the spectral radius.

    Robust to complex eigenvalue pairs (magnitudes only); an estimate, not an
    exact eigensolve. Fallback for robot counts where the dense solve is
    unreasonable.
    """
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(2 * jac.n)
    norm = float(np.linalg.norm(v))
    if norm == 0.0 or not jac.blocks:
        return 0.0
    log_growth = 0.0
    for _ in range(iters):
        v = jac.matvec(v / norm)
        norm = float(np.linalg.norm(v))
        if norm == 0.0:
            return 0.0
        log_growth += np.log(norm)
    return float(np.exp(log_growth / iters))


def spectral_radius(jac: CentroidJacobian) -> float:
    """|lambda_max| of the Jacobian (nonsymmetric, possibly complex spectrum).

    Dense eigensolve at desk scale; switches to the power-iteration estimate
    beyond DENSE_EIG_MAX_ROBOTS. Cached on the Jacobian.
    """
    if jac._spectral_radius is not None:
        return jac._spectral_radius
    if jac.n > DENSE_EIG_MAX_ROBOTS:
        rho = power_iteration_radius(jac)
    else:
        try:
            eig = np.linalg.eigvals(jac.dense())
        except np.linalg.LinAlgError as exc:
            raise EigensolveFailure(str(exc)) from exc
        rho = float(np.max(np.abs(eig))) if len(eig) else 0.0
    jac._spectral_radius = rho
    return rho


def neumann_apply(jac: CentroidJacobian, hops: int, v: np.ndarray) -> np.ndarray:
    """Truncated Neumann series sum_{l<=hops} J^l v by repeated sparse matvec."""
    if hops < 0:
        raise ValueError("hop count must be >= 0")
    v = np.asarray(v, dtype=float)
    acc = v.copy()
    x = v
    for _ in range(hops):
        x = jac.matvec(x)
        acc += x
    return acc


def solve_exact(jac: CentroidJacobian, v: np.ndarray):
    """Solve (I - J) x = v by dense factorization.

    Returns (x, condition estimate). Raises SingularSystem when the system
    is singular or the condition estimate exceeds COND_LIMIT; the truncated
    Neumann form stays available in that regime.
    """
    v = np.asarray(v, dtype=float)
    m = np.eye(2 * jac.n) - jac.dense()
    try:
        sv = np.linalg.svd(m, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(str(exc)) from exc
    cond = float(sv[0] / sv[-1]) if sv[-1] > 0 else float("inf")
    if sv[-1] < PIVOT_LIMIT or not np.isfinite(cond) or cond > COND_LIMIT:
        raise SingularSystem(
            f"I - dc/dp near-singular (smallest singular value {sv[-1]:.3e}, "
            f"condition estimate {cond:.3e})", condition=cond)
    try:
        x = np.linalg.solve(m, v)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(str(exc), condition=cond) from exc
    return x, cond
