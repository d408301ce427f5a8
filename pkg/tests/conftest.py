"""Shared fixtures and brute-force oracles."""

import numpy as np
import pytest

from coverage_control.density import DensityField
from coverage_control.geometry import Domain


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)


@pytest.fixture
def unit_box():
    return Domain.box(-1.0, 1.0, -1.0, 1.0)


@pytest.fixture
def arena():
    return Domain.box(-3.0, 3.0, -3.0, 3.0)


def uniform_field(value: float = 1.0) -> DensityField:
    """Constant density realized as a components-free field with floor=value."""
    return DensityField(components=(), floor=value)


def random_interior_positions(rng, domain: Domain, n: int,
                              margin: float = 0.3, min_sep: float = 0.25) -> np.ndarray:
    """Well-separated random positions strictly inside the domain."""
    lo = domain.vertices.min(axis=0)
    hi = domain.vertices.max(axis=0)
    pts = []
    while len(pts) < n:
        q = rng.uniform(lo, hi)
        if domain.signed_distance(q) > -margin:
            continue
        if any(np.linalg.norm(q - p) < min_sep for p in pts):
            continue
        pts.append(q)
    return np.array(pts)


def grid_nearest_labels(domain: Domain, positions: np.ndarray, res: int = 1000):
    """Label a res x res grid over the domain bbox by nearest robot (-1 outside).

    Returns (labels, cell_area, xs, ys): the independent oracle for cell
    areas, the nearest-robot property, and grid adjacency.
    """
    lo = domain.vertices.min(axis=0)
    hi = domain.vertices.max(axis=0)
    xs = np.linspace(lo[0], hi[0], res, endpoint=False) + (hi[0] - lo[0]) / (2 * res)
    ys = np.linspace(lo[1], hi[1], res, endpoint=False) + (hi[1] - lo[1]) / (2 * res)
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    pts = np.stack([gx.ravel(), gy.ravel()], axis=1)

    normals, offsets = domain.halfplanes()
    inside = np.all(pts @ normals.T - offsets[None, :] <= 0.0, axis=1)

    d2 = ((pts[:, None, :] - positions[None, :, :]) ** 2).sum(axis=2)
    labels = np.argmin(d2, axis=1)
    labels[~inside] = -1
    cell_area = (hi[0] - lo[0]) * (hi[1] - lo[1]) / res**2
    return labels.reshape(res, res), cell_area, xs, ys
