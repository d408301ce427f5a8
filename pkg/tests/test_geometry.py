import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import grid_nearest_labels, random_interior_positions
from coverage_control.errors import (
    CoincidentRobots,
    IndexOutOfRange,
    InvalidDomain,
    PositionOutsideDomain,
)
from coverage_control.geometry import (
    Domain,
    boundary_segment,
    clip_halfplane,
    delaunay_distances,
    polygon_area,
    polygon_centroid,
    project_into_polygon,
    tessellate,
)

SQUARE = np.array([[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]])


class TestClipHalfplane:
    def test_axis_aligned_cut(self):
        out = clip_halfplane(SQUARE, np.array([1.0, 0.0]), 0.0)
        assert abs(polygon_area(out) - 2.0) < 1e-12
        assert np.all(out[:, 0] <= 1e-12)
        assert out[:, 1].min() == -1.0 and out[:, 1].max() == 1.0

    def test_halfplane_contains_polygon(self):
        out = clip_halfplane(SQUARE, np.array([1.0, 0.0]), 2.0)
        assert np.allclose(out, SQUARE)

    def test_triangle_cut_area(self):
        # (0,0),(1,0),(0,1) cut by x <= 0.5 leaves a quadrilateral; shoelace
        # on (0,0),(0.5,0),(0.5,0.5),(0,1) gives 0.375.
        tri = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
        out = clip_halfplane(tri, np.array([1.0, 0.0]), 0.5)
        assert len(out) == 4
        assert abs(polygon_area(out) - 0.375) < 1e-12

    def test_empty_result(self):
        out = clip_halfplane(SQUARE, np.array([1.0, 0.0]), -2.0)
        assert out.shape == (0, 2)

    @given(
        ax=st.floats(-1, 1), ay=st.floats(-1, 1), b=st.floats(-1.5, 1.5),
    )
    @settings(max_examples=200, deadline=None)
    def test_clip_properties(self, ax, ay, b):
        a = np.array([ax, ay])
        if np.linalg.norm(a) < 1e-6:
            return
        out = clip_halfplane(SQUARE, a, b)
        area = polygon_area(out)
        assert -1e-12 <= area <= polygon_area(SQUARE) + 1e-12
        if len(out):
            assert np.all(out @ a - b <= 1e-9)
            # idempotent: clipping again changes nothing
            again = clip_halfplane(out, a, b)
            assert abs(polygon_area(again) - area) < 1e-12


class TestDomain:
    def test_rejects_clockwise(self):
        with pytest.raises(InvalidDomain):
            Domain(SQUARE[::-1])

    def test_rejects_nonconvex(self):
        with pytest.raises(InvalidDomain):
            Domain(np.array([[0, 0], [2, 0], [1, 0.2], [2, 2], [0, 2]], dtype=float))

    def test_rejects_degenerate(self):
        with pytest.raises(InvalidDomain):
            Domain(np.array([[0, 0], [1, 0], [2, 0]], dtype=float))

    def test_inset_and_projection(self, unit_box):
        inner = unit_box.inset(0.1)
        assert abs(polygon_area(inner) - (1.8) ** 2) < 1e-12
        q = project_into_polygon(inner, np.array([2.0, 0.0]))
        assert np.allclose(q, [0.9, 0.0])
        q2 = project_into_polygon(inner, np.array([0.2, -0.1]))
        assert np.allclose(q2, [0.2, -0.1])


class TestTessellate:
    def test_single_robot_gets_whole_domain(self, unit_box):
        tess = tessellate(np.array([[0.2, 0.3]]), unit_box)
        assert abs(polygon_area(tess.cells[0]) - unit_box.area) < 1e-12
        assert tess.adjacency[0] == frozenset()

    def test_two_robots_perpendicular_bisector(self, unit_box):
        tess = tessellate(np.array([[-0.5, 0.0], [0.5, 0.0]]), unit_box)
        assert abs(polygon_area(tess.cells[0]) - 2.0) < 1e-12
        assert abs(polygon_area(tess.cells[1]) - 2.0) < 1e-12
        seg = boundary_segment(tess, 0, 1)
        assert np.allclose(sorted(seg[:, 1]), [-1.0, 1.0])
        assert np.allclose(seg[:, 0], 0.0)

    def test_position_outside_rejected(self, unit_box):
        with pytest.raises(PositionOutsideDomain):
            tessellate(np.array([[2.0, 0.0]]), unit_box)
        with pytest.raises(PositionOutsideDomain):
            tessellate(np.array([[1.0, 0.0]]), unit_box)  # boundary not strict inside

    def test_coincident_rejected(self, unit_box):
        with pytest.raises(CoincidentRobots):
            tessellate(np.array([[0.1, 0.1], [0.1, 0.1 + 1e-12]]), unit_box)

    def test_against_grid_oracle(self, rng, arena):
        p = random_interior_positions(rng, arena, 5)
        tess = tessellate(p, arena)
        labels, cell_area, _, _ = grid_nearest_labels(arena, p, res=1000)
        for i in range(5):
            oracle_area = np.count_nonzero(labels == i) * cell_area
            assert abs(polygon_area(tess.cells[i]) - oracle_area) / oracle_area < 1e-3

    def test_partition_property(self, rng, arena):
        for _ in range(100):
            n = int(rng.integers(2, 11))
            p = random_interior_positions(rng, arena, n, min_sep=0.05)
            tess = tessellate(p, arena)
            total = sum(polygon_area(c) for c in tess.cells)
            assert abs(total - arena.area) / arena.area < 1e-9
            for i in range(n):
                assert arena.contains(tess.positions[i])

    def test_nearest_robot_property(self, rng, arena):
        p = random_interior_positions(rng, arena, 7)
        tess = tessellate(p, arena)
        normals = {}
        for i, cell in enumerate(tess.cells):
            e = np.roll(cell, -1, axis=0) - cell
            nrm = np.stack([e[:, 1], -e[:, 0]], axis=1)
            normals[i] = (nrm, np.einsum("kj,kj->k", nrm, cell))
        qs = rng.uniform(-3, 3, size=(10_000, 2))
        d2 = ((qs[:, None, :] - p[None, :, :]) ** 2).sum(axis=2)
        for i, cell in enumerate(tess.cells):
            nrm, off = normals[i]
            inside = np.all(qs @ nrm.T - off[None, :] <= 1e-12, axis=1)
            dev = np.sqrt(d2[inside, i]) - np.sqrt(d2[inside].min(axis=1))
            assert np.all(dev <= 1e-9)

    def test_robot_inside_own_cell(self, rng, arena):
        for _ in range(20):
            n = int(rng.integers(2, 9))
            p = random_interior_positions(rng, arena, n, min_sep=0.05)
            tess = tessellate(p, arena)
            for i in range(n):
                cell = tess.cells[i]
                e = np.roll(cell, -1, axis=0) - cell
                nrm = np.stack([e[:, 1], -e[:, 0]], axis=1)
                off = np.einsum("kj,kj->k", nrm, cell)
                assert np.all(nrm @ p[i] - off <= 1e-9)

    def test_faces_equidistant(self, rng, arena):
        p = random_interior_positions(rng, arena, 6)
        tess = tessellate(p, arena)
        for (i, j), seg in tess.shared_boundaries.items():
            for s in np.linspace(0, 1, 7):
                q = seg[0] + s * (seg[1] - seg[0])
                di = np.linalg.norm(q - p[i])
                dj = np.linalg.norm(q - p[j])
                assert abs(di - dj) < 1e-9

    def test_adjacency_symmetric_and_matches_grid(self, rng, arena):
        p = random_interior_positions(rng, arena, 6)
        tess = tessellate(p, arena)
        for i in range(6):
            for j in tess.adjacency[i]:
                assert i in tess.adjacency[j]
        labels, cell_area, xs, ys = grid_nearest_labels(arena, p, res=600)
        h = xs[1] - xs[0]
        touch = np.zeros((6, 6), dtype=int)
        a, b = labels[:-1, :], labels[1:, :]
        for u, v in zip(a.ravel(), b.ravel()):
            if u != v and u >= 0 and v >= 0:
                touch[u, v] += 1
                touch[v, u] += 1
        a, b = labels[:, :-1], labels[:, 1:]
        for u, v in zip(a.ravel(), b.ravel()):
            if u != v and u >= 0 and v >= 0:
                touch[u, v] += 1
                touch[v, u] += 1
        for i in range(6):
            for j in range(i + 1, 6):
                seg = tess.shared_boundaries.get((i, j))
                face_len = 0.0 if seg is None else float(np.linalg.norm(seg[1] - seg[0]))
                if face_len > 5 * h:
                    assert touch[i, j] > 0, f"grid oracle missed face ({i},{j})"
                if touch[i, j] >= 3:
                    assert j in tess.adjacency[i], f"tessellation missed face ({i},{j})"

    def test_permutation_equivariance(self, rng, arena):
        p = random_interior_positions(rng, arena, 5)
        tess = tessellate(p, arena)
        perm = rng.permutation(5)
        tess_p = tessellate(p[perm], arena)
        for new_i, old_i in enumerate(perm):
            a = tess.cells[old_i]
            b = tess_p.cells[new_i]
            assert abs(polygon_area(a) - polygon_area(b)) < 1e-12
            assert np.allclose(polygon_centroid(a), polygon_centroid(b), atol=1e-12)
        for new_i, old_i in enumerate(perm):
            mapped = frozenset(int(np.where(perm == j)[0][0]) for j in tess.adjacency[old_i])
            assert mapped == tess_p.adjacency[new_i]


class TestBoundarySegment:
    def test_two_robot_segment(self, unit_box):
        tess = tessellate(np.array([[-0.5, 0.0], [0.5, 0.0]]), unit_box)
        seg = boundary_segment(tess, 1, 0)
        assert np.allclose(np.sort(seg[:, 1]), [-1, 1]) and np.allclose(seg[:, 0], 0)

    def test_collinear_non_adjacent(self):
        dom = Domain.box(-2, 2, -2, 2)
        tess = tessellate(np.array([[-1.0, 0.0], [0.0, 0.0], [1.0, 0.0]]), dom)
        assert boundary_segment(tess, 0, 2) is None
        assert boundary_segment(tess, 0, 1) is not None

    def test_diagonal_corner_square_is_point_contact(self, unit_box):
        # Four robots at corners of a centered square: diagonal cells meet at
        # the single center point, which is not a face.
        p = 0.5 * np.array([[-1, -1], [1, -1], [1, 1], [-1, 1]], dtype=float)
        tess = tessellate(p, unit_box)
        assert boundary_segment(tess, 0, 2) is None
        assert boundary_segment(tess, 1, 3) is None
        assert boundary_segment(tess, 0, 1) is not None

    def test_index_errors(self, unit_box):
        tess = tessellate(np.array([[-0.5, 0.0], [0.5, 0.0]]), unit_box)
        with pytest.raises(IndexOutOfRange):
            boundary_segment(tess, 0, 2)
        with pytest.raises(IndexOutOfRange):
            boundary_segment(tess, 0, 0)


def test_delaunay_distances_chain():
    dom = Domain.box(-4, 4, -1, 1)
    p = np.array([[-3.0, 0.0], [-1.5, 0.0], [0.0, 0.0], [1.5, 0.0], [3.0, 0.0]])
    tess = tessellate(p, dom)
    dist = delaunay_distances(tess)
    assert dist[0, 4] == 4 and dist[0, 1] == 1 and dist[2, 2] == 0
