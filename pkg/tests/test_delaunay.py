import numpy as np
import pytest
from scipy.spatial import ConvexHull

from rdtbench.delaunay import (
    DegenerateSiteError,
    SiteSet,
    build_delaunay,
    check_empty_circumspheres,
)

OCTA = np.array(
    [
        [1.0, 0, 0],
        [-1.0, 0, 0],
        [0, 1.0, 0],
        [0, -1.0, 0],
        [0, 0, 1.0],
        [0, 0, -1.0],
    ]
)


def _hull_triangles(points):
    hull = ConvexHull(points)
    return sorted(tuple(sorted(s)) for s in hull.simplices)


def test_four_points_single_tet():
    dc = build_delaunay(np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]], float))
    assert dc.tets == [(0, 1, 2, 3)]
    assert len(dc.hull_faces) == 4
    assert len(dc.faces) == 4
    assert len(dc.edges) == 6


def test_too_few_sites():
    with pytest.raises(DegenerateSiteError):
        build_delaunay(np.zeros((3, 3)) + np.arange(3)[:, None])


def test_coplanar_sites_redirect_to_2d():
    pts = np.zeros((8, 3))
    pts[:, 0] = np.arange(8)
    pts[:, 1] = (np.arange(8) * 7) % 5
    with pytest.raises(DegenerateSiteError, match="2D"):
        build_delaunay(pts)


def test_duplicate_sites_rejected():
    pts = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 0, 0]], float)
    with pytest.raises(ValueError, match="distinct"):
        SiteSet(pts)


def test_octahedron_cospherical():
    dc = build_delaunay(OCTA)
    # Any triangulation of the octahedron uses one main diagonal: 4 tets.
    assert len(dc.tets) == 4
    assert len(dc.hull_faces) == 8
    assert dc.hull_faces == _hull_triangles(OCTA)
    assert len(dc.tie_record) > 0
    assert not check_empty_circumspheres(dc)


def test_octahedron_deterministic():
    a = build_delaunay(OCTA)
    b = build_delaunay(OCTA)
    assert a.tets == b.tets
    assert a.tie_record == b.tie_record


def test_cube_cospherical():
    corners = np.array(
        [[x, y, z] for x in (-1.0, 1.0) for y in (-1.0, 1.0) for z in (-1.0, 1.0)]
    )
    dc = build_delaunay(corners)
    assert not check_empty_circumspheres(dc)
    # The cube tiles into 5 or 6 tets depending on the tie-break.
    assert len(dc.tets) in (5, 6)
    vol = 0.0
    for t in dc.tets:
        a, b, c, d = (corners[v] for v in t)
        vol += abs(np.dot(np.cross(b - a, c - a), d - a)) / 6.0
    assert vol == pytest.approx(8.0)


def test_random_sphere_sites_hull_faces_are_delaunay():
    # Cospherical sites: every hull triangle must appear as a Delaunay face.
    rng = np.random.default_rng(42)
    pts = rng.normal(size=(100, 3))
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    dc = build_delaunay(pts)
    hull = _hull_triangles(pts)
    assert set(hull) <= set(dc.faces)
    assert sorted(dc.hull_faces) == hull


def test_random_points_empty_circumsphere():
    rng = np.random.default_rng(1)
    pts = rng.uniform(-1, 1, size=(40, 3))
    dc = build_delaunay(pts)
    assert not check_empty_circumspheres(dc)


def test_random_points_tile_the_hull():
    rng = np.random.default_rng(5)
    pts = rng.uniform(-1, 1, size=(60, 3))
    dc = build_delaunay(pts)
    hull_vol = ConvexHull(pts).volume
    vol = 0.0
    for t in dc.tets:
        a, b, c, d = (pts[v] for v in t)
        vol += abs(np.dot(np.cross(b - a, c - a), d - a)) / 6.0
    assert vol == pytest.approx(hull_vol, rel=1e-9)
    # Interior faces belong to exactly two tets, hull faces to one.
    hull = set(_hull_triangles(pts))
    for f, ts in dc.face_tets.items():
        assert len(ts) == (1 if f in hull else 2)


def test_every_site_appears():
    rng = np.random.default_rng(9)
    pts = rng.normal(size=(50, 3))
    dc = build_delaunay(pts)
    assert dc.vertex_count() == 50


def test_determinism_bit_identical():
    rng = np.random.default_rng(11)
    pts = rng.normal(size=(80, 3))
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)  # cospherical stress
    a = build_delaunay(pts)
    b = build_delaunay(pts)
    assert a.tets == b.tets
    assert a.hull_faces == b.hull_faces
    assert a.edges == b.edges
