import math

import numpy as np
import pytest

from heisframe import crofton_mc as cm
from heisframe import heis_core as hc
from heisframe.crofton_mc import HorizontalLine, SamplingBox, TriMesh
from heisframe.errors import EmptyMesh
from heisframe.surface_lab import SurfaceGrid

ANNULUS = 14 * math.pi / 3


def annulus_grid(nr=3, nphi=257):
    r = np.linspace(1, 2, nr)
    phi = np.linspace(0, 2 * math.pi, nphi)
    return SurfaceGrid.from_function(lambda R, P: (R * np.cos(P), R * np.sin(P), 5 + 0 * R), r, phi)


@pytest.fixture(scope="module")
def annulus():
    return cm.mesh_from_grid(annulus_grid())


def square(x0, x1, y0, y1, z):
    v = [[x0, y0, z], [x1, y0, z], [x1, y1, z], [x0, y1, z]]
    return TriMesh(v, [[0, 1, 2], [0, 2, 3]])


def test_line_point_examples():
    ln = HorizontalLine(1.0, 0.0, 0.0)
    assert line_xyz(ln, 5.0) == pytest.approx((1, -5, 5), abs=1e-15)
    assert line_xyz(ln, 0.0) == pytest.approx(tuple(ln.base()), abs=0)


def line_xyz(ln, s):
    q = cm.line_point(ln, s)
    return (q.x, q.y, q.z)


def test_lines_are_horizontal():
    rng = np.random.default_rng(0)
    worst = 0.0
    for _ in range(1000):
        ln = HorizontalLine(rng.uniform(-5, 5), rng.uniform(0, 2 * math.pi), rng.uniform(-5, 5))
        q = cm.line_point(ln, rng.uniform(-10, 10))
        worst = max(worst, abs(hc.theta(np.array([q.x, q.y, q.z]), ln.direction())))
        assert np.hypot(*ln.direction()[:2]) == pytest.approx(1.0, abs=1e-15)
    assert worst <= 1e-12


def test_reversed_line_is_same_set():
    ln = HorizontalLine(0.7, 1.1, -0.4)
    rv = ln.reversed()
    for s in (-2.0, 0.3, 4.0):
        a = np.array(line_xyz(ln, s))
        b = np.array(line_xyz(rv, -s))
        np.testing.assert_allclose(a, b, atol=1e-14)


def test_reversed_coding_counts_agree(annulus):
    rng = np.random.default_rng(3)
    P = rng.uniform(-2, 2, 5000)
    TH = rng.uniform(0, 2 * math.pi, 5000)
    T = rng.uniform(1, 9, 5000)
    fwd = cm.count_many(P, TH, T, annulus)
    rev = cm.count_many(-P, np.fmod(TH + math.pi, 2 * math.pi), T, annulus)
    assert fwd.sum() > 100
    np.testing.assert_array_equal(fwd, rev)


def test_count_square_patch():
    patch = square(0, 2, -6, -4, 5)
    assert cm.count_intersections(HorizontalLine(1, 0, 0), patch) == 1
    assert cm.count_intersections(HorizontalLine(0, 0, 0), patch) == 0


def brute_hits(ln, mesh):
    """Solve the line against each triangle's plane and test barycentrics."""
    B, U = ln.base(), ln.direction()
    hits = 0
    for c in mesh.corners():
        e1, e2 = c[1] - c[0], c[2] - c[0]
        A = np.column_stack([e1, e2, -U])
        lam1, lam2, _ = np.linalg.solve(A, B - c[0])
        hits += lam1 >= 0 and lam2 >= 0 and lam1 + lam2 <= 1
    return hits


def test_count_v_fold():
    # two vertical facets meeting along a ridge at x = 3
    v = [
        [-1, -1, -10], [3, -2, -10], [3, -2, 10], [-1, -1, 10],
        [-1, -3, -10], [-1, -3, 10],
    ]
    mesh = TriMesh(v, [[0, 1, 2], [0, 2, 3], [4, 1, 2], [4, 2, 5]])
    ln = HorizontalLine(1, 0, 0)
    assert brute_hits(ln, mesh) == 2
    assert cm.count_intersections(ln, mesh) == 2


def test_counts_match_brute_force():
    rng = np.random.default_rng(11)
    v = rng.normal(size=(30, 3))
    tris = np.array([rng.choice(30, 3, replace=False) for _ in range(40)])
    mesh = TriMesh(v, tris)
    box = cm.sampling_box(mesh)
    for _ in range(300):
        ln = HorizontalLine(rng.uniform(*box.p), rng.uniform(0, 2 * math.pi), rng.uniform(*box.t))
        assert cm.count_intersections(ln, mesh) == brute_hits(ln, mesh)


def test_shared_edge_counted_once():
    patch = square(-1, 1, -1, 1, 0.0)
    # a line crossing z=0 exactly on the diagonal (-1,-1)-(1,1)
    ln = HorizontalLine(0.25, math.pi / 4, 0.0)
    hit = np.array(line_xyz(ln, 0.0))
    assert abs(hit[0] - hit[1]) < 1e-15
    assert cm.count_intersections(ln, patch) == 1


def test_coplanar_line_is_resampled():
    patch = square(-1, 1, -1, 1, 0.0)
    # p = 0, t = 0 lies in the plane z = 0
    ln = HorizontalLine(0.0, 0.3, 0.0)
    n = cm.count_intersections(ln, patch)
    shifted = cm.count_intersections(HorizontalLine(cm._shift(patch), 0.3, 0.0), patch)
    assert n == shifted == 1


def test_p_area_examples():
    u = np.linspace(0, 1, 21)
    plane = SurfaceGrid.from_function(lambda U, V: (U, 0 * U, V), u, u)
    assert cm.p_area(plane) == pytest.approx(1.0, abs=1e-12)
    assert cm.p_area(annulus_grid(41, 257)) == pytest.approx(ANNULUS, rel=5e-4)


def test_p_area_of_empty_mesh_is_zero():
    assert cm.mesh_p_area(TriMesh(np.zeros((0, 3)), np.zeros((0, 3)))) == 0.0


def test_p_area_refinement_is_monotone():
    errs = [abs(cm.p_area(annulus_grid(nr, 4 * nr)) - ANNULUS) for nr in (5, 9, 17, 33)]
    assert all(b < a for a, b in zip(errs, errs[1:]))
    mesh_errs = [abs(cm.mesh_p_area(cm.mesh_from_grid(annulus_grid(3, n))) - ANNULUS) for n in (33, 65, 129)]
    assert all(b < a for a, b in zip(mesh_errs, mesh_errs[1:]))


def test_sampling_box_examples(annulus):
    box = cm.sampling_box(annulus)
    assert box.p == pytest.approx((-2, 2))
    assert box.t == pytest.approx((1, 9))
    assert box.theta == pytest.approx((0, 2 * math.pi))
    unit = square(-0.5, 0.5, -0.5, 0.5, 0.0)
    assert cm.sampling_box(unit).t == pytest.approx((-0.5, 0.5))
    with pytest.raises(EmptyMesh):
        cm.sampling_box(TriMesh(np.zeros((0, 3)), np.zeros((0, 3))))


def test_single_point_gives_zero():
    pt = TriMesh([[0.0, 0.0, 0.0]], np.zeros((0, 3)))
    box = cm.sampling_box(pt)
    assert box.volume() == 0.0
    est = cm.crofton_estimate(pt, 100, seed=0)
    assert est.estimate == 0.0 and est.std_error == 0.0


def test_box_contains_every_hit_line(annulus):
    box = cm.sampling_box(annulus)
    wide = box.scaled(1.5)
    samples = cm.block_samples(wide, 9, 0, 20000)
    hits = cm.count_many(*samples, annulus)
    P, _, T = samples[:, hits > 0]
    assert np.all((P >= box.p[0]) & (P <= box.p[1]))
    assert np.all((T >= box.t[0]) & (T <= box.t[1]))


def test_estimate_is_deterministic_across_workers(annulus):
    a = cm.crofton_estimate(annulus, 50_000, seed=4, workers=1, block=4096)
    b = cm.crofton_estimate(annulus, 50_000, seed=4, workers=3, block=4096)
    assert a.estimate == b.estimate and a.std_error == b.std_error
    assert a.to_json() == b.to_json()


def test_estimate_rejects_zero_samples(annulus):
    with pytest.raises(ValueError):
        cm.crofton_estimate(annulus, 0, seed=1)


def test_estimate_near_four_times_p_area(annulus):
    est = cm.crofton_estimate(annulus, 200_000, seed=2)
    assert est.std_error > 0
    assert abs(est.estimate - 4 * cm.mesh_p_area(annulus)) <= 4 * est.std_error
    js = est.to_json(p_area=ANNULUS)
    assert js["ratio"] == pytest.approx(est.estimate / (4 * ANNULUS))
    assert set(js["box"]) == {"p", "theta", "t"}


def test_doubled_box_agrees(annulus):
    a = cm.crofton_estimate(annulus, 200_000, seed=5)
    b = cm.crofton_estimate(annulus, 200_000, seed=6, box=cm.sampling_box(annulus).scaled(2.0))
    z = (a.estimate - b.estimate) / math.hypot(a.std_error, b.std_error)
    assert abs(z) < 4


def test_box_excluding_mesh_gives_zero(annulus):
    far = SamplingBox((10.0, 11.0), (0.0, 2 * math.pi), (100.0, 101.0))
    assert cm.crofton_estimate(annulus, 10_000, seed=1, box=far).estimate == 0.0


def test_tensor_quadrature_small_square():
    patch = square(-0.5, 0.5, -0.5, 0.5, 0.0)
    exact = (math.sqrt(2) + math.log(1 + math.sqrt(2))) / 6
    assert cm.mesh_p_area(patch, order=16) == pytest.approx(exact, rel=1e-3)
    assert cm.tensor_quadrature(patch, resolution=80) == pytest.approx(4 * exact, rel=2e-2)


def test_mesh_from_grid_layout():
    g = annulus_grid(4, 9)
    m = cm.mesh_from_grid(g)
    assert len(m) == 2 * 3 * 8
    nv = g.shape[1]
    # first cell split along (0,0)-(1,1)
    assert list(m.triangles[0]) == [0, nv, nv + 1]
    assert list(m.triangles[len(m) // 2]) == [0, nv + 1, 1]
    assert np.all(m.cells[: len(m) // 2] == np.arange(len(m) // 2))


def test_trimesh_validation():
    with pytest.raises(ValueError):
        TriMesh([[0, 0, 0], [1, 0, 0], [0, 1, 0]], [[0, 1, 3]])
    with pytest.raises(ValueError):
        TriMesh([[0, 0, 0], [1, 0, 0], [2, 0, 0]], [[0, 1, 2]])
    with pytest.raises(ValueError):
        TriMesh([[0, 0, np.nan], [1, 0, 0], [0, 1, 0]], [[0, 1, 2]])


def test_obj_round_trip(tmp_path, annulus):
    path = tmp_path / "a.obj"
    cm.write_obj(annulus, path)
    back = cm.read_obj(path)
    np.testing.assert_array_equal(back.vertices, annulus.vertices)
    np.testing.assert_array_equal(back.triangles, annulus.triangles)
    quad = tmp_path / "q.obj"
    quad.write_text("# quad\nv 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1/1 2/2 3/3 -1\n")
    q = cm.read_obj(quad)
    assert q.triangles.tolist() == [[0, 1, 2], [0, 2, 3]]
    bad = tmp_path / "bad.obj"
    bad.write_text("v 0 0 x\n")
    with pytest.raises(ValueError):
        cm.read_obj(bad)
