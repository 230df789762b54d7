import numpy as np
import pytest

from argyris import (
    EdgeRecord,
    MultiPatch,
    SpaceConfig,
    TensorSpace,
    UnivariateSpace,
    VertexRecord,
    check_regularity,
    load_geometry,
    refine,
    save_geometry,
    standard_form_edge,
    standard_form_vertex,
)
from argyris.errors import ConformityError, GeometryFormatError, TopologyError
from conftest import bilinear_patch


@pytest.fixture(scope="module")
def tspace():
    return TensorSpace(UnivariateSpace(3, 1, 2))


def test_rotate_identity(tspace):
    patch = bilinear_patch(tspace, (0, 0), (2, 0), (3, 2), (0, 1))
    np.testing.assert_array_equal(patch.rotate(0).net, patch.net)


def test_rotate_corner_chase(tspace):
    patch = bilinear_patch(tspace, (0, 0), (2, 0), (3, 2), (0, 1))
    rot = patch.rotate(1)
    # (F o r)(0,0) = F(1,0)
    np.testing.assert_allclose(rot.corner(0), patch.corner(1), atol=0)


def test_rotate_four_times_identity(tspace):
    patch = bilinear_patch(tspace, (0, 0), (2, 0), (3, 2), (0, 1))
    rot = patch.rotate(1).rotate(1).rotate(1).rotate(1)
    np.testing.assert_array_equal(rot.net, patch.net)


def test_rotate_is_exact_reparametrization(tspace):
    patch = bilinear_patch(tspace, (0, 0), (2, 0), (3, 2), (0, 1))
    rng = np.random.default_rng(0)
    uv = rng.uniform(0, 1, (100, 2))
    for k in range(4):
        rot = patch.rotate(k)
        ruv = uv.copy()
        for _ in range(k):
            ruv = np.column_stack([1.0 - ruv[:, 1], ruv[:, 0]])
        np.testing.assert_allclose(rot.point(uv), patch.point(ruv), atol=1e-14)


def test_standard_form_edge_two_squares(mp_two):
    e = mp_two.interfaces()[0]
    p1, p2 = standard_form_edge(mp_two, e)
    t = np.linspace(0, 1, 50)
    a = p1.point(np.column_stack([np.zeros_like(t), t]))
    b = p2.point(np.column_stack([t, np.zeros_like(t)]))
    assert np.abs(a - b).max() < 1e-14


def test_standard_form_edge_three_patch(mp_three):
    t = np.linspace(0, 1, 50)
    for e in mp_three.interfaces():
        p1, p2 = standard_form_edge(mp_three, e)
        a = p1.point(np.column_stack([np.zeros_like(t), t]))
        b = p2.point(np.column_stack([t, np.zeros_like(t)]))
        assert np.abs(a - b).max() < 1e-14


def test_standard_form_boundary_edge(mp_single):
    for e in mp_single.edges:
        assert not e.is_interface
        p1, p2 = standard_form_edge(mp_single, e)
        assert p2 is None
        # the edge lies on {xi1 = 0}
        t = np.linspace(0, 1, 20)
        pts = p1.point(np.column_stack([np.zeros_like(t), t]))
        on_boundary = (
            np.abs(pts[:, 0] - 0).max() < 1e-14
            or np.abs(pts[:, 0] - 1).max() < 1e-14
            or np.abs(pts[:, 1] - 0).max() < 1e-14
            or np.abs(pts[:, 1] - 1).max() < 1e-14
        )
        assert on_boundary


def test_standard_form_vertex_grid(mp_grid22):
    interior = [v for v in mp_grid22.vertices if v.is_interior]
    assert len(interior) == 1
    v = interior[0]
    assert v.valence == 4
    rotated = standard_form_vertex(mp_grid22, v)
    assert len(rotated) == 4
    for rp in rotated:
        np.testing.assert_allclose(rp.corner(0), [1.0, 1.0], atol=1e-14)


def test_standard_form_vertex_corner(mp_single):
    for v in mp_single.vertices:
        assert v.valence == 1
        (rp,) = standard_form_vertex(mp_single, v)
        np.testing.assert_allclose(rp.corner(0), mp_single.vertex_point(v), atol=0)


def test_standard_form_vertex_three_patch_cyclic(mp_three):
    v = [v for v in mp_three.vertices if v.is_interior][0]
    rotated = standard_form_vertex(mp_three, v)
    t = np.linspace(0, 1, 50)
    for ell in range(3):
        a = rotated[ell].point(np.column_stack([np.zeros_like(t), t]))
        b = rotated[(ell + 1) % 3].point(np.column_stack([t, np.zeros_like(t)]))
        assert np.abs(a - b).max() < 1e-13


def test_regularity_identity(mp_single):
    assert abs(check_regularity(mp_single.patches[0], 20) - 1.0) < 1e-14


def test_regularity_degenerate_quad(tspace):
    bad = bilinear_patch(tspace, (0, 0), (1, 0), (1, 0), (0, 1))
    assert check_regularity(bad, 20) <= 0.0


def test_regularity_matches_dense_scan(tspace):
    quad = bilinear_patch(tspace, (0, 0), (2, 0), (3, 2), (0, 1))
    got = check_regularity(quad, 200)
    t = np.linspace(0, 1, 200)
    uv = np.stack(np.meshgrid(t, t, indexing="ij"), -1).reshape(-1, 2)
    J = quad.jacobian(uv)
    det = J[:, 0, 0] * J[:, 1, 1] - J[:, 1, 0] * J[:, 0, 1]
    assert abs(got - det.min()) < 1e-10


def test_refine_identity_square(mp_single):
    fine = refine(mp_single, 2)
    rng = np.random.default_rng(1)
    uv = rng.uniform(0, 1, (100, 2))
    np.testing.assert_allclose(
        fine.patches[0].point(uv), mp_single.patches[0].point(uv), atol=1e-12
    )


def test_refine_dimension_growth():
    cfg = SpaceConfig(3, 1, 2)
    sp = UnivariateSpace(3, 1, 2)
    assert sp.N == 6
    assert UnivariateSpace(3, 1, 4).N == 10


def test_refine_three_patch_geometry_invariant(mp_three):
    fine = refine(refine(mp_three, 2), 2)
    rng = np.random.default_rng(2)
    uv = rng.uniform(0, 1, (100, 2))
    for i in range(3):
        np.testing.assert_allclose(
            fine.patches[i].point(uv), mp_three.patches[i].point(uv), atol=1e-12
        )
    for i in range(3):
        coarse_min = check_regularity(mp_three.patches[i], 33)
        fine_min = check_regularity(fine.patches[i], 33)
        assert fine_min >= coarse_min - 1e-10


@pytest.mark.parametrize(
    "fixture,patches,interfaces,bedges,ivertices,bvertices",
    [
        ("mp_two", 2, 1, 6, 0, 6),
        ("mp_three", 3, 3, 6, 1, 6),
        ("mp_five", 5, 5, 10, 1, 10),
        ("mp_lshape", 3, 2, 8, 0, 8),
    ],
)
def test_builtin_topology_counts(
    request, fixture, patches, interfaces, bedges, ivertices, bvertices
):
    mp = request.getfixturevalue(fixture)
    assert len(mp.patches) == patches
    assert mp.n_interfaces == interfaces
    assert len(mp.edges) - mp.n_interfaces == bedges
    assert sum(1 for v in mp.vertices if v.is_interior) == ivertices
    assert sum(1 for v in mp.vertices if not v.is_interior) == bvertices


def test_side_and_corner_bijection(mp_three):
    seen_sides = set()
    for e in mp_three.edges:
        for ps in e.locals:
            assert ps not in seen_sides
            seen_sides.add(ps)
    assert seen_sides == {(i, s) for i in range(3) for s in range(4)}
    seen_corners = set()
    for v in mp_three.vertices:
        for pc in v.corners:
            assert pc not in seen_corners
            seen_corners.add(pc)
    assert seen_corners == {(i, c) for i in range(3) for c in range(4)}


# --- geometry file I/O -------------------------------------------------------


def test_save_load_roundtrip(mp_three, tmp_path):
    path = tmp_path / "geo.txt"
    save_geometry(mp_three, path)
    mp2 = load_geometry(path)
    for a, b in zip(mp_three.patches, mp2.patches):
        np.testing.assert_array_equal(a.net, b.net)
    assert [e.locals for e in mp2.edges] == [e.locals for e in mp_three.edges]
    assert [v.corners for v in mp2.vertices] == [v.corners for v in mp_three.vertices]


def test_load_rejects_missing_patch_reference(mp_two, tmp_path):
    path = tmp_path / "geo.txt"
    save_geometry(mp_two, path)
    text = path.read_text().replace("edge 0 interface 0 ", "edge 0 interface 7 ")
    path.write_text(text)
    with pytest.raises(TopologyError, match="edge 0"):
        load_geometry(path)


def test_load_rejects_nonconforming_interface(mp_two, tmp_path):
    path = tmp_path / "geo.txt"
    save_geometry(mp_two, path)
    lines = path.read_text().splitlines()
    # shift one control point of patch 0 by 1e-3
    idx = next(i for i, ln in enumerate(lines) if ln == "patch 0") + 1
    x, y = lines[idx].split()
    lines[idx] = f"{float(x) + 1e-3:.17g} {y}"
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises((ConformityError, TopologyError), match="1.0"):
        load_geometry(path)


def test_load_rejects_trailing_garbage(mp_two, tmp_path):
    path = tmp_path / "geo.txt"
    save_geometry(mp_two, path)
    path.write_text(path.read_text() + "stray tokens here\n")
    with pytest.raises(GeometryFormatError, match="trailing"):
        load_geometry(path)


def test_duplicate_side_rejected(mp_two):
    edges = list(mp_two.edges) + [EdgeRecord(99, "boundary", [(0, 1)])]
    with pytest.raises(TopologyError):
        MultiPatch(mp_two.config, mp_two.patches, edges, mp_two.vertices, check=False)


def test_vertex_distinct_patches():
    with pytest.raises(TopologyError):
        VertexRecord(0, "interior", [(0, 0), (0, 2)])


def test_vertex_surrounding_edges_conventions(mp_three, mp_lshape):
    from argyris.multipatch import vertex_surrounding_edges

    v = [v for v in mp_three.vertices if v.is_interior][0]
    ring = vertex_surrounding_edges(mp_three, v)
    assert len(ring) == v.valence
    assert all(e.is_interface for e in ring)

    # reentrant corner of the L: three patches, four surrounding edges,
    # boundary edges first and last
    v = next(v for v in mp_lshape.vertices if v.valence == 3)
    ring = vertex_surrounding_edges(mp_lshape, v)
    assert len(ring) == 4
    assert not ring[0].is_interface and not ring[-1].is_interface
    assert ring[1].is_interface and ring[2].is_interface
