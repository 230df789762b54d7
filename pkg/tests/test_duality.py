import numpy as np

from argyris import (
    AnalyticField,
    BasisField,
    SpaceField,
    edge_dual,
    patch_dual,
    project,
    vertex_dual,
)


def ids_where(space, pred):
    return [a for a, fn in enumerate(space.functions) if pred(fn.id)]


def test_patch_dual_biorthogonal_on_own_family(sp_two):
    patch_ids = ids_where(sp_two, lambda i: i.kind == "patch" and i.owner == 0)
    for a in patch_ids[:6]:
        fid = sp_two.functions[a].id
        for b in patch_ids[:6]:
            val = patch_dual(sp_two, 0, fid.index, BasisField(sp_two, b))
            assert abs(val - (1.0 if a == b else 0.0)) < 1e-12


def test_patch_dual_kills_edge_and_vertex_functions(sp_two):
    others = ids_where(sp_two, lambda i: i.kind != "patch")
    fid = sp_two.functions[ids_where(sp_two, lambda i: i.kind == "patch")[0]].id
    for b in others:
        if fid.owner not in sp_two.functions[b].blocks:
            continue
        assert abs(patch_dual(sp_two, fid.owner, fid.index, BasisField(sp_two, b))) < 1e-11


def test_patch_dual_of_zero(sp_two):
    zero = SpaceField(sp_two, np.zeros(sp_two.dim))
    fid = sp_two.functions[0].id
    assert patch_dual(sp_two, fid.owner, fid.index, zero) == 0.0


def test_edge_dual_biorthogonal_within_edge(sp_two):
    eid = sp_two.geometry.interfaces()[0].id
    edge_ids = ids_where(sp_two, lambda i: i.kind == "edge" and i.owner == eid)
    for a in edge_ids:
        fa = sp_two.functions[a].id
        for b in edge_ids:
            val = edge_dual(sp_two, eid, fa.index, BasisField(sp_two, b))
            assert abs(val - (1.0 if a == b else 0.0)) < 1e-10


def test_edge_dual_kills_patch_interior(sp_two):
    eid = sp_two.geometry.interfaces()[0].id
    fa = sp_two.functions[
        ids_where(sp_two, lambda i: i.kind == "edge" and i.owner == eid)[0]
    ].id
    for b in ids_where(sp_two, lambda i: i.kind == "patch")[:10]:
        assert abs(edge_dual(sp_two, eid, fa.index, BasisField(sp_two, b))) < 1e-12


def test_edge_dual_kills_endpoint_vertex_functions(sp_two):
    eid = sp_two.geometry.interfaces()[0].id
    edge_ids = ids_where(sp_two, lambda i: i.kind == "edge" and i.owner == eid)
    vertex_ids = ids_where(sp_two, lambda i: i.kind == "vertex")
    for a in edge_ids:
        fa = sp_two.functions[a].id
        for b in vertex_ids:
            val = edge_dual(sp_two, eid, fa.index, BasisField(sp_two, b))
            assert abs(val) < 1e-10


def test_vertex_dual_delta(sp_two):
    for v in sp_two.geometry.vertices:
        vids = ids_where(sp_two, lambda i: i.kind == "vertex" and i.owner == v.id)
        for a in vids:
            fa = sp_two.functions[a].id
            for b in vids:
                val = vertex_dual(sp_two, v.id, fa.index, BasisField(sp_two, b))
                assert abs(val - (1.0 if a == b else 0.0)) < 1e-9


def test_vertex_dual_kills_edge_interior(sp_two):
    v = sp_two.geometry.vertices[0]
    fa = sp_two.functions[
        ids_where(sp_two, lambda i: i.kind == "vertex" and i.owner == v.id)[0]
    ].id
    for b in ids_where(sp_two, lambda i: i.kind == "edge"):
        assert abs(vertex_dual(sp_two, v.id, fa.index, BasisField(sp_two, b))) < 1e-10


def test_vertex_dual_of_linear_coordinate(sp_two):
    mp = sp_two.geometry
    fld = AnalyticField(
        mp,
        lambda x: x[:, 0],
        lambda x: np.column_stack([np.ones(len(x)), np.zeros(len(x))]),
        lambda x: np.zeros((len(x), 2, 2)),
    )
    v = mp.vertices[0]
    sig = sp_two.sigma(v.id)
    got = vertex_dual(sp_two, v.id, (1, 0), fld)
    assert abs(got - 1.0 / sig) < 1e-13


def test_project_zero_is_zero(sp_two):
    mp = sp_two.geometry
    zero = AnalyticField(
        mp,
        lambda x: np.zeros(len(x)),
        lambda x: np.zeros((len(x), 2)),
        lambda x: np.zeros((len(x), 2, 2)),
    )
    c = project(sp_two, zero)
    assert np.abs(c).max() == 0.0


def test_project_reproduces_random_member(sp_two):
    rng = np.random.default_rng(11)
    c = rng.normal(size=sp_two.dim)
    c2 = project(sp_two, SpaceField(sp_two, c))
    assert np.abs(c - c2).max() < 1e-9 * max(1.0, np.abs(c).max())


def test_project_reproduces_single_basis_functions(sp_two):
    rng = np.random.default_rng(12)
    picks = rng.choice(sp_two.dim, size=12, replace=False)
    for b in picks:
        c = project(sp_two, BasisField(sp_two, int(b)))
        e = np.zeros(sp_two.dim)
        e[b] = 1.0
        assert np.abs(c - e).max() < 1e-9
