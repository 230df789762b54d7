"""Planar multi-patch spline geometry.

A MultiPatch bundles tensor-spline patches with explicit topology records:
edges (interfaces between two patches or boundary edges of one patch) and
vertices (ordered counterclockwise lists of patch corners). Local sides and
corners of a patch are numbered 0..3 counterclockwise starting at the
{xi1 = 0} side and the (0, 0) corner.

The quarter-turn reparametrization r(xi1, xi2) = (1 - xi2, xi1) acts on
coefficient grids as an exact index permutation; rotating a patch k times
moves side k to {xi1 = 0} and corner k to the parametric origin, which is
the standard form used by all interface and vertex constructions.
"""

import numpy as np

from .bspline import TensorSpace, TensorSpline, UnivariateSpace, represent_exactly_2d
from .errors import (
    ConformityError,
    GeometryFormatError,
    InvalidConfigError,
    TopologyError,
)

__all__ = [
    "Patch",
    "EdgeRecord",
    "VertexRecord",
    "MultiPatch",
    "rotate_net",
    "check_regularity",
    "standard_form_edge",
    "standard_form_vertex",
    "refine",
    "save_geometry",
    "load_geometry",
    "infer_topology",
]

#: parametric corner coordinates, indexed by local corner number
CORNER_UV = np.array([(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)])

CONFORMITY_TOL = 1e-12
CONFORMITY_SAMPLES = 50


def rotate_net(net, k):
    """Coefficient grid of (function o r^k) for symmetric uniform knots."""
    out = np.asarray(net)
    for _ in range(k % 4):
        out = out[::-1].swapaxes(0, 1)
    return np.ascontiguousarray(out)


class Patch:
    """Tensor-spline map from [0, 1]^2 into the plane."""

    def __init__(self, space, net):
        net = np.asarray(net, dtype=float)
        if net.shape != space.shape + (2,):
            raise InvalidConfigError(
                f"control net {net.shape} does not match space {space.shape}"
            )
        self.space = space
        self.net = net
        self._spline = TensorSpline(space, net)

    def point(self, uv):
        return self._spline.jet(uv, 0)[:, 0, 0, :]

    def jet(self, uv, nderiv):
        """Map derivatives: D[q, a, b, :] = d^a d^b F / dxi1^a dxi2^b."""
        return self._spline.jet(uv, nderiv)

    def jacobian(self, uv):
        """J[q, :, d] is the column d F / dxi_d."""
        j = self._spline.jet(uv, 1)
        return np.stack([j[:, 1, 0, :], j[:, 0, 1, :]], axis=-1)

    def rotate(self, k):
        """Same point set reparametrized by the k-fold quarter turn."""
        return Patch(self.space, rotate_net(self.net, k))

    def corner(self, k):
        return self.point(CORNER_UV[k : k + 1])[0]


class EdgeRecord:
    """Global edge: an interface (two local sides) or a boundary edge (one)."""

    def __init__(self, eid, kind, locals_):
        locals_ = tuple((int(p), int(s)) for p, s in locals_)
        if kind == "interface":
            if len(locals_) != 2 or locals_[0][0] == locals_[1][0]:
                raise TopologyError(
                    f"edge {eid}: an interface needs two sides on distinct patches"
                )
        elif kind == "boundary":
            if len(locals_) != 1:
                raise TopologyError(f"edge {eid}: a boundary edge has exactly one side")
        else:
            raise TopologyError(f"edge {eid}: unknown kind {kind!r}")
        self.id = eid
        self.kind = kind
        self.locals = locals_

    @property
    def is_interface(self):
        return self.kind == "interface"


class VertexRecord:
    """Global vertex with its counterclockwise (patch, corner) list."""

    def __init__(self, vid, kind, corners):
        if kind not in ("interior", "boundary"):
            raise TopologyError(f"vertex {vid}: unknown kind {kind!r}")
        corners = tuple((int(p), int(c)) for p, c in corners)
        if len({p for p, _ in corners}) != len(corners):
            raise TopologyError(f"vertex {vid}: patches around a vertex must be distinct")
        self.id = vid
        self.kind = kind
        self.corners = corners

    @property
    def valence(self):
        return len(self.corners)

    @property
    def is_interior(self):
        return self.kind == "interior"


class MultiPatch:
    """Patches plus explicit edge/vertex topology over a shared space config."""

    def __init__(self, config, patches, edges, vertices, check=True):
        self.config = config
        self.patches = list(patches)
        self.edges = list(edges)
        self.vertices = list(vertices)
        self.edge_of_side = {}
        for e in self.edges:
            for ps in e.locals:
                if ps in self.edge_of_side:
                    raise TopologyError(f"side {ps} appears in two edges")
                self.edge_of_side[ps] = e
        self.vertex_of_corner = {}
        for v in self.vertices:
            for pc in v.corners:
                if pc in self.vertex_of_corner:
                    raise TopologyError(f"corner {pc} appears in two vertices")
                self.vertex_of_corner[pc] = v
        if check:
            self.validate()

    @property
    def n_interfaces(self):
        return sum(1 for e in self.edges if e.is_interface)

    def validate(self):
        npatch = len(self.patches)
        for e in self.edges:
            for p, s in e.locals:
                if not (0 <= p < npatch and 0 <= s < 4):
                    raise TopologyError(f"edge {e.id} references missing side ({p},{s})")
        for v in self.vertices:
            for p, c in v.corners:
                if not (0 <= p < npatch and 0 <= c < 4):
                    raise TopologyError(
                        f"vertex {v.id} references missing corner ({p},{c})"
                    )
        for p in range(npatch):
            for s in range(4):
                if (p, s) not in self.edge_of_side:
                    raise TopologyError(f"side ({p},{s}) belongs to no edge")
            for c in range(4):
                if (p, c) not in self.vertex_of_corner:
                    raise TopologyError(f"corner ({p},{c}) belongs to no vertex")
        for i, patch in enumerate(self.patches):
            m = 10 * self.config.n + 1
            d = check_regularity(patch, min(m, 101))
            if d <= 0.0:
                raise ConformityError(
                    f"patch {i} is singular or flipped: min Jacobian det {d:.3e}"
                )
        for e in self.edges:
            standard_form_edge(self, e)
        for v in self.vertices:
            standard_form_vertex(self, v)
            vertex_surrounding_edges(self, v)

    def interfaces(self):
        return [e for e in self.edges if e.is_interface]

    def vertex_point(self, v):
        p, c = v.corners[0]
        return self.patches[p].corner(c)


def check_regularity(patch, m):
    """Minimum Jacobian determinant over an m x m uniform sample grid."""
    if m < 2:
        raise InvalidConfigError("need at least a 2 x 2 sample grid")
    t = np.linspace(0.0, 1.0, m)
    uv = np.stack(np.meshgrid(t, t, indexing="ij"), axis=-1).reshape(-1, 2)
    J = patch.jacobian(uv)
    det = J[:, 0, 0] * J[:, 1, 1] - J[:, 1, 0] * J[:, 0, 1]
    return float(det.min())


def _edge_gap(p1, p2, samples=CONFORMITY_SAMPLES):
    t = np.linspace(0.0, 1.0, samples)
    a = p1.point(np.column_stack([np.zeros_like(t), t]))
    b = p2.point(np.column_stack([t, np.zeros_like(t)]))
    return float(np.abs(a - b).max())


def standard_form_edge(mp, edge):
    """Rotate the adjacent patches so the edge satisfies F1(0, t) = F2(t, 0).

    For a boundary edge the single patch is rotated so the edge lies on its
    {xi1 = 0} side and the second entry of the pair is None.
    """
    if edge.is_interface:
        (i1, k1), (i2, k2) = edge.locals
        p1 = mp.patches[i1].rotate(k1)
        p2 = mp.patches[i2].rotate((k2 - 1) % 4)
        gap = _edge_gap(p1, p2)
        if gap > CONFORMITY_TOL:
            raise ConformityError(
                f"edge {edge.id}: interface parametrizations differ by {gap:.3e}"
            )
        return p1, p2
    (i1, k1), = edge.locals
    return mp.patches[i1].rotate(k1), None


def standard_form_vertex(mp, vertex):
    """Rotate the surrounding patches so the vertex sits at (0, 0) in each.

    Returns the counterclockwise list of rotated patches; consecutive ones
    satisfy F_prev(0, t) = F_next(t, 0), cyclically for interior vertices.
    """
    rotated = [mp.patches[p].rotate(c) for p, c in vertex.corners]
    x0 = rotated[0].corner(0)
    for rp in rotated[1:]:
        if np.abs(rp.corner(0) - x0).max() > CONFORMITY_TOL:
            raise TopologyError(
                f"vertex {vertex.id}: listed corners map to different points"
            )
    nu = len(rotated)
    pairs = range(nu) if vertex.is_interior else range(nu - 1)
    for ell in pairs:
        gap = _edge_gap(rotated[ell], rotated[(ell + 1) % nu])
        if gap > CONFORMITY_TOL:
            raise TopologyError(
                f"vertex {vertex.id}: patches {ell} and {(ell + 1) % nu} around the "
                f"vertex are not consecutive in standard form (gap {gap:.3e})"
            )
    if not vertex.is_interior:
        # first patch must start at the boundary and last must end there
        pb, cb = vertex.corners[0]
        pa, ca = vertex.corners[-1]
        if mp.edge_of_side[(pb, (cb + 1) % 4)].is_interface:
            raise TopologyError(
                f"vertex {vertex.id}: boundary vertex list does not start at the boundary"
            )
        if mp.edge_of_side[(pa, ca)].is_interface:
            raise TopologyError(
                f"vertex {vertex.id}: boundary vertex list does not end at the boundary"
            )
    return rotated


def vertex_surrounding_edges(mp, vertex):
    """Global edges around a vertex, in the counterclockwise odd-slot order.

    For patch valence nu the list has nu+1 entries for a boundary vertex
    (first and last are boundary edges) and nu entries for an interior one
    (edge ell sits between patches ell-1 and ell, cyclically).
    """
    out = []
    if not vertex.is_interior:
        p0, c0 = vertex.corners[0]
        out.append(mp.edge_of_side[(p0, (c0 + 1) % 4)])
    for p, c in vertex.corners:
        out.append(mp.edge_of_side[(p, c)])
    if vertex.is_interior:
        first = mp.edge_of_side[(vertex.corners[0][0], (vertex.corners[0][1] + 1) % 4)]
        if out[-1] is not first:
            raise TopologyError(f"vertex {vertex.id}: edge cycle does not close")
    return out


def refine(mp, factor):
    """Nested refinement: same geometry represented on a factor-times finer mesh."""
    if factor < 2:
        raise InvalidConfigError("refinement factor must be >= 2")
    cfg = mp.config
    new_cfg = type(cfg)(cfg.p, cfg.r, cfg.n * factor)
    u1 = UnivariateSpace(new_cfg.p, new_cfg.r, new_cfg.n)
    tspace = TensorSpace(u1)
    patches = []
    for patch in mp.patches:
        def sample(u, v, _p=patch):
            uu, vv = np.broadcast_arrays(u, v)
            pts = np.column_stack([uu.ravel(), vv.ravel()])
            return _p.point(pts).reshape(uu.shape + (2,))

        net = represent_exactly_2d(tspace, sample)
        patches.append(Patch(tspace, net))
    return MultiPatch(new_cfg, patches, mp.edges, mp.vertices, check=False)


def _order_corners(corner_set, edge_of_side):
    """Counterclockwise ordering of the patch corners around one vertex.

    Returns (kind, ordered list). Walking from a corner (p, c), the next
    patch counterclockwise is found across the edge on side c of p; the
    walk starts at the boundary for boundary vertices.
    """
    corner_set = set(corner_set)
    start = None
    for p, c in sorted(corner_set):
        if not edge_of_side[(p, (c + 1) % 4)].is_interface:
            start = (p, c)
            break
    kind = "boundary" if start is not None else "interior"
    if start is None:
        start = min(corner_set)
    order = []
    cur = start
    while True:
        order.append(cur)
        e = edge_of_side[cur]
        if not e.is_interface:
            break
        (pa, sa), (pb, sb) = e.locals
        np_, ns = (pb, sb) if (pa, sa) == cur else (pa, sa)
        nxt = (np_, (ns - 1) % 4)
        if nxt == start:
            break
        if nxt not in corner_set or len(order) > len(corner_set):
            raise TopologyError(f"cannot order corners {sorted(corner_set)} around vertex")
        cur = nxt
    if set(order) != corner_set:
        raise TopologyError(f"corner walk {order} does not cover {sorted(corner_set)}")
    return kind, order


def infer_topology(config, patches, tol=1e-12):
    """Build edge and vertex records from coincident control points.

    Convenience for geometries authored without explicit topology; the
    result is validated like any other MultiPatch.
    """
    def side_points(net, s):
        if s == 0:
            return net[0, :, :]
        if s == 1:
            return net[:, 0, :]
        if s == 2:
            return net[-1, :, :]
        return net[:, -1, :]

    sides = {}
    for i, patch in enumerate(patches):
        for s in range(4):
            sides[(i, s)] = side_points(patch.net, s)
    unmatched = set(sides)
    edges = []
    for a in sorted(sides):
        if a not in unmatched:
            continue
        mate = None
        for b in sorted(unmatched - {a}):
            if b[0] == a[0]:
                continue
            pa, pb = sides[a], sides[b]
            if pa.shape == pb.shape and (
                np.abs(pa - pb).max() <= tol or np.abs(pa - pb[::-1]).max() <= tol
            ):
                mate = b
                break
        if mate is None:
            edges.append(EdgeRecord(len(edges), "boundary", [a]))
            unmatched.discard(a)
        else:
            edges.append(EdgeRecord(len(edges), "interface", [a, mate]))
            unmatched.discard(a)
            unmatched.discard(mate)
    edge_of_side = {}
    for e in edges:
        for ps in e.locals:
            edge_of_side[ps] = e

    corners = {}
    for i, patch in enumerate(patches):
        for c in range(4):
            corners[(i, c)] = patch.corner(c)
    groups = []
    for key in sorted(corners):
        for g in groups:
            if np.abs(corners[key] - corners[g[0]]).max() <= tol:
                g.append(key)
                break
        else:
            groups.append([key])
    vertices = []
    for g in groups:
        kind, order = _order_corners(g, edge_of_side)
        vertices.append(VertexRecord(len(vertices), kind, order))
    return MultiPatch(config, patches, edges, vertices)


# ----------------------------------------------------------------------------
# geometry file I/O (format documented in docs/formats.md)
# ----------------------------------------------------------------------------

FORMAT_HEADER = "argyris-geometry"
FORMAT_VERSION = 1


def save_geometry(mp, path):
    cfg = mp.config
    N = mp.patches[0].space.shape[0] if mp.patches else 0
    lines = [f"{FORMAT_HEADER} {FORMAT_VERSION}"]
    lines.append(f"p {cfg.p}")
    lines.append(f"r {cfg.r}")
    lines.append(f"n {cfg.n}")
    lines.append(f"patches {len(mp.patches)}")
    for i, patch in enumerate(mp.patches):
        lines.append(f"patch {i}")
        for j2 in range(N):
            for j1 in range(N):
                x, y = patch.net[j1, j2]
                lines.append(f"{x:.17g} {y:.17g}")
    lines.append(f"edges {len(mp.edges)}")
    for e in mp.edges:
        flat = " ".join(f"{p} {s}" for p, s in e.locals)
        lines.append(f"edge {e.id} {e.kind} {flat}")
    lines.append(f"vertices {len(mp.vertices)}")
    for v in mp.vertices:
        flat = " ".join(f"{p} {c}" for p, c in v.corners)
        lines.append(f"vertex {v.id} {v.kind} {flat}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def load_geometry(path, config_cls=None):
    from .bspline import SpaceConfig

    config_cls = config_cls or SpaceConfig
    with open(path, encoding="utf-8") as fh:
        raw = fh.readlines()
    lines = [ln.strip() for ln in raw]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    pos = 0

    def take():
        nonlocal pos
        if pos >= len(lines):
            raise GeometryFormatError(f"{path}: unexpected end of file")
        ln = lines[pos]
        pos += 1
        return ln

    def take_kv(key, cast=int):
        ln = take().split()
        if len(ln) != 2 or ln[0] != key:
            raise GeometryFormatError(f"{path}: expected '{key} <value>', got {ln!r}")
        try:
            return cast(ln[1])
        except ValueError as exc:
            raise GeometryFormatError(f"{path}: bad value for {key}: {ln[1]!r}") from exc

    head = take().split()
    if head[:1] != [FORMAT_HEADER] or len(head) != 2 or head[1] != str(FORMAT_VERSION):
        raise GeometryFormatError(f"{path}: not a version-{FORMAT_VERSION} geometry file")
    p = take_kv("p")
    r = take_kv("r")
    n = take_kv("n")
    cfg = config_cls(p, r, n)
    u1 = UnivariateSpace(p, r, n)
    tspace = TensorSpace(u1)
    N = u1.N

    npatch = take_kv("patches")
    patches = []
    for i in range(npatch):
        hdr = take().split()
        if hdr != ["patch", str(i)]:
            raise GeometryFormatError(f"{path}: expected 'patch {i}', got {hdr!r}")
        net = np.empty((N, N, 2))
        for j2 in range(N):
            for j1 in range(N):
                tok = take().split()
                if len(tok) != 2:
                    raise GeometryFormatError(
                        f"{path}: control point of patch {i} needs two coordinates"
                    )
                try:
                    net[j1, j2] = [float(tok[0]), float(tok[1])]
                except ValueError as exc:
                    raise GeometryFormatError(
                        f"{path}: bad coordinate in patch {i}: {tok!r}"
                    ) from exc
        patches.append(Patch(tspace, net))

    nedges = take_kv("edges")
    edges = []
    for _ in range(nedges):
        tok = take().split()
        if len(tok) < 4 or tok[0] != "edge":
            raise GeometryFormatError(f"{path}: malformed edge line {tok!r}")
        eid, kind = int(tok[1]), tok[2]
        nums = tok[3:]
        if len(nums) % 2:
            raise GeometryFormatError(f"{path}: edge {eid} has dangling index")
        locals_ = [(int(nums[k]), int(nums[k + 1])) for k in range(0, len(nums), 2)]
        edges.append(EdgeRecord(eid, kind, locals_))

    nverts = take_kv("vertices")
    vertices = []
    for _ in range(nverts):
        tok = take().split()
        if len(tok) < 4 or tok[0] != "vertex":
            raise GeometryFormatError(f"{path}: malformed vertex line {tok!r}")
        vid, kind = int(tok[1]), tok[2]
        nums = tok[3:]
        if len(nums) % 2:
            raise GeometryFormatError(f"{path}: vertex {vid} has dangling index")
        corners = [(int(nums[k]), int(nums[k + 1])) for k in range(0, len(nums), 2)]
        vertices.append(VertexRecord(vid, kind, corners))

    if pos != len(lines):
        raise GeometryFormatError(
            f"{path}: trailing garbage starting at {lines[pos]!r}"
        )
    return MultiPatch(cfg, patches, edges, vertices)
