"""Dual functionals for the three basis families and the global projector.

Each basis function owns one functional: patch-interior functions pair with
tensor products of univariate local-interpolation duals applied to the
pullback; edge trace functions pair with S+ duals of the edge trace; edge
derivative functions pair with S- duals of the scaled transversal derivative
(h/p) grad(phi) . d along the edge; vertex functions pair with scaled point
derivatives at the vertex. Summing coefficient-times-basis over all
functionals yields the global projector, which reproduces every member of
the space.
"""

import numpy as np

from .bspline import dual_functional_weights
from .errors import InvalidConfigError
from .gluing import transversal_vector
from .multipatch import CORNER_UV
from .space import physical_derivatives

__all__ = [
    "AnalyticField",
    "SpaceField",
    "BasisField",
    "patch_dual",
    "edge_dual",
    "vertex_dual",
    "project",
    "biorthogonality_matrix",
]


def rotate_uv(uv, k):
    """Apply the quarter-turn map k times to parametric points."""
    uv = np.atleast_2d(np.asarray(uv, dtype=float))
    for _ in range(k % 4):
        uv = np.column_stack([1.0 - uv[:, 1], uv[:, 0]])
    return uv


class AnalyticField:
    """Scalar field given by physical-coordinate callables.

    ``grad`` and ``hess`` may be omitted when only values are consumed
    (plain L2 fitting); the projector needs all three.
    """

    def __init__(self, geometry, value, grad=None, hess=None):
        self.geometry = geometry
        self._value = value
        self._grad = grad
        self._hess = hess

    def values(self, patch, uv):
        x = self.geometry.patches[patch].point(uv)
        return np.asarray(self._value(x), dtype=float)

    def gradients(self, patch, uv):
        if self._grad is None:
            raise InvalidConfigError("field has no gradient sampler")
        x = self.geometry.patches[patch].point(uv)
        return np.asarray(self._grad(x), dtype=float)

    def hessians(self, patch, uv):
        if self._hess is None:
            raise InvalidConfigError("field has no Hessian sampler")
        x = self.geometry.patches[patch].point(uv)
        return np.asarray(self._hess(x), dtype=float)


class _PatchwiseField:
    """Shared jet machinery for fields defined by per-patch coefficient grids."""

    def __init__(self, space):
        self.space = space
        self.geometry = space.geometry

    def _grid(self, patch):
        raise NotImplementedError

    def _jets(self, patch, uv, order):
        from .bspline import TensorSpace, TensorSpline

        grid = self._grid(patch)
        fj = TensorSpline(TensorSpace(self.space.usp), grid).jet(uv, order)
        gj = self.geometry.patches[patch].jet(uv, order)
        return fj, gj

    def values(self, patch, uv):
        fj, _ = self._jets(patch, np.atleast_2d(uv), 0)
        return fj[:, 0, 0]

    def gradients(self, patch, uv):
        fj, gj = self._jets(patch, np.atleast_2d(uv), 1)
        pad_f = np.zeros(fj.shape[:1] + (3, 3))
        pad_f[:, :2, :2] = fj
        pad_g = np.zeros(gj.shape[:1] + (3, 3, 2))
        pad_g[:, :2, :2, :] = gj
        _, grad, _ = physical_derivatives(pad_g, pad_f)
        return grad

    def hessians(self, patch, uv):
        fj, gj = self._jets(patch, np.atleast_2d(uv), 2)
        _, _, hess = physical_derivatives(gj, fj)
        return hess


class SpaceField(_PatchwiseField):
    """Member of the space given by a coefficient vector."""

    def __init__(self, space, coeffs):
        super().__init__(space)
        self.coeffs = np.asarray(coeffs, dtype=float)
        self._cache = {}

    def _grid(self, patch):
        if patch not in self._cache:
            self._cache[patch] = self.space.combine(self.coeffs, patch)
        return self._cache[patch]


class BasisField(_PatchwiseField):
    """A single basis function viewed as a field."""

    def __init__(self, space, a):
        super().__init__(space)
        self.a = a

    def _grid(self, patch):
        return self.space.functions[self.a].dense_grid(self.space.shape, patch)


def patch_dual(space, patch, j, field):
    """Tensor-product local dual of the pullback onto one patch."""
    j1, j2 = j
    pts1, w1 = dual_functional_weights(space.usp, j1)
    pts2, w2 = dual_functional_weights(space.usp, j2)
    uv = np.column_stack(
        [np.repeat(pts1, len(pts2)), np.tile(pts2, len(pts1))]
    )
    vals = field.values(patch, uv).reshape(len(pts1), len(pts2))
    return float(w1 @ vals @ w2)


def edge_dual(space, eid, index, field):
    """Edge functional: S+ dual of the trace, or S- dual of the scaled
    transversal derivative, both sampled from the first standard-form patch."""
    j, s = index
    asm = space.edge_assembly[eid]
    ipatch, rot = asm.side1
    if s == 0:
        pts, w = dual_functional_weights(space.splus, j)
        uv = rotate_uv(np.column_stack([np.zeros_like(pts), pts]), rot)
        return float(w @ field.values(ipatch, uv))
    pts, w = dual_functional_weights(space.sminus, j)
    uv = rotate_uv(np.column_stack([np.zeros_like(pts), pts]), rot)
    d, _ = transversal_vector(asm.gluing, asm.P1, pts)
    grads = field.gradients(ipatch, uv)
    hp = space.config.h / space.config.p
    return float(w @ (hp * np.einsum("mi,mi->m", grads, d)))


def vertex_dual(space, vid, j, field):
    """Scaled point derivative at the vertex: d^j phi(x) / sigma^|j|."""
    j1, j2 = j
    asm = space.vertex_assembly[vid]
    ipatch, corner = asm.vertex.corners[0]
    uv = CORNER_UV[corner : corner + 1]
    order = j1 + j2
    if order == 0:
        val = field.values(ipatch, uv)[0]
    elif order == 1:
        g = field.gradients(ipatch, uv)[0]
        val = g[0] if j1 else g[1]
    else:
        H = field.hessians(ipatch, uv)[0]
        val = H[0, 0] if j1 == 2 else (H[1, 1] if j2 == 2 else H[0, 1])
    return float(val / asm.sigma**order)


def dual_apply(space, a, field):
    """Apply the functional paired with basis function a."""
    fid = space.functions[a].id
    if fid.kind == "patch":
        return patch_dual(space, fid.owner, fid.index, field)
    if fid.kind == "edge":
        return edge_dual(space, fid.owner, fid.index, field)
    return vertex_dual(space, fid.owner, fid.index, field)


def project(space, field):
    """Global projector: coefficient a is functional a applied to the field.

    Reproduces members of the space; for general C2 fields it is a local
    quasi-interpolant.
    """
    return np.array([dual_apply(space, a, field) for a in range(space.dim)])


def _dual_patches(space, a):
    """Patches a functional samples on (for support pruning)."""
    fid = space.functions[a].id
    if fid.kind == "patch":
        return {fid.owner}
    if fid.kind == "edge":
        return {space.edge_assembly[fid.owner].side1[0]}
    return {space.vertex_assembly[fid.owner].vertex.corners[0][0]}


def biorthogonality_matrix(space):
    """Matrix of all functionals applied to all basis functions.

    Equals the identity when the families are mutually biorthogonal; pairs
    whose supports cannot meet are skipped as exact zeros.
    """
    dim = space.dim
    M = np.zeros((dim, dim))
    for a in range(dim):
        patches = _dual_patches(space, a)
        for b in range(dim):
            if not patches & space.functions[b].blocks.keys():
                continue
            M[a, b] = dual_apply(space, a, BasisField(space, b))
    return M
