"""Construction of the C1 smooth space over an AS-G1 multi-patch domain.

The space splits into three families, each stored as exact per-patch
tensor-spline coefficient blocks:

* patch-interior functions: single B-splines with two vanishing coefficient
  layers on every side of their patch;
* edge functions: built on the trace space S+ (degree p, smoothness r+1) and
  the transversal-derivative space S- (degree p-1, smoothness r), coupled
  across an interface through its linear gluing data;
* vertex functions: six per vertex, produced by an alternating sum of local
  Hermite projectors that interpolates value, gradient and Hessian at the
  vertex from every surrounding patch.

All products entering the pullbacks (alpha times an S- spline, beta times a
derivative of an S+ spline) are degree p piecewise polynomials of smoothness
r, so the coefficient blocks are exact up to rounding.
"""

from dataclasses import dataclass

import numpy as np

from .bspline import TensorSpline, UnivariateSpace, TensorSpace, \
    derived_edge_spaces, represent_exactly
from .errors import ArgyrisError, InvalidConfigError
from .gluing import boundary_gluing, fit_asg1, transversal_vector
from .multipatch import rotate_net, standard_form_vertex

__all__ = [
    "BasisId",
    "Block",
    "C2Data",
    "ArgyrisFunction",
    "ArgyrisSpace",
    "space_dimension",
    "VERTEX_INDEX_ORDER",
]

#: enumeration order of the six per-vertex monomial slots (j1, j2), |j| <= 2
VERTEX_INDEX_ORDER = ((0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2))


@dataclass(frozen=True)
class BasisId:
    """Address of a basis function: family, owning entity, local index."""

    kind: str  # 'patch' | 'edge' | 'vertex'
    owner: int
    index: tuple


@dataclass
class C2Data:
    """Value, gradient and (symmetric) Hessian of a function at one point."""

    value: float
    grad: np.ndarray
    hess: np.ndarray

    def __post_init__(self):
        self.grad = np.asarray(self.grad, dtype=float).reshape(2)
        self.hess = np.asarray(self.hess, dtype=float).reshape(2, 2)
        if abs(self.hess[0, 1] - self.hess[1, 0]) > 1e-12 * (
            1.0 + np.abs(self.hess).max()
        ):
            raise InvalidConfigError("Hessian data must be symmetric")

    @property
    def is_zero(self):
        return self.value == 0.0 and not self.grad.any() and not self.hess.any()


class Block:
    """Dense sub-grid with offsets inside an (N, N) coefficient grid."""

    __slots__ = ("r0", "c0", "data")

    def __init__(self, r0, c0, data):
        self.r0 = r0
        self.c0 = c0
        self.data = np.ascontiguousarray(data, dtype=float)

    @classmethod
    def from_dense(cls, grid):
        rows = np.nonzero(grid.any(axis=1))[0]
        cols = np.nonzero(grid.any(axis=0))[0]
        if len(rows) == 0:
            return None
        r0, r1 = rows[0], rows[-1] + 1
        c0, c1 = cols[0], cols[-1] + 1
        return cls(r0, c0, grid[r0:r1, c0:c1].copy())

    @property
    def shape(self):
        return self.data.shape

    def add_to(self, grid, factor=1.0):
        h, w = self.data.shape
        grid[self.r0 : self.r0 + h, self.c0 : self.c0 + w] += factor * self.data

    def window(self, a, b, size):
        """Dense (size, size) window of the full grid at rows a.., cols b.. ."""
        out = np.zeros((size, size))
        h, w = self.data.shape
        r0 = max(a, self.r0)
        r1 = min(a + size, self.r0 + h)
        c0 = max(b, self.c0)
        c1 = min(b + size, self.c0 + w)
        if r0 < r1 and c0 < c1:
            out[r0 - a : r1 - a, c0 - b : c1 - b] = self.data[
                r0 - self.r0 : r1 - self.r0, c0 - self.c0 : c1 - self.c0
            ]
        return out


class ArgyrisFunction:
    """One basis function, stored patch-wise as coefficient blocks.

    Patches absent from ``blocks`` carry the zero function.
    """

    def __init__(self, fid, blocks):
        self.id = fid
        self.blocks = {i: b for i, b in blocks.items() if b is not None}

    def dense_grid(self, shape, patch):
        grid = np.zeros(shape)
        blk = self.blocks.get(patch)
        if blk is not None:
            blk.add_to(grid)
        return grid


def space_dimension(mp, config=None):
    """Dimension and per-family breakdown, from topology counts alone.

    ``mp`` may be a MultiPatch or a bare (patches, edges, vertices) count
    triple; the latter needs an explicit config.
    """
    if isinstance(mp, tuple):
        n_patches, n_edges, n_vertices = mp
        if config is None:
            raise InvalidConfigError("count triples need an explicit config")
    else:
        n_patches = len(mp.patches)
        n_edges = len(mp.edges)
        n_vertices = len(mp.vertices)
        config = config or mp.config
    config.check_argyris()
    p, r, n = config.p, config.r, config.n
    N = (p - r) * (n - 1) + p + 1
    Nm = (p - r - 1) * (n - 1) + p
    per_patch = (N - 4) ** 2
    per_edge = 2 * Nm - 9
    counts = {
        "patch": n_patches * per_patch,
        "edge": n_edges * per_edge,
        "vertex": n_vertices * 6,
    }
    return sum(counts.values()), counts


def _edge_index_set(Nm):
    """Interior edge indices: (j1, 0) traces and (j1, 1) derivatives."""
    trace = [(j, 0) for j in range(3, Nm - 2)]
    deriv = [(j, 1) for j in range(2, Nm - 2)]
    return trace + deriv


class _EdgeAssembly:
    """Standard-form data of one edge, kept for dual functionals."""

    __slots__ = ("edge", "side1", "side2", "P1", "P2", "gluing")

    def __init__(self, edge, side1, side2, P1, P2, gluing):
        self.edge = edge
        self.side1 = side1  # (patch index, rotation applied)
        self.side2 = side2
        self.P1 = P1
        self.P2 = P2
        self.gluing = gluing


class _VertexAssembly:
    """Standard-form data of one vertex: rotated patches and edge slots."""

    __slots__ = ("vertex", "rotated", "sigma", "point", "slots")

    def __init__(self, vertex, rotated, sigma, point, slots):
        self.vertex = vertex
        self.rotated = rotated
        self.sigma = sigma
        self.point = point
        self.slots = slots


class _EdgeSlot:
    """One edge around a vertex: tangent/transversal data at the vertex and
    the gluing polynomials seen from the patches before (role 1) and after
    (role 2) the edge in counterclockwise order."""

    __slots__ = ("t0", "t0p", "d0", "d0p", "a1", "b1", "a2", "b2")

    def __init__(self, t0, t0p, d0, d0p, a1, b1, a2, b2):
        self.t0 = t0
        self.t0p = t0p
        self.d0 = d0
        self.d0p = d0p
        self.a1 = a1  # alpha/beta monomial coeffs per role; None when absent
        self.b1 = b1
        self.a2 = a2
        self.b2 = b2


class ArgyrisSpace:
    """The assembled smooth space over a validated multi-patch geometry."""

    def __init__(self, geometry, tol=1e-9):
        cfg = geometry.config
        cfg.check_argyris()
        self.geometry = geometry
        self.config = cfg
        self.tol = tol
        p, r, n = cfg.p, cfg.r, cfg.n
        self.usp = UnivariateSpace(p, r, n)
        self.splus, self.sminus = derived_edge_spaces(self.usp)
        self.N = self.usp.N
        self.shape = (self.N, self.N)

        # S+ basis and its derivative, re-expressed in S^{p,r} and S-
        def plus_vals(pts, d=0):
            first, ders = self.splus.basis_ders(pts, d)
            out = np.zeros((len(pts), self.splus.N))
            cols = first[:, None] + np.arange(p + 1)[None, :]
            np.put_along_axis(out, cols, ders[:, d, :], axis=1)
            return out

        self._rep_plus = represent_exactly(self.usp, plus_vals)  # (N, N+)
        self._der_plus = represent_exactly(
            self.sminus, lambda x: plus_vals(x, 1)
        )  # (N-, N+)

        # corner Hermite matrix: [f(0); f'(0)] = M @ (first two coefficients)
        _, ders = self.usp.basis_ders(np.array([0.0]), 1)
        self._corner_inv = np.linalg.inv(ders[0][:2, :2])
        # endpoint bases of S+ (order 2) and S- (order 1)
        _, dp = self.splus.basis_ders(np.array([0.0]), 2)
        self._aplus = np.linalg.inv(dp[0][:3, :3])
        _, dm = self.sminus.basis_ders(np.array([0.0]), 1)
        self._aminus = np.linalg.inv(dm[0][:2, :2])

        self.functions = []
        self.index_of = {}
        self.edge_assembly = {}
        self.vertex_assembly = {}
        self._build()
        self.patch_support = [[] for _ in geometry.patches]
        for a, fn in enumerate(self.functions):
            for i, blk in fn.blocks.items():
                self.patch_support[i].append((a, blk))

        expected, breakdown = space_dimension(geometry, cfg)
        self.breakdown = breakdown
        if expected != len(self.functions):
            raise ArgyrisError(
                f"dimension bookkeeping broke: formula gives {expected}, "
                f"enumeration gives {len(self.functions)}"
            )

    # ------------------------------------------------------------------
    # construction
    # ------------------------------------------------------------------

    def _add(self, fn):
        self.index_of[fn.id] = len(self.functions)
        self.functions.append(fn)

    def _build(self):
        mp = self.geometry
        for i in range(len(mp.patches)):
            for fn in self.build_patch_interior(i):
                self._add(fn)
        for e in mp.edges:
            for fn in self.build_edge_functions(e.id):
                self._add(fn)
        for v in mp.vertices:
            for fn in self.build_vertex_functions(v.id):
                self._add(fn)

    def build_patch_interior(self, i):
        """Unit-coefficient B-splines with indices in {2..N-3}^2."""
        N = self.N
        out = []
        one = np.ones((1, 1))
        for j1 in range(2, N - 3 + 1):
            for j2 in range(2, N - 3 + 1):
                fid = BasisId("patch", i, (j1, j2))
                out.append(ArgyrisFunction(fid, {i: Block(j1, j2, one)}))
        return out

    def _edge_assembly_for(self, eid):
        mp = self.geometry
        edge = mp.edges[eid]
        if edge.is_interface:
            (i1, k1), (i2, k2) = edge.locals
            P1 = mp.patches[i1].rotate(k1)
            P2 = mp.patches[i2].rotate((k2 - 1) % 4)
            g = fit_asg1(P1, P2, tol=self.tol)
            return _EdgeAssembly(edge, (i1, k1), (i2, (k2 - 1) % 4), P1, P2, g)
        (i1, k1), = edge.locals
        P1 = mp.patches[i1].rotate(k1)
        return _EdgeAssembly(edge, (i1, k1), None, P1, None, boundary_gluing(P1))

    def _mult_rep(self, sminus_coeffs, lin):
        """Coefficients in S^{p,r} of (lin[0] + lin[1]*x) times an S- spline.

        Accepts a matrix of splines (one per column)."""
        sm = self.sminus

        def vals(pts):
            first, ders = sm.basis_ders(pts, 0)
            cols = first[:, None] + np.arange(sm.p + 1)[None, :]
            coefs = sminus_coeffs[cols]  # (m, p, ...) windows
            base = np.einsum("mi,mi...->m...", ders[:, 0, :], coefs)
            lfac = lin[0] + lin[1] * pts
            return base * (lfac if base.ndim == 1 else lfac[:, None])

        return represent_exactly(self.usp, vals)

    def _edge_side_blocks(self, gl, role):
        """Coefficient layers of all edge basis functions on one side.

        Returns (U0, U1, W): U0/U1 are (N, N+) with column j the S^{p,r}
        coefficients of b+_j and of beta*(b+_j)', W is (N, N-) with column j
        the coefficients of alpha*b-_j.
        """
        if role == 1:
            alpha = np.asarray(gl.alpha1)
            beta = np.asarray(gl.beta1)
        else:
            alpha = np.asarray(gl.alpha2)
            beta = np.asarray(gl.beta2)
        U0 = self._rep_plus
        U1 = self._mult_rep(self._der_plus, beta)
        W = self._mult_rep(np.eye(self.sminus.N), alpha)
        return U0, U1, W

    def build_edge_functions(self, eid):
        """Edge basis: traces from S+ and transversal derivatives from S-.

        On the first standard-form patch the pullback occupies the first two
        coefficient layers next to the edge,

            b+_j(xi2) (b0 + b1)(xi1) - beta1(xi2) (b+_j)'(xi2) (h/p) b1(xi1)

        for the trace family and alpha1(xi2) b-_j(xi2) b1(xi1) for the
        derivative family; the second patch carries the mirrored form with
        -alpha2. Boundary edges use the first form with alpha = 1, beta = 0.
        """
        asm = self._edge_assembly_for(eid)
        self.edge_assembly[eid] = asm
        N = self.N
        hp = self.config.h / self.config.p
        idx = _edge_index_set(self.sminus.N)

        sides = [(asm.side1, 1)]
        if asm.side2 is not None:
            sides.append((asm.side2, 2))
        layers = {role: self._edge_side_blocks(asm.gluing, role) for _, role in sides}

        out = []
        for j, s in idx:
            fid = BasisId("edge", eid, (j, s))
            blocks = {}
            for (ipatch, rot), role in sides:
                U0, U1, W = layers[role]
                grid = np.zeros((N, N))
                if s == 0:
                    u0 = U0[:, j]
                    u1 = U1[:, j]
                    if role == 1:
                        grid[0, :] = u0
                        grid[1, :] = u0 - hp * u1
                    else:
                        grid[:, 0] = u0
                        grid[:, 1] = u0 - hp * u1
                else:
                    w = W[:, j]
                    if role == 1:
                        grid[1, :] = w
                    else:
                        grid[:, 1] = -w
                blocks[ipatch] = Block.from_dense(rotate_net(grid, (4 - rot) % 4))
            out.append(ArgyrisFunction(fid, blocks))
        return out

    def _vertex_assembly_for(self, vid):
        mp = self.geometry
        vertex = mp.vertices[vid]
        rotated = standard_form_vertex(mp, vertex)
        nu = vertex.valence
        h, p = self.config.h, self.config.p

        grads = [P.jacobian(np.zeros((1, 2)))[0] for P in rotated]
        sigma = 1.0 / (h / (p * nu) * sum(np.linalg.norm(g) for g in grads))
        point = rotated[0].corner(0)

        slots = []
        nslots = nu if vertex.is_interior else nu + 1
        for ell in range(nslots):
            if vertex.is_interior or 0 < ell < nu:
                Pprev = rotated[(ell - 1) % nu]
                Pnext = rotated[ell % nu]
                g = fit_asg1(Pprev, Pnext, tol=self.tol)
                jet = Pprev.jet(np.zeros((1, 2)), 2)[0]
                t0, t0p = jet[0, 1], jet[0, 2]
                d, dp = transversal_vector(g, Pprev, np.array([0.0]))
                slot = _EdgeSlot(
                    t0, t0p, d[0], dp[0], g.alpha1, g.beta1, g.alpha2, g.beta2
                )
            elif ell == 0:
                # boundary edge on the {xi2 = 0} side of the first patch
                jet = rotated[0].jet(np.zeros((1, 2)), 2)[0]
                one = np.array([1.0, 0.0])
                zero = np.zeros(2)
                slot = _EdgeSlot(
                    jet[1, 0], jet[2, 0], -jet[0, 1], -jet[1, 1],
                    None, None, one, zero,
                )
            else:
                # boundary edge on the {xi1 = 0} side of the last patch
                jet = rotated[nu - 1].jet(np.zeros((1, 2)), 2)[0]
                one = np.array([1.0, 0.0])
                zero = np.zeros(2)
                slot = _EdgeSlot(
                    jet[0, 1], jet[0, 2], jet[1, 0], jet[1, 1],
                    one, zero, None, None,
                )
            slots.append(slot)
        return _VertexAssembly(vertex, rotated, sigma, point, slots)

    def _edge_term_grid(self, slot, data, role):
        """Grid of the local edge-space Hermite interpolant on one patch."""
        hp = self.config.h / self.config.p
        g, H = data.grad, data.hess
        d0v = np.array(
            [
                data.value,
                g @ slot.t0,
                slot.t0 @ H @ slot.t0 + g @ slot.t0p,
                hp * (g @ slot.d0),
                hp * (slot.t0 @ H @ slot.d0 + g @ slot.d0p),
            ]
        )
        tvec = np.zeros(self.splus.N)
        tvec[:3] = self._aplus @ d0v[:3]
        wvec = np.zeros(self.sminus.N)
        wvec[:2] = self._aminus @ d0v[3:]

        alpha, beta = (slot.a1, slot.b1) if role == 1 else (slot.a2, slot.b2)
        u0 = self._rep_plus @ tvec
        u1 = self._mult_rep(self._der_plus @ tvec, beta)
        w = self._mult_rep(wvec, alpha)
        grid = np.zeros((self.N, self.N))
        if role == 1:
            grid[0, :] = u0
            grid[1, :] = u0 - hp * u1 + w
        else:
            grid[:, 0] = u0
            grid[:, 1] = u0 - hp * u1 - w
        return grid

    def _corner_term_grid(self, P, data):
        jet = P.jet(np.zeros((1, 2)), 2)[0]
        Fu, Fv, Fuv = jet[1, 0], jet[0, 1], jet[1, 1]
        g, H = data.grad, data.hess
        fjet = np.array(
            [
                [data.value, g @ Fv],
                [g @ Fu, Fu @ H @ Fv + g @ Fuv],
            ]
        )
        E = self._corner_inv @ fjet @ self._corner_inv.T
        grid = np.zeros((self.N, self.N))
        grid[:2, :2] = E
        return grid

    def vertex_projector(self, vid, data):
        """Alternating-sum Hermite interpolant of C2 data at one vertex.

        The result matches value, gradient and Hessian of the data at the
        vertex from every surrounding patch and is identically zero when the
        data is zero.
        """
        asm = self.vertex_assembly.get(vid)
        if asm is None:
            asm = self._vertex_assembly_for(vid)
            self.vertex_assembly[vid] = asm
        fid = BasisId("vertex", vid, None)
        if data.is_zero:
            return ArgyrisFunction(fid, {})
        nslots = len(asm.slots)
        blocks = {}
        for ell, (ipatch, rot) in enumerate(asm.vertex.corners):
            grid = -self._corner_term_grid(asm.rotated[ell], data)
            grid += self._edge_term_grid(asm.slots[ell], data, role=2)
            grid += self._edge_term_grid(asm.slots[(ell + 1) % nslots], data, role=1)
            blocks[ipatch] = Block.from_dense(rotate_net(grid, (4 - rot) % 4))
        return ArgyrisFunction(fid, blocks)

    def build_vertex_functions(self, vid):
        """Six functions per vertex, dual to scaled derivatives of order <= 2."""
        asm = self.vertex_assembly.get(vid)
        if asm is None:
            asm = self._vertex_assembly_for(vid)
            self.vertex_assembly[vid] = asm
        sig = asm.sigma
        out = []
        for (j1, j2) in VERTEX_INDEX_ORDER:
            order = j1 + j2
            val = sig**order if order == 0 else 0.0
            grad = np.zeros(2)
            hess = np.zeros((2, 2))
            if order == 1:
                grad[0 if j1 else 1] = sig
            elif order == 2:
                if (j1, j2) == (2, 0):
                    hess[0, 0] = sig**2
                elif (j1, j2) == (0, 2):
                    hess[1, 1] = sig**2
                else:
                    hess[0, 1] = hess[1, 0] = sig**2
            fn = self.vertex_projector(vid, C2Data(val, grad, hess))
            out.append(ArgyrisFunction(BasisId("vertex", vid, (j1, j2)), fn.blocks))
        return out

    # ------------------------------------------------------------------
    # queries and evaluation
    # ------------------------------------------------------------------

    @property
    def dim(self):
        return len(self.functions)

    def dimension(self):
        """Total dimension with the per-family breakdown (formula-checked)."""
        return self.dim, dict(self.breakdown)

    def sigma(self, vid):
        return self.vertex_assembly[vid].sigma

    def combine(self, coeffs, patch):
        """Dense coefficient grid of sum_a coeffs[a] * function_a on a patch."""
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.shape != (self.dim,):
            raise InvalidConfigError(
                f"coefficient vector has shape {coeffs.shape}, expected ({self.dim},)"
            )
        grid = np.zeros(self.shape)
        for a, blk in self.patch_support[patch]:
            if coeffs[a] != 0.0:
                blk.add_to(grid, coeffs[a])
        return grid

    def evaluate(self, coeffs, patch, uv, nderiv=0):
        """Parametric jet of a coefficient vector on one patch.

        Returns an (m, nderiv+1, nderiv+1) array of mixed partial
        derivatives; pair it with the patch Jacobian for physical ones.
        """
        if not 0 <= patch < len(self.geometry.patches):
            raise InvalidConfigError(f"patch index {patch} out of range")
        grid = self.combine(coeffs, patch)
        tsp = TensorSpline(TensorSpace(self.usp), grid)
        return tsp.jet(uv, nderiv)

    def function_jet(self, a, patch, uv, nderiv=0):
        """Parametric jet of basis function a on one patch (zero off-support)."""
        uv = np.atleast_2d(uv)
        fn = self.functions[a]
        if patch not in fn.blocks:
            return np.zeros((len(uv), nderiv + 1, nderiv + 1))
        grid = fn.dense_grid(self.shape, patch)
        tsp = TensorSpline(TensorSpace(self.usp), grid)
        return tsp.jet(uv, nderiv)


def physical_derivatives(geo_jet, f_jet):
    """Convert parametric jets to physical value/gradient/Hessian.

    ``geo_jet``: (m, 3, 3, 2) patch-map derivatives; ``f_jet``: (m, 3, 3).
    Returns (values, gradients (m, 2), Hessians (m, 2, 2)).
    """
    Fu = geo_jet[:, 1, 0, :]
    Fv = geo_jet[:, 0, 1, :]
    J = np.stack([Fu, Fv], axis=-1)  # J[:, i, d] = dF_i / dxi_d
    val = f_jet[:, 0, 0]
    rhs = np.stack([f_jet[:, 1, 0], f_jet[:, 0, 1]], axis=-1)
    JT = np.swapaxes(J, 1, 2)
    grad = np.linalg.solve(JT, rhs[..., None])[..., 0]
    Hpar = np.empty((len(val), 2, 2))
    Hpar[:, 0, 0] = f_jet[:, 2, 0]
    Hpar[:, 0, 1] = Hpar[:, 1, 0] = f_jet[:, 1, 1]
    Hpar[:, 1, 1] = f_jet[:, 0, 2]
    for k in range(2):
        Fk = np.empty((len(val), 2, 2))
        Fk[:, 0, 0] = geo_jet[:, 2, 0, k]
        Fk[:, 0, 1] = Fk[:, 1, 0] = geo_jet[:, 1, 1, k]
        Fk[:, 1, 1] = geo_jet[:, 0, 2, k]
        Hpar -= grad[:, k, None, None] * Fk
    Jinv = np.linalg.inv(J)
    hess = np.swapaxes(Jinv, 1, 2) @ Hpar @ Jinv
    return val, grad, hess
