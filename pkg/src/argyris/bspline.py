"""Univariate and tensor-product B-spline spaces on [0, 1] with uniform open knots.

Provides basis/derivative evaluation, the derived edge spaces (degree p with
one order more smoothness, and degree p-1 with the same smoothness), exact
piecewise-polynomial conversions via per-element Chebyshev interpolation,
products with linear polynomials, and local dual functionals that are exact
on the span of the basis.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial import chebyshev as _cheb

from .errors import DomainError, InvalidConfigError, NotInSpaceError

__all__ = [
    "SpaceConfig",
    "UnivariateSpace",
    "Spline",
    "TensorSpace",
    "TensorSpline",
    "PiecewisePoly",
    "derived_edge_spaces",
    "multiply_by_linear",
    "represent_exactly",
    "represent_exactly_2d",
    "convert",
    "dual_functional",
    "dual_functional_weights",
]


@dataclass(frozen=True)
class SpaceConfig:
    """Degree, smoothness and mesh resolution of a spline space on [0, 1].

    ``p`` is the polynomial degree, ``r`` the interior continuity order and
    ``n`` the number of (uniform) elements, so the mesh size is ``h = 1/n``.
    """

    p: int
    r: int
    n: int

    def __post_init__(self):
        if self.p < 1:
            raise InvalidConfigError(f"degree must be >= 1, got p={self.p}")
        if self.n < 1:
            raise InvalidConfigError(f"need at least one element, got n={self.n}")
        if self.r > self.p - 1 and self.n > 1:
            raise InvalidConfigError(
                f"continuity r={self.r} too high for degree p={self.p}"
            )

    @property
    def h(self):
        return 1.0 / self.n

    def check_argyris(self):
        """Enforce the extra constraints needed by the smooth-space build.

        Inside patches the splines must be at least C^1 with r <= p-2, and
        the mesh must resolve the interface index sets, h <= (p-r-1)/(4-r).
        """
        if self.r < 1:
            raise InvalidConfigError("patch splines must be at least C^1 (r >= 1)")
        if self.r > self.p - 2:
            raise InvalidConfigError(
                f"need r <= p-2 for the smooth-space build, got p={self.p}, r={self.r}"
            )
        if self.n * (self.p - self.r - 1) < 4 - self.r:
            raise InvalidConfigError(
                f"mesh too coarse: need n >= {(4 - self.r) / (self.p - self.r - 1):.3g} "
                f"elements per direction, got n={self.n}"
            )


def _chebpts(a, b, m):
    """m Chebyshev points of the first kind mapped to (a, b), ascending."""
    t = np.sort(_cheb.chebpts1(m))
    return a + (t + 1.0) * 0.5 * (b - a)


class UnivariateSpace:
    """B-spline space of degree p and continuity C^r on a uniform mesh of [0, 1].

    The open knot vector has boundary multiplicity p+1 and interior
    multiplicity p-r, giving dimension N = (p-r)(n-1) + p + 1.
    """

    def __init__(self, p, r, n):
        self.config = SpaceConfig(p, r, n)
        self.p = p
        self.r = r
        self.n = n
        self.h = 1.0 / n
        mult = p - r
        interior = np.repeat(np.arange(1, n) / n, mult)
        self.knots = np.concatenate([np.zeros(p + 1), interior, np.ones(p + 1)])
        self.N = (p - r) * (n - 1) + p + 1
        assert self.N == len(self.knots) - p - 1
        self.breakpoints = np.arange(n + 1) / n

    def __repr__(self):
        return f"UnivariateSpace(p={self.p}, r={self.r}, n={self.n}, N={self.N})"

    def __eq__(self, other):
        return (
            isinstance(other, UnivariateSpace)
            and (self.p, self.r, self.n) == (other.p, other.r, other.n)
        )

    def __hash__(self):
        return hash(("UnivariateSpace", self.p, self.r, self.n))

    def element_of(self, x):
        """Element index containing x; right-continuous except at x = 1."""
        e = np.minimum((np.asarray(x) * self.n).astype(int), self.n - 1)
        return e

    def greville(self):
        """Knot averages; linear functions equal their coefficients there."""
        k = self.knots
        return np.array([k[j + 1 : j + self.p + 1].mean() for j in range(self.N)])

    def basis_element_range(self, j):
        """Inclusive range (e0, e1) of elements where basis function j is active."""
        if not 0 <= j < self.N:
            raise IndexError(f"basis index {j} out of range for N={self.N}")
        mult = self.p - self.r
        e0 = max(0, -(-(j - self.p) // mult))
        e1 = min(self.n - 1, j // mult)
        return e0, e1

    def basis_ders(self, xs, nderiv):
        """Evaluate all active basis functions and derivatives at points xs.

        Parameters
        ----------
        xs : array_like
            Evaluation points in [0, 1].
        nderiv : int
            Highest derivative order requested.

        Returns
        -------
        first : (m,) int array
            Index of the first active basis function at each point.
        ders : (m, nderiv+1, p+1) array
            ``ders[q, k, i]`` is the k-th derivative of basis function
            ``first[q] + i`` at ``xs[q]``. At breakpoints the right limit is
            used, except at 1 where the left limit is used.
        """
        xs = np.atleast_1d(np.asarray(xs, dtype=float))
        if np.any(xs < -1e-14) or np.any(xs > 1.0 + 1e-14):
            raise DomainError(f"points outside [0, 1]: {xs.min()}..{xs.max()}")
        xs = np.clip(xs, 0.0, 1.0)
        p = self.p
        m = len(xs)
        elem = self.element_of(xs)
        span = p + elem * (p - self.r)
        first = span - p
        knots = self.knots

        nd = min(nderiv, p)
        ndu = np.empty((m, p + 1, p + 1))
        ndu[:, 0, 0] = 1.0
        left = np.empty((m, p + 1))
        right = np.empty((m, p + 1))
        for j in range(1, p + 1):
            left[:, j] = xs - knots[span + 1 - j]
            right[:, j] = knots[span + j] - xs
            saved = np.zeros(m)
            for rr in range(j):
                ndu[:, j, rr] = right[:, rr + 1] + left[:, j - rr]
                temp = ndu[:, rr, j - 1] / ndu[:, j, rr]
                ndu[:, rr, j] = saved + right[:, rr + 1] * temp
                saved = left[:, j - rr] * temp
            ndu[:, j, j] = saved

        ders = np.zeros((m, nderiv + 1, p + 1))
        ders[:, 0, :] = ndu[:, :, p]
        a = np.empty((m, 2, p + 1))
        for rr in range(p + 1):
            s1, s2 = 0, 1
            a[:, 0, :] = 0.0
            a[:, 0, 0] = 1.0
            for k in range(1, nd + 1):
                d = np.zeros(m)
                rk = rr - k
                pk = p - k
                if rr >= k:
                    a[:, s2, 0] = a[:, s1, 0] / ndu[:, pk + 1, rk]
                    d = a[:, s2, 0] * ndu[:, rk, pk]
                j1 = 1 if rk >= -1 else -rk
                j2 = k - 1 if rr - 1 <= pk else p - rr
                for j in range(j1, j2 + 1):
                    a[:, s2, j] = (a[:, s1, j] - a[:, s1, j - 1]) / ndu[:, pk + 1, rk + j]
                    d = d + a[:, s2, j] * ndu[:, rk + j, pk]
                if rr <= pk:
                    a[:, s2, k] = -a[:, s1, k - 1] / ndu[:, pk + 1, rr]
                    d = d + a[:, s2, k] * ndu[:, rr, pk]
                ders[:, k, rr] = d
                s1, s2 = s2, s1

        fac = float(p)
        for k in range(1, nd + 1):
            ders[:, k, :] *= fac
            fac *= p - k
        return first, ders

    def basis_function(self, j):
        """Basis function j as a Spline (unit coefficient vector)."""
        c = np.zeros(self.N)
        c[j] = 1.0
        return Spline(self, c)

    def spline(self, coeffs):
        return Spline(self, coeffs)


class Spline:
    """A spline in a UnivariateSpace, stored by its coefficient vector."""

    def __init__(self, space, coeffs):
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.shape != (space.N,):
            raise InvalidConfigError(
                f"coefficient vector has length {coeffs.shape}, expected {space.N}"
            )
        self.space = space
        self.coeffs = coeffs

    def __call__(self, xs, deriv=0):
        xs = np.atleast_1d(np.asarray(xs, dtype=float))
        first, ders = self.space.basis_ders(xs, deriv)
        idx = first[:, None] + np.arange(self.space.p + 1)[None, :]
        out = np.einsum("mi,mi->m", ders[:, deriv, :], self.coeffs[idx])
        return out

def derived_edge_spaces(space):
    """Edge-trace and edge-derivative spaces attached to a spline space.

    Returns the pair (S_plus, S_minus): S_plus has the same degree and one
    order more interior smoothness, S_minus has degree lowered by one and the
    same smoothness. Both share the breakpoints of the input, and
    dim S_minus = dim S_plus - 1.
    """
    p, r, n = space.p, space.r, space.n
    if r + 1 > p - 1 and n > 1:
        raise InvalidConfigError(
            f"no proper trace space for p={p}, r={r}: need r+1 <= p-1"
        )
    splus = UnivariateSpace(p, min(r + 1, p - 1) if n == 1 else r + 1, n)
    sminus = UnivariateSpace(p - 1, min(r, p - 2) if n == 1 else r, n)
    return splus, sminus


def represent_exactly(space, f, tol=1e-10):
    """Coefficients of a function known to lie in the space.

    Solves a (p+1)x(p+1) interpolation problem at Chebyshev points on every
    element and reconciles the shared coefficients. A reconciliation mismatch
    above ``tol`` (relative) means the sampled function is not a member of
    the space and raises NotInSpaceError.

    ``f`` may return extra trailing axes (several functions at once); the
    result then carries the same trailing shape after the leading axis N.
    """
    p, n, N = space.p, space.n, space.N
    acc = cnt = lo = hi = None
    bp = space.breakpoints
    for e in range(n):
        pts = _chebpts(bp[e], bp[e + 1], p + 1)
        first, ders = space.basis_ders(pts, 0)
        C = ders[:, 0, :]
        y = np.asarray(f(pts), dtype=float)
        if acc is None:
            acc = np.zeros((N,) + y.shape[1:])
            cnt = np.zeros(N)
            lo = np.full(acc.shape, np.inf)
            hi = np.full(acc.shape, -np.inf)
        sol = np.linalg.solve(C, y.reshape(p + 1, -1)).reshape(y.shape)
        sl = slice(first[0], first[0] + p + 1)
        acc[sl] += sol
        cnt[sl] += 1
        lo[sl] = np.minimum(lo[sl], sol)
        hi[sl] = np.maximum(hi[sl], sol)
    w = cnt if acc.ndim == 1 else cnt.reshape((N,) + (1,) * (acc.ndim - 1))
    coeffs = acc / w
    scale = max(1.0, np.abs(coeffs).max())
    gap = (hi - lo).max()
    if gap > tol * scale:
        raise NotInSpaceError(
            f"element-wise representations disagree by {gap:.3e} "
            f"(relative tolerance {tol:.1e}); function is not in {space}"
        )
    return coeffs


def convert(spline, target_space, tol=1e-10):
    """Re-express a spline exactly in a richer space with the same breakpoints."""
    return Spline(target_space, represent_exactly(target_space, spline, tol=tol))


def multiply_by_linear(spline, a, b, tol=1e-10):
    """Exact product of a spline with the linear polynomial a + b*x.

    The result lies in the space of one degree higher and the same interior
    continuity, sharing the breakpoints of the input.
    """
    sp = spline.space
    r = sp.r if sp.n > 1 else sp.p  # single element: any r gives polynomials
    target = UnivariateSpace(sp.p + 1, min(r, sp.p), sp.n)
    return Spline(
        target,
        represent_exactly(target, lambda x: (a + b * x) * spline(x), tol=tol),
    )


@lru_cache(maxsize=4096)
def _dual_data_cached(space, j):
    p = space.p
    e0, e1 = space.basis_element_range(j)
    e = (e0 + e1) // 2
    bp = space.breakpoints
    pts = _chebpts(bp[e], bp[e + 1], p + 1)
    first, ders = space.basis_ders(pts, 0)
    C = ders[:, 0, :]
    rhs = np.zeros(p + 1)
    rhs[j - first[0]] = 1.0
    w = np.linalg.solve(C.T, rhs)
    pts.setflags(write=False)
    w.setflags(write=False)
    return pts, w


def dual_functional_weights(space, j):
    """Sample points and weights realizing the dual functional of basis j.

    The functional is a local interpolation coordinate: it samples one
    element inside the support of basis function j at p+1 Chebyshev points,
    so that lambda_j(sum_m c_m b_m) = c_j for every spline in the space.
    """
    return _dual_data_cached(space, j)


def dual_functional(space, j, f):
    """Apply the local dual functional of basis j to a function sampler."""
    pts, w = dual_functional_weights(space, j)
    return float(w @ np.asarray(f(pts), dtype=float))


class TensorSpace:
    """Tensor product of two univariate spaces (equal factors in this work)."""

    def __init__(self, s1, s2=None):
        self.s1 = s1
        self.s2 = s1 if s2 is None else s2
        self.shape = (self.s1.N, self.s2.N)

    def __eq__(self, other):
        return (
            isinstance(other, TensorSpace)
            and self.s1 == other.s1
            and self.s2 == other.s2
        )

    def __hash__(self):
        return hash(("TensorSpace", self.s1, self.s2))

    def __repr__(self):
        return f"TensorSpace({self.s1}, {self.s2})"

    def spline(self, coeffs):
        return TensorSpline(self, coeffs)


class TensorSpline:
    """Function in a TensorSpace with an (N1, N2) coefficient grid.

    The last axes of the coefficient array may carry vector components, e.g.
    an (N1, N2, 2) grid describes a planar map.
    """

    def __init__(self, space, coeffs):
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.shape[:2] != space.shape:
            raise InvalidConfigError(
                f"coefficient grid {coeffs.shape} does not match space {space.shape}"
            )
        self.space = space
        self.coeffs = coeffs

    def jet(self, uv, nderiv):
        """Partial derivatives up to the given order at parametric points.

        Parameters
        ----------
        uv : (m, 2) array
            Parametric evaluation points.
        nderiv : int
            Highest derivative order per direction.

        Returns
        -------
        (m, nderiv+1, nderiv+1, ...) array ``D`` with
        ``D[q, a, b]`` = d^a/dxi1^a d^b/dxi2^b of the function at uv[q].
        """
        uv = np.atleast_2d(np.asarray(uv, dtype=float))
        s1, s2 = self.space.s1, self.space.s2
        f1, d1 = s1.basis_ders(uv[:, 0], nderiv)
        f2, d2 = s2.basis_ders(uv[:, 1], nderiv)
        i1 = f1[:, None] + np.arange(s1.p + 1)[None, :]
        i2 = f2[:, None] + np.arange(s2.p + 1)[None, :]
        W = self.coeffs[i1[:, :, None], i2[:, None, :]]
        if self.coeffs.ndim == 2:
            return np.einsum("mai,mij,mbj->mab", d1, W, d2)
        return np.einsum("mai,mijc,mbj->mabc", d1, W, d2)

    def __call__(self, uv):
        return self.jet(uv, 0)[:, 0, 0]


def represent_exactly_2d(space, f, tol=1e-10):
    """Tensor-product analogue of represent_exactly.

    ``f`` is called with two flat arrays (the tensor grid of sample points,
    broadcast as ``u[:, None]``, ``v[None, :]``) and must return the sampled
    grid of values; trailing component axes are allowed.
    """
    s1, s2 = space.s1, space.s2
    p1, p2 = s1.p, s2.p
    probe = np.asarray(
        f(np.array([[0.5]]), np.array([[0.5]])), dtype=float
    )
    comp = probe.shape[2:]
    acc = np.zeros(space.shape + comp)
    cnt = np.zeros(space.shape)
    lo = np.full(space.shape + comp, np.inf)
    hi = np.full(space.shape + comp, -np.inf)
    bp1, bp2 = s1.breakpoints, s2.breakpoints
    for e1 in range(s1.n):
        pts1 = _chebpts(bp1[e1], bp1[e1 + 1], p1 + 1)
        first1, ders1 = s1.basis_ders(pts1, 0)
        C1 = ders1[:, 0, :]
        for e2 in range(s2.n):
            pts2 = _chebpts(bp2[e2], bp2[e2 + 1], p2 + 1)
            first2, ders2 = s2.basis_ders(pts2, 0)
            C2 = ders2[:, 0, :]
            Y = np.asarray(f(pts1[:, None], pts2[None, :]), dtype=float)
            sol = np.linalg.solve(C1, Y.reshape(p1 + 1, -1)).reshape(Y.shape)
            sol = np.moveaxis(sol, 1, 0)
            sol = np.linalg.solve(C2, sol.reshape(p2 + 1, -1)).reshape(sol.shape)
            sol = np.moveaxis(sol, 0, 1)
            r = slice(first1[0], first1[0] + p1 + 1)
            c = slice(first2[0], first2[0] + p2 + 1)
            acc[r, c] += sol
            cnt[r, c] += 1
            lo[r, c] = np.minimum(lo[r, c], sol)
            hi[r, c] = np.maximum(hi[r, c], sol)
    w = cnt if not comp else cnt[..., None]
    coeffs = acc / w
    scale = max(1.0, np.abs(coeffs).max())
    gap = (hi - lo).max()
    if gap > tol * scale:
        raise NotInSpaceError(
            f"element-wise representations disagree by {gap:.3e}; "
            f"function is not in the tensor space"
        )
    return coeffs


class PiecewisePoly:
    """Piecewise polynomial on the uniform mesh of [0, 1], one Chebyshev
    coefficient row per element (element mapped to [-1, 1])."""

    def __init__(self, n, coef):
        self.n = n
        self.coef = np.asarray(coef, dtype=float)

    @classmethod
    def from_callable(cls, n, degree, f):
        """Exact capture of a function that is polynomial of the given degree
        on every element of the uniform n-mesh."""
        coef = np.empty((n, degree + 1))
        for e in range(n):
            a, b = e / n, (e + 1) / n
            g = lambda t: f(a + (t + 1.0) * 0.5 * (b - a))
            coef[e] = _cheb.chebinterpolate(g, degree)
        return cls(n, coef)

    def __call__(self, xs):
        xs = np.atleast_1d(np.asarray(xs, dtype=float))
        e = np.minimum((xs * self.n).astype(int), self.n - 1)
        t = 2.0 * (xs * self.n - e) - 1.0
        out = np.empty_like(xs)
        for el in np.unique(e):
            m = e == el
            out[m] = _cheb.chebval(t[m], self.coef[el])
        return out

    def derivative(self):
        dcoef = np.zeros((self.n, max(self.coef.shape[1] - 1, 1)))
        for el in range(self.n):
            d = _cheb.chebder(self.coef[el]) * (2.0 * self.n)
            dcoef[el, : len(d)] = d
        return PiecewisePoly(self.n, dcoef)
