"""Gluing data along interfaces.

For a pair of patches in standard form, F1(0, t) = F2(t, 0), the geometric
compatibility functions solving

    alpha1(t) d2F2(t, 0) + alpha2(t) d1F1(0, t) + beta(t) d2F1(0, t) = 0

are determined up to a common factor by three determinants of edge
derivatives. An interface is analysis-suitable G1 when alpha1, alpha2 and the
split beta = alpha1*beta2 + alpha2*beta1 can all be chosen as linear
polynomials; the fit below decides this and returns stabilized data
(alphas close to one, betas of minimal norm).
"""

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as _poly

from .bspline import PiecewisePoly, _chebpts
from .errors import ConformityError, DegenerateGluingError, NotASG1Error

__all__ = [
    "ExactGluing",
    "GluingData",
    "exact_gluing",
    "fit_asg1",
    "boundary_gluing",
    "transversal_vector",
]

DEFAULT_TOL = 1e-9
_SNAP = 1e-11


def _pv(coeffs, x):
    return _poly.polyval(np.asarray(x, dtype=float), coeffs)


@dataclass
class ExactGluing:
    """The three edge determinants with the common factor normalized to one.

    d1(t) = det[d1F1, d2F1](0, t), d2(t) = det[d1F2, d2F2](t, 0) and
    d12(t) = det[d2F2(t, 0), d1F1(0, t)]; each is a piecewise polynomial of
    degree at most 2p-1 on the edge mesh, and d1, d2 are positive.
    """

    d1: PiecewisePoly
    d2: PiecewisePoly
    d12: PiecewisePoly


@dataclass
class GluingData:
    """Linear gluing data for one interface (monomial coefficients).

    ``alpha2``/``beta2`` are None for boundary edges, which carry the trivial
    data alpha1 = 1, beta1 = 0.
    """

    alpha1: np.ndarray
    beta1: np.ndarray
    alpha2: np.ndarray | None
    beta2: np.ndarray | None
    beta: np.ndarray
    residual: float
    asg1: bool

    def alpha1_at(self, x):
        return _pv(self.alpha1, x)

    def alpha2_at(self, x):
        return _pv(self.alpha2, x)

    def beta1_at(self, x):
        return _pv(self.beta1, x)

    def beta2_at(self, x):
        return _pv(self.beta2, x)

    def beta_at(self, x):
        return _pv(self.beta, x)

    @property
    def is_boundary(self):
        return self.alpha2 is None


def _edge_jets(F1, F2, xs):
    z = np.zeros_like(xs)
    j1 = F1.jet(np.column_stack([z, xs]), 1)
    out = {"F1u": j1[:, 1, 0, :], "F1v": j1[:, 0, 1, :]}
    if F2 is not None:
        j2 = F2.jet(np.column_stack([xs, z]), 1)
        out["F2u"] = j2[:, 1, 0, :]
        out["F2v"] = j2[:, 0, 1, :]
    return out


def _check_standard_form(F1, F2):
    t = np.linspace(0.0, 1.0, 50)
    a = F1.point(np.column_stack([np.zeros_like(t), t]))
    b = F2.point(np.column_stack([t, np.zeros_like(t)]))
    gap = np.abs(a - b).max()
    if gap > 1e-12:
        raise ConformityError(
            f"patch pair is not in standard form: edge mismatch {gap:.3e}"
        )


def exact_gluing(F1, F2):
    """Edge determinants of a standard-form patch pair."""
    _check_standard_form(F1, F2)
    p = F1.space.s1.p
    n = F1.space.s1.n
    deg = 2 * p - 1

    def det_at(xs, which):
        j = _edge_jets(F1, F2, np.atleast_1d(xs))
        if which == 1:
            a, b = j["F1u"], j["F1v"]
        elif which == 2:
            a, b = j["F2u"], j["F2v"]
        else:
            a, b = j["F2v"], j["F1u"]
        return a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0]

    d1 = PiecewisePoly.from_callable(n, deg, lambda x: det_at(x, 1))
    d2 = PiecewisePoly.from_callable(n, deg, lambda x: det_at(x, 2))
    d12 = PiecewisePoly.from_callable(n, deg, lambda x: det_at(x, 12))
    return ExactGluing(d1, d2, d12)


def _fit_sample_points(p, n):
    # 2(2p+3) Chebyshev points per element oversample the degree 2p dets
    pts = [_chebpts(e / n, (e + 1) / n, 2 * (2 * p + 3)) for e in range(n)]
    return np.concatenate(pts)


def _g1_defect(F1, F2, a1, a2, beta, xs):
    j = _edge_jets(F1, F2, xs)
    res = (
        _pv(a1, xs)[:, None] * j["F2v"]
        + _pv(a2, xs)[:, None] * j["F1u"]
        + _pv(beta, xs)[:, None] * j["F1v"]
    )
    scale = (np.linalg.norm(j["F1u"], axis=1) + np.linalg.norm(j["F1v"], axis=1)).max()
    return float(np.linalg.norm(res, axis=1).max() / scale)


def _split_beta(a1, a2, beta):
    """Linear (beta1, beta2) with a1*beta2 + a2*beta1 = beta, minimal L2 norm.

    The 3x4 coefficient system is underdetermined; when alpha1 and alpha2
    share a root it also loses rank, and a linear split exists only if beta
    stays consistent with the reduced system (otherwise the interface
    violates the relative-primality assumption and we refuse it).
    """
    # constraint matrix on (b1_0, b1_1, b2_0, b2_1), rows = monomial coefficients
    C = np.array(
        [
            [a2[0], 0.0, a1[0], 0.0],
            [a2[1], a2[0], a1[1], a1[0]],
            [0.0, a2[1], 0.0, a1[1]],
        ]
    )
    b = np.zeros(3)
    b[: len(beta)] = beta
    G1 = np.array([[1.0, 0.5], [0.5, 1.0 / 3.0]])  # L2(0,1) Gram of {1, x}
    G = np.zeros((4, 4))
    G[:2, :2] = G1
    G[2:, 2:] = G1
    U, s, _ = np.linalg.svd(C)
    rank = int(np.sum(s > 1e-12 * s[0]))
    bh = U.T @ b
    scale = max(1.0, np.abs(b).max())
    if rank < 3 and np.abs(bh[rank:]).max() > 1e-10 * scale:
        raise DegenerateGluingError(
            "no linear beta split exists: alpha1 and alpha2 share a root"
        )
    Cr = (U.T @ C)[:rank]
    lam = np.linalg.solve(Cr @ np.linalg.solve(G, Cr.T), bh[:rank])
    v = np.linalg.solve(G, Cr.T @ lam)
    if np.abs(C @ v - b).max() > 1e-10 * scale:
        raise DegenerateGluingError("beta split constraints could not be met")
    return v[:2].copy(), v[2:].copy()


def fit_asg1(F1, F2, tol=DEFAULT_TOL, strict=True):
    """Decide AS-G1 and produce normalized linear gluing data.

    A linear pair (p, q) minimizing ||d1*q - d2*p|| over dense edge samples is
    found in the null space of a 4-column least-squares matrix;
    the interface is accepted when the relative smallest singular value is
    below ``tol``. Accepted data is rescaled so the alphas are closest to one
    in L2, beta is recovered from the exact determinants, and the beta split
    takes the minimum-norm solution.

    With ``strict`` (default), rejection raises NotASG1Error; otherwise the
    best-effort data is returned with ``asg1 = False``.
    """
    eg = exact_gluing(F1, F2)
    p_deg = F1.space.s1.p
    n = F1.space.s1.n
    xs = _fit_sample_points(p_deg, n)
    D1, D2 = eg.d1(xs), eg.d2(xs)
    if D1.min() <= 0.0 or D2.min() <= 0.0:
        raise ConformityError("edge determinants are not positive; geometry is singular")

    A = np.column_stack([-D2, -xs * D2, D1, xs * D1])
    _, svals, Vt = np.linalg.svd(A, full_matrices=False)
    rel_residual = float(svals[-1] / svals[0])

    nullity = int(np.sum(svals < tol * svals[0]))
    accepted = nullity >= 1
    if not accepted and strict:
        raise NotASG1Error(
            f"interface is not analysis-suitable G1: relative fit residual "
            f"{rel_residual:.3e} >= {tol:.1e}",
            residual=rel_residual,
        )

    # straight interfaces leave a null space of dimension > 1; pick the
    # representative minimizing ||alpha1 - 1||^2 + ||alpha2 - 1||^2 in L2(0,1)
    V = Vt[-max(nullity, 1):]
    G1 = np.array([[1.0, 0.5], [0.5, 1.0 / 3.0]])
    Gt = np.zeros((4, 4))
    Gt[:2, :2] = G1
    Gt[2:, 2:] = G1
    ell = np.array([1.0, 0.5, 1.0, 0.5])
    coef = np.linalg.solve(V @ Gt @ V.T, V @ ell)
    v = V.T @ coef
    a1 = v[:2].copy()
    a2 = v[2:].copy()
    if accepted:
        for a in (a1, a2):
            if _pv(a, 0.0) <= 0.0 or _pv(a, 1.0) <= 0.0:
                raise ConformityError(
                    "gluing sign condition alpha1*alpha2 > 0 cannot be met"
                )

    g = _pv(a1, xs) * eg.d12(xs) / D1
    beta = _poly.polyfit(xs, g, 2)
    snap = _SNAP * max(1.0, np.abs(_pv(a1, xs)).max(), np.abs(_pv(a2, xs)).max())
    if np.abs(g).max() <= snap:
        beta = np.zeros(3)
        b1 = np.zeros(2)
        b2 = np.zeros(2)
        one = np.array([1.0, 0.0])
        if np.abs(a1 - one).max() <= _SNAP and np.abs(a2 - one).max() <= _SNAP:
            a1, a2 = one.copy(), one.copy()
    elif accepted:
        b1, b2 = _split_beta(a1, a2, beta)
    else:
        # rejected: report the alphas and the unsplit quadratic only
        b1 = np.zeros(2)
        b2 = np.zeros(2)

    defect = _g1_defect(F1, F2, a1, a2, beta, xs)
    residual = rel_residual if not accepted else defect
    return GluingData(
        alpha1=a1,
        beta1=b1,
        alpha2=a2,
        beta2=b2,
        beta=beta,
        residual=residual,
        asg1=accepted,
    )


def boundary_gluing(F1):
    """Trivial gluing data for a boundary edge in standard form."""
    return GluingData(
        alpha1=np.array([1.0, 0.0]),
        beta1=np.zeros(2),
        alpha2=None,
        beta2=None,
        beta=np.zeros(3),
        residual=0.0,
        asg1=True,
    )


def transversal_vector(g, F1, xs):
    """Transversal direction d(t) along the edge of patch 1, and its derivative.

    d(t) = (d1F1(0, t) + beta1(t) d2F1(0, t)) / alpha1(t); the derivative is
    the analytic derivative of that quotient.
    """
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    z = np.zeros_like(xs)
    jet = F1.jet(np.column_stack([z, xs]), 2)
    F1u, F1v = jet[:, 1, 0, :], jet[:, 0, 1, :]
    F1uv, F1vv = jet[:, 1, 1, :], jet[:, 0, 2, :]
    a1 = g.alpha1_at(xs)[:, None]
    b1 = g.beta1_at(xs)[:, None]
    num = F1u + b1 * F1v
    d = num / a1
    dnum = F1uv + g.beta1[1] * F1v + b1 * F1vv
    dp = (dnum - g.alpha1[1] * d) / a1
    return d, dp
