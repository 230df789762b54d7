"""Built-in multi-patch test geometries.

All of them are conforming; the bilinear families (and the curved variant
obtained by composing a bilinear multi-patch with a mild polynomial map) admit
linear gluing data at every interface, while ``two_patch_generic_non_asg1``
deliberately does not.
"""

import numpy as np

from .bspline import SpaceConfig, TensorSpace, UnivariateSpace, represent_exactly_2d
from .errors import InvalidConfigError
from .multipatch import Patch, infer_topology

__all__ = ["BUILTIN_NAMES", "builtin_geometry"]

BUILTIN_NAMES = (
    "two_patch_bilinear",
    "three_patch_bilinear",
    "five_patch_bilinear",
    "lshape_bilinear",
    "two_patch_curved_asg1",
    "two_patch_generic_non_asg1",
)


def _tensor_space(config):
    return TensorSpace(UnivariateSpace(config.p, config.r, config.n))


def _bilinear_patch(tspace, c00, c10, c11, c01):
    # Greville embedding reproduces bilinear maps exactly
    g = tspace.s1.greville()
    u, v = g[:, None, None], g[None, :, None]
    c00, c10, c11, c01 = (np.asarray(c, dtype=float) for c in (c00, c10, c11, c01))
    net = (
        (1 - u) * (1 - v) * c00
        + u * (1 - v) * c10
        + u * v * c11
        + (1 - u) * v * c01
    )
    return Patch(tspace, net)


def _fan(tspace, npatch, radius=3.0):
    """npatch quads around the origin inside a regular 2*npatch-gon."""
    m = 2 * npatch
    ang = 2.0 * np.pi * np.arange(m) / m
    ring = radius * np.column_stack([np.cos(ang), np.sin(ang)])
    c = np.zeros(2)
    return [
        _bilinear_patch(
            tspace, c, ring[2 * k], ring[(2 * k + 1) % m], ring[(2 * k + 2) % m]
        )
        for k in range(npatch)
    ]


def _two_squares(tspace):
    right = _bilinear_patch(tspace, (0, 0), (1, 0), (1, 1), (0, 1))
    left = _bilinear_patch(tspace, (-1, 0), (0, 0), (0, 1), (-1, 1))
    return [right, left]


def _composed(tspace, patches, gmap):
    out = []
    for patch in patches:
        def sample(u, v, _p=patch):
            uu, vv = np.broadcast_arrays(u, v)
            pts = np.column_stack([uu.ravel(), vv.ravel()])
            return gmap(_p.point(pts)).reshape(uu.shape + (2,))

        out.append(Patch(tspace, represent_exactly_2d(tspace, sample)))
    return out


def builtin_geometry(name, config=None):
    """Construct one of the named test geometries for a given space config."""
    config = config or SpaceConfig(3, 1, 4)
    tspace = _tensor_space(config)

    if name == "two_patch_bilinear":
        return infer_topology(config, _two_squares(tspace))

    if name == "three_patch_bilinear":
        return infer_topology(config, _fan(tspace, 3))

    if name == "five_patch_bilinear":
        return infer_topology(config, _fan(tspace, 5))

    if name == "lshape_bilinear":
        a = _bilinear_patch(tspace, (-1, -1), (0, -1), (0, 0), (-1, 0))
        b = _bilinear_patch(tspace, (-1, 0), (0, 0), (0, 1), (-1, 1))
        c = _bilinear_patch(tspace, (0, 0), (1, 0), (1, 1), (0, 1))
        return infer_topology(config, [a, b, c])

    if name == "two_patch_curved_asg1":
        if config.p < 2:
            raise InvalidConfigError("the curved geometry needs degree p >= 2")

        def gmap(x):
            return np.column_stack(
                [x[:, 0] + 0.1 * x[:, 1] ** 2, x[:, 1] + 0.1 * x[:, 0] ** 2]
            )

        return infer_topology(config, _composed(tspace, _two_squares(tspace), gmap))

    if name == "two_patch_generic_non_asg1":
        rng = np.random.default_rng(20240811)
        amp = 0.2 / config.n  # keep the perturbed net regular on fine meshes
        patches = []
        for patch in _two_squares(tspace):
            net = patch.net.copy()
            net[1:-1, 1:-1] += rng.uniform(-amp, amp, net[1:-1, 1:-1].shape)
            patches.append(Patch(tspace, net))
        return infer_topology(config, patches)

    raise InvalidConfigError(
        f"unknown geometry {name!r}; available: {', '.join(BUILTIN_NAMES)}"
    )
