import numpy as np
import pytest

from argyris import (
    ArgyrisSpace,
    Patch,
    SpaceConfig,
    TensorSpace,
    UnivariateSpace,
    builtin_geometry,
    infer_topology,
)


def bilinear_patch(tspace, c00, c10, c11, c01):
    g = tspace.s1.greville()
    u, v = g[:, None, None], g[None, :, None]
    c00, c10, c11, c01 = (np.asarray(c, float) for c in (c00, c10, c11, c01))
    net = (1 - u) * (1 - v) * c00 + u * (1 - v) * c10 + u * v * c11 + (1 - u) * v * c01
    return Patch(tspace, net)


def square_grid_geometry(config, nx, ny):
    """nx-by-ny grid of unit squares (axis-aligned, identity-like patches)."""
    ts = TensorSpace(UnivariateSpace(config.p, config.r, config.n))
    patches = []
    for ix in range(nx):
        for iy in range(ny):
            patches.append(
                bilinear_patch(
                    ts,
                    (ix, iy),
                    (ix + 1, iy),
                    (ix + 1, iy + 1),
                    (ix, iy + 1),
                )
            )
    return infer_topology(config, patches)


@pytest.fixture(scope="session")
def cfg4():
    return SpaceConfig(3, 1, 4)


@pytest.fixture(scope="session")
def mp_two(cfg4):
    return builtin_geometry("two_patch_bilinear", cfg4)


@pytest.fixture(scope="session")
def mp_three(cfg4):
    return builtin_geometry("three_patch_bilinear", cfg4)


@pytest.fixture(scope="session")
def mp_five(cfg4):
    return builtin_geometry("five_patch_bilinear", cfg4)


@pytest.fixture(scope="session")
def mp_lshape(cfg4):
    return builtin_geometry("lshape_bilinear", cfg4)


@pytest.fixture(scope="session")
def mp_curved(cfg4):
    return builtin_geometry("two_patch_curved_asg1", cfg4)


@pytest.fixture(scope="session")
def mp_non_asg1(cfg4):
    return builtin_geometry("two_patch_generic_non_asg1", cfg4)


@pytest.fixture(scope="session")
def sp_two(mp_two):
    return ArgyrisSpace(mp_two)


@pytest.fixture(scope="session")
def sp_three(mp_three):
    return ArgyrisSpace(mp_three)


@pytest.fixture(scope="session")
def mp_grid22(cfg4):
    return square_grid_geometry(cfg4, 2, 2)


@pytest.fixture(scope="session")
def mp_single(cfg4):
    return square_grid_geometry(cfg4, 1, 1)


@pytest.fixture(scope="session")
def mp_asymmetric(cfg4):
    """Two bilinear quads whose interface needs genuinely linear gluing data
    (nonzero alpha slopes and a full-rank beta split)."""
    ts = TensorSpace(UnivariateSpace(cfg4.p, cfg4.r, cfg4.n))
    right = bilinear_patch(ts, (0, 0), (1.0, -0.2), (1.3, 1.2), (0, 1))
    left = bilinear_patch(ts, (-1.1, -0.3), (0, 0), (0, 1), (-0.8, 1.4))
    return infer_topology(cfg4, [right, left])
