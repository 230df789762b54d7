import numpy as np

from argyris import (
    AnalyticField,
    ConvergenceTable,
    QuadratureRule,
    SpaceField,
    assemble_mass,
    convergence_study,
    cos_sin_field,
    l2_fit,
    smoothness_report,
)
from argyris.space import ArgyrisFunction, BasisId, Block


def test_quadrature_weights_sum_to_element_area():
    rule = QuadratureRule(5, 4)
    np.testing.assert_allclose(rule.weights.sum(axis=1), 0.2, atol=1e-15)


def test_quadrature_polynomial_exactness():
    g = 5
    rule = QuadratureRule(3, g)
    for k in range(2 * g):
        got = (rule.weights * rule.nodes**k).sum()
        assert abs(got - 1.0 / (k + 1)) < 1e-14


def test_mass_symmetric_and_positive_definite(sp_three):
    M = assemble_mass(sp_three)
    assert (M - M.T).count_nonzero() == 0
    eig = np.linalg.eigvalsh(M.toarray())
    assert eig.min() > 0.0


def test_mass_entries_against_refined_quadrature(sp_two):
    M1 = assemble_mass(sp_two, QuadratureRule(sp_two.config.n, 5))
    M2 = assemble_mass(sp_two, QuadratureRule(sp_two.config.n, 10))
    d = np.abs((M1 - M2).toarray()).max()
    assert d < 1e-10 * np.abs(M2.toarray()).max()


def test_in_space_fit_reproduces_coefficients(sp_three):
    rng = np.random.default_rng(21)
    c = rng.normal(size=sp_three.dim)
    res = l2_fit(sp_three, SpaceField(sp_three, c))
    assert res.rel_error < 1e-10
    assert np.abs(res.coeffs - c).max() < 1e-8
    assert res.galerkin_residual < 1e-10


def test_zero_target(sp_three):
    mp = sp_three.geometry
    zero = AnalyticField(mp, lambda x: np.zeros(len(x)))
    res = l2_fit(sp_three, zero)
    assert np.abs(res.coeffs).max() < 1e-14
    assert res.rel_error == 0.0


def test_fit_errors_decrease_under_refinement(mp_three):
    table, _ = convergence_study(mp_three, cos_sin_field, 3)
    errs = [row[2] for row in table.rows]
    assert errs[0] > errs[1] > errs[2]


def test_single_patch_rate_is_degree_plus_one(mp_single):
    table, _ = convergence_study(mp_single, cos_sin_field, 3)
    last = table.rows[-1][3]
    assert abs(last - (mp_single.config.p + 1)) < 0.3


def test_in_space_target_flags_ecr(sp_three, mp_three):
    # target inside the coarsest space: errors stay at rounding level and the
    # rate column is left undefined
    rng = np.random.default_rng(22)
    c = rng.normal(size=sp_three.dim)
    fld = SpaceField(sp_three, c)

    table = ConvergenceTable()
    res = l2_fit(sp_three, fld)
    table.add(res.h, res.dim, res.rel_error)
    table.add(res.h / 2, 4 * res.dim, res.rel_error / 16)
    assert table.rows[0][3] is None
    assert table.rows[1][3] is None  # below the in-space floor, flagged as "-"
    assert "-" in table.to_text().splitlines()[1]


def test_ecr_convention_matches_reported_numbers():
    # log2(7.46e-3 / 3.03e-4) = 4.62 to two decimals
    assert round(ConvergenceTable.ecr_convention(7.46e-3, 3.03e-4), 2) == 4.62


def test_quadrature_saturation(sp_three):
    mp = sp_three.geometry
    fld = cos_sin_field(mp)
    r1 = l2_fit(sp_three, fld, QuadratureRule(sp_three.config.n, 5))
    r2 = l2_fit(sp_three, fld, QuadratureRule(sp_three.config.n, 10))
    assert abs(r1.rel_error - r2.rel_error) < 1e-8 * r2.rel_error


def test_smoothness_report_per_basis(sp_three):
    rep = smoothness_report(sp_three, samples_per_edge=50)
    assert rep.max_c1_jump < 1e-9
    assert rep.max_c2_jump < 1e-8
    assert rep.passed()
    text = rep.to_text()
    assert "interface" in text and "vertex" in text


def test_smoothness_report_of_member(sp_three):
    rng = np.random.default_rng(23)
    c = rng.normal(size=sp_three.dim)
    rep = smoothness_report(sp_three, coeffs=c, samples_per_edge=50)
    assert rep.passed()


def test_smoothness_report_flags_broken_function(sp_three):
    # negative control: a raw one-sided B-spline is not even C0 across the
    # interface; the audit must report a large jump for it
    import copy

    space = copy.copy(sp_three)
    space.functions = list(sp_three.functions)
    e = space.geometry.interfaces()[0]
    (i1, k1), _ = e.locals
    grid = np.zeros(space.shape)
    grid[:2, :2] = 1.0  # corner B-splines: nonzero value on two sides of patch i1
    broken = ArgyrisFunction(BasisId("patch", i1, ("broken",)), {i1: Block.from_dense(grid)})
    space.functions.append(broken)
    rep = smoothness_report(space, samples_per_edge=50)
    assert rep.max_c1_jump > 1e-3
    worst_ids = {row[3] for row in rep.edge_rows}
    assert broken.id in worst_ids


def test_curved_geometry_converges_fourth_order(mp_curved):
    table, _ = convergence_study(mp_curved, cos_sin_field, 3)
    assert 3.7 <= table.rows[-1][3] <= 4.3
