"""Edge tests, Jacobi-set assembly, degree reports, and jacobi CSV IO."""

import numpy as np
import pytest

import pljacobi as pj
from _fixtures import (
    bipyramid,
    bipyramid_forms,
    butterfly,
    butterfly_forms,
    octahedron,
    random_forms,
    random_function_pair,
    s4_boundary,
)


# ---------------------------------------------------------------- lambda_star


def test_lambda_star_basic():
    c, F, G = butterfly_forms(1.0, 1.0)
    # overwrite the axis edge values through fresh forms
    F = pj.OneForm.from_edge_dict(
        c, {(0, 1): 1.0, (0, 2): 0.0, (1, 2): 0.0, (0, 3): 0.0, (1, 3): 0.0}
    )
    G = pj.OneForm.from_edge_dict(
        c, {(0, 1): -1.0, (0, 2): 1.0, (1, 2): 1.0, (0, 3): 1.0, (1, 3): 1.0}
    )
    lam = pj.lambda_star(F, G, (0, 1))
    assert lam == 1.0
    assert F.value(0, 1) + lam * G.value(0, 1) == 0.0


def test_lambda_star_arithmetic():
    c = butterfly()
    F = pj.OneForm.from_edge_dict(
        c, {(0, 1): 2.0, (0, 2): 0.0, (1, 2): 0.0, (0, 3): 0.0, (1, 3): 0.0}
    )
    G = pj.OneForm.from_edge_dict(
        c, {(0, 1): 4.0, (0, 2): 1.0, (1, 2): 1.0, (0, 3): 1.0, (1, 3): 1.0}
    )
    assert pj.lambda_star(F, G, (0, 1)) == -0.5


def test_lambda_star_undefined():
    c = butterfly()
    F = pj.OneForm.from_edge_dict(
        c, {(0, 1): 2.0, (0, 2): 0.0, (1, 2): 0.0, (0, 3): 0.0, (1, 3): 0.0}
    )
    G = pj.OneForm.from_edge_dict(
        c, {(0, 1): 0.0, (0, 2): 1.0, (1, 2): 1.0, (0, 3): 1.0, (1, 3): 1.0}
    )
    assert pj.lambda_star(F, G, (0, 1)) is None


# ---------------------------------------------------------------- link_height


def test_link_height_average():
    # lambda* = 0, so H = F and h(2) = (F(02) + F(12)) / 2 = (1 + 3) / 2
    c = butterfly()
    F = pj.OneForm.from_edge_dict(
        c, {(0, 1): 0.0, (0, 2): 1.0, (1, 2): 3.0, (0, 3): 0.0, (1, 3): 0.0}
    )
    G = pj.OneForm.from_edge_dict(
        c, {(0, 1): -1.0, (0, 2): 1.0, (1, 2): 1.0, (0, 3): 1.0, (1, 3): 1.0}
    )
    assert pj.link_height(F, G, (0, 1), 2) == 2.0


def test_link_height_gradient_reduction():
    # f = x, g = x + y on u=(0,0), v=(1,0), w=(0.5,1): lambda* = -1 and
    # h = f - g = -y, so the link height is h(w) - h(u) = -1
    c = butterfly()
    x, y = c.positions[:, 0], c.positions[:, 1]
    F = pj.coboundary(pj.ScalarField(c, x))
    G = pj.coboundary(pj.ScalarField(c, x + y))
    assert pj.lambda_star(F, G, (0, 1)) == -1.0
    assert pj.link_height(F, G, (0, 1), 2) == -1.0


def test_link_height_degenerate_zero():
    c = butterfly()
    F = pj.OneForm.from_edge_dict(
        c, {(0, 1): 0.0, (0, 2): 1.5, (1, 2): -1.5, (0, 3): 0.0, (1, 3): 0.0}
    )
    G = pj.OneForm.from_edge_dict(
        c, {(0, 1): -1.0, (0, 2): 1.0, (1, 2): 1.0, (0, 3): 1.0, (1, 3): 1.0}
    )
    assert pj.link_height(F, G, (0, 1), 2) == 0.0


# ------------------------------------------------------- edge_multiplicity_2d


def test_2d_same_sign_sums_member():
    c, F, G = butterfly_forms(3.0, 4.0)
    assert pj.edge_multiplicity_2d(F, G, (0, 1)) == (1, False)


def test_2d_opposite_sign_sums_not_member():
    c, F, G = butterfly_forms(-2.0, 4.0)
    assert pj.edge_multiplicity_2d(F, G, (0, 1)) == (0, False)


def test_2d_epsilon_recovers_near_degenerate():
    c, F, G = butterfly_forms(-0.3, 4.0)
    assert pj.edge_multiplicity_2d(F, G, (0, 1), epsilon=0.5) == (1, True)
    assert pj.edge_multiplicity_2d(F, G, (0, 1), epsilon=0.0) == (0, False)


def test_2d_independent_gradients_never_member():
    # f = x, g = x + y have constant independent gradients (determinant
    # of the coefficient matrix is 1 everywhere), so no edge qualifies
    c = butterfly()
    x, y = c.positions[:, 0], c.positions[:, 1]
    F = pj.coboundary(pj.ScalarField(c, x))
    G = pj.coboundary(pj.ScalarField(c, x + y))
    mult, trig = pj.edge_multiplicity_2d(F, G, (0, 1))
    assert (mult, trig) == (0, False)
    # the two link sums are (-2, +2) in the fixture geometry
    assert pj.link_height(F, G, (0, 1), 2) == -1.0
    assert pj.link_height(F, G, (0, 1), 3) == 1.0


def test_2d_boundary_edge_raises():
    c, F, G = butterfly_forms(1.0, 1.0)
    with pytest.raises(pj.BoundaryEdgeError):
        pj.edge_multiplicity_2d(F, G, (0, 2))


def test_2d_tiny_denominator_is_robust():
    # G(01) denormal-small: the homogeneous sign test must not underflow
    c, F, G = butterfly_forms(3.0, 4.0, guv=-1e-300)
    assert pj.edge_multiplicity_2d(F, G, (0, 1)) == (1, False)
    c, F, G = butterfly_forms(-2.0, 4.0, guv=-1e-300)
    assert pj.edge_multiplicity_2d(F, G, (0, 1)) == (0, False)


# ------------------------------------------------- 3D multiplicity machinery


def test_link_sign_formula_examples():
    assert pj.multiplicity_from_link_signs(np.array([-1, 1, -1, 1])) == 1
    assert pj.multiplicity_from_link_signs(np.array([-1, -1, -1, -1])) == 1
    assert pj.multiplicity_from_link_signs(np.array([-1, 1, 1, 1])) == 0
    assert pj.multiplicity_from_link_signs(np.array([1, 1, 1, 1])) == 1


def test_link_sign_zero_raises():
    with pytest.raises(pj.ZeroLinkValueError):
        pj.multiplicity_from_link_signs(np.array([1, 0, -1]))


def test_3d_edge_multiplicity_from_forms():
    cases = [
        ((-1.0, 1.0, -1.0, 1.0), 1),
        ((-1.0, -1.0, -1.0, -1.0), 1),
        ((-1.0, 1.0, 1.0, 1.0), 0),
        ((1.0, 1.0, 1.0, 1.0), 1),
        ((-1.0, 1.0, -1.0, 1.0, -1.0, 1.0), 2),
    ]
    for values, expected in cases:
        c, F, G = bipyramid_forms(values)
        assert pj.edge_multiplicity_3d(F, G, (0, 1)) == expected


def test_3d_tie_break_deterministic():
    # ring vertex ids are all larger than the edge ids, so zero heights
    # resolve to positive under the symbolic perturbation
    c, F, G = bipyramid_forms((0.0, 1.0, 1.0, 1.0))
    assert pj.edge_multiplicity_3d(F, G, (0, 1)) == 1  # all positive
    c, F, G = bipyramid_forms((0.0, -1.0, -1.0, -1.0))
    assert pj.edge_multiplicity_3d(F, G, (0, 1)) == 0  # one arc of negatives


def test_3d_boundary_edge_raises():
    c, F, G = bipyramid_forms((1.0, 1.0, 1.0))
    with pytest.raises(pj.BoundaryEdgeError):
        pj.edge_multiplicity_3d(F, G, (0, 2))


# ------------------------------------------------------------ set assembly


def test_jacobi_set_g_zero_everywhere_skips_all():
    c = pj.generate_grid("T1", (0, 0, 1, 1), 0.25)
    rng = np.random.default_rng(7)
    F, _ = random_forms(c, rng)
    G = pj.OneForm.from_edge_dict(c, {tuple(map(int, e)): 0.0 for e in c.edges})
    j = pj.jacobi_set(c, F, G)
    assert len(j) == 0
    assert len(j.diagnostics.skipped_edges) == c.interior_edge_ids().size


def test_jacobi_set_f_equals_g_identity():
    c = pj.generate_grid("T1", (0, 0, 1, 1), 0.25)
    rng = np.random.default_rng(11)
    F, _ = random_forms(c, rng)
    j0 = pj.jacobi_set(c, F, F, epsilon=0.0)
    assert len(j0) == 0
    n_interior = c.interior_edge_ids().size
    assert len(j0.diagnostics.degenerate_edges) == n_interior
    j1 = pj.jacobi_set(c, F, F, epsilon=1e-9)
    assert len(j1) == n_interior
    assert j1.epsilon_triggered.all()


def test_jacobi_set_rejects_foreign_forms():
    c1 = pj.generate_grid("T1", (0, 0, 1, 1), 0.5)
    c2 = pj.generate_grid("T1", (0, 0, 1, 1), 0.5)
    rng = np.random.default_rng(0)
    F, G = random_forms(c2, rng)
    with pytest.raises(pj.FormFormatError):
        pj.jacobi_set(c1, F, G)


def test_jacobi_fn_independent_gradients_empty():
    c = pj.generate_grid("T1", (0, 0, 1, 1), 0.25)
    x, y = c.positions[:, 0], c.positions[:, 1]
    f = pj.ScalarField(c, x)
    g = pj.ScalarField(c, y)
    j = pj.jacobi_set_functions(c, f, g)
    assert len(j) == 0
    # horizontal edges have dg = 0 and are disregarded
    e = c.edges[c.interior_edge_ids()]
    n_horizontal = int(np.sum(y[e[:, 0]] == y[e[:, 1]]))
    assert len(j.diagnostics.skipped_edges) == n_horizontal


def test_jacobi_fn_f_equals_g_flagged():
    c = pj.generate_grid("T1", (0, 0, 1, 1), 0.25)
    rng = np.random.default_rng(13)
    f, _ = random_function_pair(c, rng)
    j = pj.jacobi_set_functions(c, f, f)
    assert len(j) == 0
    n_interior = c.interior_edge_ids().size
    assert len(j.diagnostics.degenerate_edges) == n_interior


def test_jacobi_set_edges_in_canonical_order():
    c = pj.generate_grid("T1", (0, 0, 1, 1), 0.1)
    rng = np.random.default_rng(17)
    F, G = random_forms(c, rng)
    j = pj.jacobi_set(c, F, G)
    assert len(j) > 0
    order = np.lexsort((j.edges[:, 1], j.edges[:, 0]))
    assert np.array_equal(order, np.arange(len(j)))


def test_jacobi_set_excludes_boundary_edges():
    c = pj.generate_grid("T2", (0, 0, 1, 1), 0.25)
    rng = np.random.default_rng(19)
    F, G = random_forms(c, rng)
    j = pj.jacobi_set(c, F, G)
    boundary = {tuple(map(int, e)) for e in c.edges[c.boundary_edge_mask]}
    assert not (j.edge_set() & boundary)
    assert len(j.diagnostics.boundary_edges) == int(c.boundary_edge_mask.sum())


def test_jacobi_set_vertices_are_edge_endpoints():
    c = pj.generate_grid("T1", (0, 0, 1, 1), 0.1)
    rng = np.random.default_rng(23)
    F, G = random_forms(c, rng)
    j = pj.jacobi_set(c, F, G)
    assert set(j.vertices.tolist()) == set(j.edges.ravel().tolist())


def test_jacobi_set_matches_per_edge_tests():
    # assembly must agree with the pure single-edge function on every
    # interior edge, which also exercises the deterministic-merge claim
    c = pj.generate_grid("T1", (0, 0, 1, 1), 0.2)
    rng = np.random.default_rng(29)
    F, G = random_forms(c, rng)
    j = pj.jacobi_set(c, F, G, epsilon=0.001)
    member = j.edge_set()
    for eid in c.interior_edge_ids():
        u, v = map(int, c.edges[eid])
        r = pj.edge_test(c, F, G, (u, v), epsilon=0.001)
        assert ((u, v) in member) == (r.multiplicity >= 1)


def test_edge_test_result_fields():
    c, F, G = butterfly_forms(3.0, 4.0)
    r = pj.edge_test(c, F, G, (0, 1))
    assert r.edge == (0, 1)
    assert r.lambda_star == 0.0
    assert r.multiplicity == 1
    assert r.epsilon_triggered is False
    assert len(r.link_values) == 2

    G0 = pj.OneForm.from_edge_dict(
        c, {(0, 1): 0.0, (0, 2): 1.0, (1, 2): 1.0, (0, 3): 1.0, (1, 3): 1.0}
    )
    r = pj.edge_test(c, F, G0, (0, 1))
    assert r.lambda_star is None
    assert r.multiplicity == 0

    with pytest.raises(pj.BoundaryEdgeError):
        pj.edge_test(c, F, G, (0, 2))


# ------------------------------------------------------------- invariances


def test_orientation_and_swap_invariance_on_grid():
    c = pj.generate_grid("T1", (0, 0, 1, 1), 0.2)
    rng = np.random.default_rng(31)
    F, G = random_forms(c, rng)
    j_fg = pj.jacobi_set(c, F, G)
    j_gf = pj.jacobi_set(c, G, F)
    assert j_fg.edge_set() == j_gf.edge_set()


def test_scale_invariance_power_of_two_exact():
    # scaling by powers of two is lossless in floating point, so the
    # homogeneous sign tests see exactly proportional inputs
    c = pj.generate_grid("T1", (0, 0, 1, 1), 0.2)
    rng = np.random.default_rng(37)
    F, G = random_forms(c, rng)
    sF = pj.OneForm.from_edge_dict(
        c, {(int(u), int(v)): 4.0 * F.value(u, v) for u, v in c.edges}
    )
    sG = pj.OneForm.from_edge_dict(
        c, {(int(u), int(v)): 0.5 * G.value(u, v) for u, v in c.edges}
    )
    a = pj.jacobi_set(c, F, G)
    b = pj.jacobi_set(c, sF, sG)
    assert a.edge_set() == b.edge_set()
    assert np.array_equal(a.multiplicities, b.multiplicities)


def test_scale_invariance_generic():
    c = pj.generate_grid("T1", (0, 0, 1, 1), 0.2)
    rng = np.random.default_rng(41)
    F, G = random_forms(c, rng)
    sF = pj.OneForm.from_edge_dict(
        c, {(int(u), int(v)): 2.7 * F.value(u, v) for u, v in c.edges}
    )
    sG = pj.OneForm.from_edge_dict(
        c, {(int(u), int(v)): 0.013 * G.value(u, v) for u, v in c.edges}
    )
    assert pj.jacobi_set(c, F, G).edge_set() == pj.jacobi_set(c, sF, sG).edge_set()


def test_epsilon_monotonicity_random_forms():
    c = pj.generate_grid("T1", (0, 0, 1, 1), 0.1)
    rng = np.random.default_rng(43)
    F, G = random_forms(c, rng)
    sets = [
        pj.jacobi_set(c, F, G, epsilon=e).edge_set()
        for e in (0.0, 1e-4, 1e-2, 1.0)
    ]
    assert all(a <= b for a, b in zip(sets, sets[1:]))


def test_even_degree_on_closed_surface():
    c = octahedron()
    rng = np.random.default_rng(47)
    for _ in range(50):
        f, g = random_function_pair(c, rng)
        rep = pj.degree_report(pj.jacobi_set_functions(c, f, g))
        assert rep.n_odd == 0


def test_even_degree_on_closed_3_manifold():
    c = s4_boundary()
    rng = np.random.default_rng(53)
    for _ in range(100):
        f, g = random_function_pair(c, rng)
        rep = pj.degree_report(pj.jacobi_set_functions(c, f, g))
        assert rep.n_odd == 0


def test_3d_gradient_equivalence():
    rng = np.random.default_rng(59)
    for c in (s4_boundary(), bipyramid(5)):
        for _ in range(50):
            f, g = random_function_pair(c, rng)
            jf = pj.jacobi_set_functions(c, f, g)
            jd = pj.jacobi_set(c, pj.coboundary(f), pj.coboundary(g))
            assert jf.edge_set() == jd.edge_set()
            assert np.array_equal(jf.multiplicities, jd.multiplicities)


def test_3d_multiplicity_two_from_functions():
    # alternating +-1 around a 6-ring with flat poles and g = -z puts the
    # axis edge in the set with multiplicity 2
    c = bipyramid(6)
    fv = np.zeros(c.nv)
    fv[2:] = [1.0, -1.0, 1.0, -1.0, 1.0, -1.0]
    gv = -c.positions[:, 2]
    j = pj.jacobi_set_functions(c, pj.ScalarField(c, fv), pj.ScalarField(c, gv))
    assert j.edge_set() == {(0, 1)}
    assert j.multiplicities.tolist() == [2]


# ------------------------------------------------------------------ reports


def test_degree_report_simple_path():
    # two edges sharing vertex 4 on the coarse grid: degrees 1, 2, 1
    c = pj.generate_grid("T1", (0, 0, 1, 1), 0.25)
    rng = np.random.default_rng(61)
    found = None
    for _ in range(200):
        F, G = random_forms(c, rng)
        j = pj.jacobi_set(c, F, G)
        if len(j) >= 1:
            found = j
            break
    assert found is not None
    rep = pj.degree_report(found)
    degs = found.degrees()
    assert rep.degrees == degs
    assert rep.n_even + rep.n_odd == len(degs)
    assert set(rep.odd_interior_vertices) <= set(rep.odd_vertices)


def test_degree_report_empty_set():
    c = pj.generate_grid("T1", (0, 0, 1, 1), 0.25)
    x = c.positions[:, 0]
    y = c.positions[:, 1]
    j = pj.jacobi_set_functions(c, pj.ScalarField(c, x), pj.ScalarField(c, y))
    rep = pj.degree_report(j)
    assert rep.degrees == {}
    assert rep.odd_vertices == []
    assert rep.n_even == 0 and rep.n_odd == 0


def test_jacobi_csv_roundtrip(tmp_path):
    c = pj.generate_grid("T1", (0, 0, 1, 1), 0.1)
    rng = np.random.default_rng(67)
    F, G = random_forms(c, rng)
    j = pj.jacobi_set(c, F, G, epsilon=0.01)
    path = tmp_path / "jacobi.csv"
    pj.write_jacobi_csv(j, path)
    first = path.read_text().splitlines()[0]
    assert first == "u,v,multiplicity,lambda_star,epsilon_triggered"
    rows = pj.read_jacobi_csv(path)
    assert len(rows) == len(j)
    for k, (u, v, mult, lam, trig) in enumerate(rows):
        assert (u, v) == tuple(map(int, j.edges[k]))
        assert mult == j.multiplicities[k]
        assert lam == j.lambda_stars[k]
        assert trig == bool(j.epsilon_triggered[k])


def test_report_sidecar_sections(tmp_path):
    c = pj.generate_grid("T1", (0, 0, 1, 1), 0.25)
    rng = np.random.default_rng(71)
    F, G = random_forms(c, rng)
    j = pj.jacobi_set(c, F, G)
    path = tmp_path / "jacobi.report"
    pj.write_report(j, path)
    text = path.read_text()
    for section in (
        "[skipped_edges]",
        "[degenerate_edges]",
        "[boundary_edges]",
        "[odd_degree_vertices]",
    ):
        assert section in text
    assert f"interior_edges {j.diagnostics.n_interior_edges}" in text
    assert f"jacobi_edges {len(j)}" in text
