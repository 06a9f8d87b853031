import math

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from hyperbolic_core import (
    BoundaryPoint, Geodesic, Isometry, MatrixIndex, NoAxisError, TriangleCheckInput, Triplet,
    TripletError, angle_at, axis, build_group, busemann, busemann_limit, classify_and_length,
    cw_distance, endpoints_interleave, face_polygon, fixed_points, from_disk, geodesic_distance,
    geodesic_distance_oracle, geodesic_intersection, geodesic_through, hyperbolic_distance,
    direct_angle_check, mu_upper_bound, rotation_about, same_side, to_disk, translation_length,
    triangle_inequality_holds, trig_pack,
)

HYPERBOLIC_TRIPLETS = [
    Triplet(p, q, r)
    for p in range(3, 10) for q in range(p, 10) for r in range(q, 10)
    if 1 / p + 1 / q + 1 / r < 1
]


def _line(x1: float, x2: float) -> Geodesic:
    return Geodesic(BoundaryPoint.from_real(x1), BoundaryPoint.from_real(x2))


# ==================== Triplets and generators ====================
@pytest.mark.parametrize("p,q,r", [(3, 3, 3), (2, 3, 7), (4, 3, 5), (6, 6, 3)])
def test_rejects_bad_triplets(p, q, r):
    with pytest.raises(TripletError):
        Triplet(p, q, r)


def test_triplet_error_is_value_error():
    with pytest.raises(ValueError):
        Triplet(3, 3, 3)


@pytest.mark.parametrize("t", HYPERBOLIC_TRIPLETS, ids=str)
def test_group_relations(t):
    gd = build_group(t)
    assert gd.gen_a.power(t.p).is_identity()
    assert gd.gen_b.power(t.q).is_identity()
    assert (gd.gen_a @ gd.gen_b).power(t.r).is_identity()
    assert abs(gd.gen_a.det - 1.0) < 1e-12
    assert abs(gd.gen_b.det - 1.0) < 1e-12


@pytest.mark.parametrize("t", HYPERBOLIC_TRIPLETS[:12], ids=str)
def test_product_is_rotation_of_order_r(t):
    gd = build_group(t)
    assert abs(abs((gd.gen_a @ gd.gen_b).trace) - 2 * math.cos(math.pi / t.r)) < 1e-9


def test_fundamental_triangle(gd337):
    assert abs(gd337.gen_a.apply(gd337.a0) - gd337.a0) < 1e-12
    assert abs(gd337.gen_b.apply(gd337.b0) - gd337.b0) < 1e-9
    assert abs(hyperbolic_distance(gd337.a0, gd337.b0) - gd337.side_ab) < 1e-12
    assert abs(hyperbolic_distance(gd337.b0, gd337.c0) - gd337.side_bc) < 1e-9
    assert abs(hyperbolic_distance(gd337.c0, gd337.a0) - gd337.side_ca) < 1e-9
    assert abs(angle_at(gd337.a0, gd337.b0, gd337.c0) - math.pi / 3) < 1e-9
    assert abs(angle_at(gd337.c0, gd337.a0, gd337.b0) - math.pi / 7) < 1e-9


def test_step_convention(gd337):
    assert gd337.step("a", 1).is_close(gd337.gen_a)
    assert gd337.step("b", 1).is_close(gd337.gen_b.inverse())
    assert gd337.step("b", 2).is_close(gd337.gen_b)
    assert gd337.step("a", 3).is_identity()


def test_face_polygon_is_regular(gd337):
    verts = face_polygon(gd337)
    assert len(verts) == 14
    sides = [hyperbolic_distance(verts[i], verts[(i + 1) % 14]) for i in range(14)]
    assert max(sides) - min(sides) < 1e-9


# ==================== Isometries ====================
def test_sign_normalization():
    assert Isometry.from_entries(-1.0, 0.0, 0.0, -1.0).is_identity()
    m = Isometry.from_entries(-2.0, 1.0, -3.0, 1.0)
    assert m.trace == 1.0


def test_inverse_and_conjugation(gd345):
    m = gd345.gen_a @ gd345.gen_b.power(2)
    assert (m @ m.inverse()).is_identity()
    g = gd345.gen_b
    assert m.conjugate_by(g).is_close(g.inverse() @ m @ g)


def test_rotation_about_fixes_center():
    z0 = 0.3 + 1.7j
    rot = rotation_about(z0, 1.1)
    assert abs(rot.apply(z0) - z0) < 1e-12
    assert rot.power(0).is_identity()


def test_classification():
    hyp = Isometry.from_entries(math.e, 0.0, 0.0, 1.0 / math.e)
    cls = classify_and_length(hyp)
    assert cls.is_hyperbolic
    assert abs(cls.length - 2.0) < 1e-12
    assert classify_and_length(Isometry.identity()).kind == "parabolic"
    assert classify_and_length(Isometry.from_entries(1.0, 1.0, 0.0, 1.0)).kind == "parabolic"
    assert classify_and_length(build_group(Triplet(3, 3, 4)).gen_a).kind == "elliptic"


def test_fixed_points_of_dilation():
    hyp = Isometry.from_entries(math.e, 0.0, 0.0, 1.0 / math.e)
    attracting, repelling = fixed_points(hyp)
    assert attracting.close_to(BoundaryPoint(0.0))
    assert repelling.close_to(BoundaryPoint(math.pi))
    g = axis(hyp)
    assert g.endpoint_pos.close_to(attracting)


def test_fixed_points_need_hyperbolic(gd337):
    with pytest.raises(NoAxisError):
        fixed_points(gd337.gen_a)


def test_fixed_points_are_fixed(gd337):
    m = Isometry.identity()
    for letter, e in (("a", 2), ("b", 1), ("a", 2), ("b", 1), ("a", 1), ("b", 1)):
        m = m @ gd337.step(letter, e)
    assert classify_and_length(m).is_hyperbolic
    for xi in fixed_points(m):
        assert m.apply_boundary(xi).close_to(xi, 1e-9)


# ==================== Boundary and geodesics ====================
def test_boundary_point_normalization():
    assert abs(BoundaryPoint(-math.pi / 2).angle - 1.5 * math.pi) < 1e-12
    assert BoundaryPoint.from_real(math.inf).angle == 0.0
    assert BoundaryPoint.from_real(0.0).close_to(BoundaryPoint(math.pi))
    assert abs(cw_distance(1.0, 0.5) - 0.5) < 1e-12
    assert abs(cw_distance(0.5, 1.0) - (2 * math.pi - 0.5)) < 1e-12


def test_disk_transform():
    assert abs(to_disk(1j)) < 1e-15
    assert abs(from_disk(0.5j) - from_disk(to_disk(from_disk(0.5j)))) < 1e-12


def test_concentric_semicircles_distance():
    sep = geodesic_distance(_line(-1.0, 1.0), _line(-math.e ** 2, math.e ** 2))
    assert sep.relation == "disjoint"
    assert abs(sep.distance - 2.0) < 1e-9


def test_crossing_geodesics():
    g1, g2 = _line(-1.0, 1.0), _line(0.0, math.inf)
    assert endpoints_interleave(g1, g2)
    sep = geodesic_distance(g1, g2)
    assert sep.relation == "crossing"
    assert sep.distance == 0.0
    assert abs(geodesic_intersection(g1, g2) - 1j) < 1e-9


def test_asymptotic_and_equal():
    assert geodesic_distance(_line(0.0, 1.0), _line(1.0, 2.0)).relation == "asymptotic"
    assert geodesic_distance(_line(0.0, 1.0), _line(1.0, 0.0)).relation == "equal"
    assert geodesic_intersection(_line(-1.0, 1.0), _line(2.0, 3.0)) is None


def test_geodesic_through_and_sides():
    g = geodesic_through(1j, 2j)
    assert g.same_as(_line(0.0, math.inf))
    assert g.endpoint_pos.close_to(BoundaryPoint.from_real(math.inf))
    assert same_side(g, 1 + 1j, 2 + 1j)
    assert not same_side(g, 1 + 1j, -1 + 1j)


@pytest.mark.parametrize("ends", [(-1.0, 1.0, 2.0, 5.0), (-3.0, -2.0, 0.5, 4.0), (0.1, 0.2, 0.3, 7.0)])
def test_distance_matches_minimization(ends):
    g1, g2 = _line(ends[0], ends[1]), _line(ends[2], ends[3])
    closed_form = geodesic_distance(g1, g2).distance
    assert abs(closed_form - geodesic_distance_oracle(g1, g2)) < 1e-6


# ==================== Busemann ====================
@given(angle=st.floats(0.0, 6.28), x=st.floats(-2.0, 2.0), y=st.floats(0.2, 5.0))
@settings(max_examples=40, deadline=None)
def test_busemann_closed_form_matches_limit(angle, x, y):
    xi = BoundaryPoint(angle)
    z = complex(x, y)
    assert abs(busemann(xi, z) - busemann_limit(xi, z)) < 1e-6


def test_busemann_zero_at_origin():
    assert abs(busemann(BoundaryPoint(1.0), 1j)) < 1e-12


# ==================== Distances under the group ====================
@given(
    exps=st.lists(st.tuples(st.integers(1, 2), st.integers(1, 3)), min_size=1, max_size=4),
    x=st.floats(-1.0, 1.0), y=st.floats(0.5, 3.0),
)
@settings(max_examples=30, deadline=None)
def test_group_elements_preserve_distance(exps, x, y):
    gd = build_group(Triplet(3, 4, 5))
    m = Isometry.identity()
    for e, f in exps:
        m = m @ gd.step("a", e) @ gd.step("b", f)
    z, w = complex(x, y), 1j
    assert abs(hyperbolic_distance(m.apply(z), m.apply(w)) - hyperbolic_distance(z, w)) < 1e-7


# ==================== Angle formulas ====================
def test_mu_bound_for_p3_r5():
    bound = mu_upper_bound(3, 5)
    assert abs(bound - 1.435) < 5e-3
    assert bound < math.pi / 2


def test_theta_for_334():
    report = trig_pack(Triplet(3, 3, 4))
    assert abs(report.theta_j["A"] - 2.672) < 5e-3
    assert report.theta_j["A"] < math.pi


def test_theta_for_344():
    report = trig_pack(Triplet(3, 4, 4))
    assert abs(report.theta_j["A"] - 2.579) < 5e-3
    assert abs(report.theta_j["B"] - 1.965) < 5e-3


def test_trig_pack_angles(t345):
    report = trig_pack(t345)
    assert 0 < report.phi_q < math.pi / 2
    assert 0 < report.psi_q < math.pi / 2
    assert abs(report.mu_q - report.phi_q - math.pi / 3) < 1e-12
    assert abs(report.nu_q - report.psi_q - math.pi / 4) < 1e-12


@pytest.mark.parametrize("t", [
    Triplet(p, q, r)
    for p in range(3, 13) for q in range(p, 13) for r in range(q, 13)
    if 1 / p + 1 / q + 1 / r < 1 and (p, q, r) not in {(3, 3, 4), (3, 4, 4)}
], ids=str)
def test_polygon_angles_below_right_angle(t):
    report = trig_pack(t)
    assert 0 < report.mu_q < math.pi / 2
    assert 0 < report.nu_q < math.pi / 2


def test_triangle_input_validation():
    with pytest.raises(ValueError):
        TriangleCheckInput.from_triangle(alpha=2.0, psi1=0.6, s1=1.0, s2=1.0)
    inp = TriangleCheckInput.from_triangle(alpha=1.0, psi1=0.5, s1=2.0, s2=1.5)
    assert inp.ell > 0 and inp.h > 0


# ==================== Matrix index ====================
def test_matrix_index_up_to_sign(gd337):
    index = MatrixIndex()
    m = gd337.step("a", 1) @ gd337.step("b", 2)
    assert index.insert_unique(m, "first")
    assert not index.insert_unique(Isometry(-m.matrix), "again")
    assert index.find(m) == ["first"]
    assert index.find(m, tag="other") == []
    assert len(index) == 1


# ==================== Disk form ====================
def test_disk_action_matches_half_plane(gd345):
    m = gd345.gen_a @ gd345.gen_b
    for z in (1j, 0.4 + 2j, -1.3 + 0.2j):
        assert abs(m.apply_disk(to_disk(z)) - to_disk(m.apply(z))) < 1e-9
    assert abs(translation_length(Isometry.from_entries(math.e, 0.0, 0.0, 1.0 / math.e)) - 2.0) < 1e-12


# ==================== Triangle criterion ====================
@given(
    alpha=st.floats(0.3, 2.5),
    psi_frac=st.floats(0.1, 0.9),
    d1=st.floats(0.05, 3.0),
    d2=st.floats(0.05, 3.0),
)
@settings(max_examples=60, deadline=None)
def test_cosine_criterion_matches_direct_angles(alpha, psi_frac, d1, d2):
    psi1 = psi_frac * (math.pi - alpha) / 2
    ell = TriangleCheckInput.from_triangle(alpha, psi1, 1.0, 2.0).ell
    s1 = ell + d1
    s2 = s1 + d2
    inp = TriangleCheckInput.from_triangle(alpha, psi1, s1, s2)
    lhs = math.cosh(s1) * (math.tanh(s1) / math.tanh(s2) - math.cos(alpha))
    rhs = (1 - math.cos(alpha)) * math.cosh(ell)
    assume(abs(lhs - rhs) > 1e-6 * max(1.0, rhs))
    assert triangle_inequality_holds(inp) == direct_angle_check(inp)
