import numpy as np
import pytest

from constants_store import get_limiting_words
from hyperbolic_core import (
    TWO_PI, BoundaryPoint, Isometry, NoAxisError, Triplet, build_group, classify_and_length,
    hyperbolic_distance, to_disk,
)
from tiling import (
    DEFAULT_TILING_OPTIONS, DirectedEdge, PathFollowingError, StripConvergenceError, Tiling, Vertex,
    _word_after_start, code_of_element, configure_tiling, follow_path, get_tiling, limiting_words_numeric,
    neighbors, normalize_periodic, spectacle_interval, xi_endpoint,
)
from words import PeriodicWord, enumerate_admissible, matrix_of_word, table_words

TEST_TRIPLETS = ["t337", "t344", "t345"]


@pytest.fixture(params=TEST_TRIPLETS)
def triplet(request):
    return request.getfixturevalue(request.param)


def _origin(vtype: str = "A") -> Vertex:
    return Vertex(Isometry.identity(), vtype)


# ==================== Strip ====================
def test_tiling_is_cached(t337):
    assert get_tiling(t337) is get_tiling(t337)


def test_strip_translation_fixes_xi0(triplet):
    tiling = get_tiling(triplet)
    t0 = tiling.strip_translation
    assert classify_and_length(t0).is_hyperbolic
    assert t0.apply_boundary(tiling.xi0).close_to(tiling.xi0, 1e-9)
    assert tiling.base_strip.endpoint_pos.close_to(tiling.xi0)


def test_midpoint_iteration_cap(gd337):
    with pytest.raises(StripConvergenceError):
        Tiling(gd337, max_polygons=1)


def test_face_polygons_share_the_base_edge(tiling337, gd337):
    for polygon in (tiling337.left_polygon, tiling337.right_polygon):
        assert len(polygon) == 14
        assert abs(polygon[0] - gd337.a0) < 1e-12
        assert abs(polygon[1] - gd337.b0) < 1e-9


# ==================== Graph ====================
def test_neighbors_count_and_frame_edge(triplet):
    t = triplet
    gd = build_group(t)
    edges_a = neighbors(_origin("A"), t)
    edges_b = neighbors(_origin("B"), t)
    assert len(edges_a) == t.p
    assert len(edges_b) == t.q
    assert edges_a[0].frame.is_identity()
    assert edges_b[0].frame.is_identity()
    for e in edges_a + edges_b:
        tail, head = e.endpoints(gd)
        assert abs(hyperbolic_distance(tail, head) - gd.side_ab) < 1e-9


def test_neighbors_share_the_tail(t345, gd345):
    for e in neighbors(_origin("B"), t345):
        assert abs(e.endpoints(gd345)[0] - gd345.b0) < 1e-9


def test_xi_endpoint_is_frame_image(t345, gd345):
    g = gd345.step("a", 1) @ gd345.step("b", 2)
    e = DirectedEdge(g, "A")
    data = xi_endpoint(e, t345)
    tiling = get_tiling(t345)
    assert data.xi.close_to(g.apply_boundary(tiling.xi0))
    assert data.geodesic.endpoint_pos.close_to(data.xi)
    assert len(data.edges) > 0


# ==================== Spectacle intervals ====================
@pytest.mark.parametrize("dual", [False, True])
def test_intervals_partition_the_circle(triplet, dual):
    for vtype in ("A", "B"):
        intervals = [spectacle_interval(e, triplet, dual) for e in neighbors(_origin(vtype), triplet)]
        assert abs(sum(i.measure for i in intervals) - TWO_PI) < 1e-9
        assert all(i.measure > 0 for i in intervals)
        for endpoint in [i.left for i in intervals] + [i.right for i in intervals]:
            assert sum(1 for i in intervals if i.contains(endpoint)) == 1
        for i in intervals:
            mid = BoundaryPoint(i.left.angle - i.measure / 2)
            assert sum(1 for j in intervals if j.contains(mid)) == 1


def test_interval_closed_ends(tiling337):
    regular = tiling337.base_interval("A", dual=False)
    dual = tiling337.base_interval("A", dual=True)
    assert regular.contains(regular.left) and not regular.contains(regular.right)
    assert dual.contains(dual.right) and not dual.contains(dual.left)


def test_select_turn_ties(tiling337):
    eta = tiling337.theta["A"][0]
    assert tiling337.select_turn("A", eta, dual=False) == (0, True)
    assert tiling337.select_turn("A", eta, dual=True) == (1, True)
    assert tiling337.select_turn("A", eta - 1e-3, dual=False) == (0, False)


# ==================== Path following ====================
def test_follow_path_shape(t337):
    path = follow_path(_origin(), BoundaryPoint(1.0), t337, max_steps=12)
    assert len(path.vertices) == 13
    assert len(path.code) == 12
    assert [v.vtype for v in path.vertices[:3]] == ["A", "B", "A"]
    assert len(path.syllables) == 11
    with pytest.raises(ValueError):
        follow_path(_origin(), BoundaryPoint(1.0), t337, max_steps=0)


def test_follow_path_reports_ties(tiling337):
    path = tiling337.follow_path(_origin(), tiling337.xi0, max_steps=4)
    assert path.boundary_ambiguous
    assert path.ties[0] == 0


@pytest.mark.parametrize("pqr", [(3, 3, 7), (3, 4, 4), (3, 4, 5)])
def test_busemann_decreases_along_paths(pqr):
    tiling = get_tiling(Triplet(*pqr))
    gd = tiling.gd
    rng = np.random.default_rng(sum(pqr))
    margins = []
    for _ in range(100):
        placement = Isometry.identity()
        for letter, top in (("a", gd.triplet.p), ("b", gd.triplet.q), ("a", gd.triplet.p)):
            placement = placement @ gd.step(letter, int(rng.integers(1, top)))
        start = Vertex(placement, "A" if rng.random() < 0.5 else "B")
        xi = BoundaryPoint(float(rng.uniform(0.0, 2 * np.pi)))
        margins.append(tiling.busemann_margin(tiling.follow_path(start, xi, max_steps=16), xi))
    # one margin for the whole triplet
    assert min(margins) > 1e-6


def test_path_approaches_target(tiling337, gd337):
    xi = BoundaryPoint(2.5)
    path = tiling337.follow_path(_origin(), xi, max_steps=40)
    end = to_disk(path.vertices[-1].position(gd337))
    assert abs(end - xi.to_complex()) < 0.2


# ==================== Coder ====================
def test_coder_rejects_non_hyperbolic(t337, gd337):
    with pytest.raises(NoAxisError):
        code_of_element(gd337.gen_a, t337)
    with pytest.raises(NoAxisError):
        code_of_element(Isometry.identity(), t337)


def test_coded_word_has_the_same_trace(t337, gd337):
    m = matrix_of_word(table_words(t337).u_L, gd337)
    coded = code_of_element(m, t337)
    assert abs(abs(matrix_of_word(coded, gd337).trace) - abs(m.trace)) < 1e-8


def test_coder_is_conjugacy_invariant(t345, gd345):
    lw = get_limiting_words(t345)
    merge = {lw.w_L: lw.w_R}
    g = gd345.step("b", 3) @ gd345.step("a", 1)
    words = [w for w in enumerate_admissible(t345, 3, lw) if len(w) >= 4][:5]
    assert words
    for w in words:
        m = matrix_of_word(w, gd345)
        moved = code_of_element(m.conjugate_by(g), t345)
        assert merge.get(moved, moved) == merge.get(code_of_element(m, t345), w)


def _round_trip(t, lw, L_max):
    tiling = get_tiling(t)
    exceptional = {lw.w_L, lw.w_R}
    for w in enumerate_admissible(t, L_max, lw):
        coded = tiling.code_of_element(matrix_of_word(w, tiling.gd))
        if w in exceptional:
            assert coded in exceptional
        else:
            assert coded == w


def test_coder_round_trip_small(t337, lw337):
    _round_trip(t337, lw337, 4)


@pytest.mark.slow
def test_coder_round_trip(t337, lw337):
    _round_trip(t337, lw337, 8)


# ==================== Limiting words ====================
@pytest.mark.parametrize("fixture", ["t337", "t344"])
def test_numeric_limiting_words_match_table(fixture, request):
    t = request.getfixturevalue(fixture)
    numeric = limiting_words_numeric(t, n_letters=60)
    tw = table_words(t)
    assert numeric.prefixes["u_L"] == tw.u_L.letters(60)
    assert numeric.prefixes["v_R"] == tw.v_R.letters(60)
    assert numeric.u_R.first_letter == "a"
    assert numeric.v_L.first_letter == "b"


def test_normalize_periodic():
    assert normalize_periodic("abab") == PeriodicWord("ab")
    assert normalize_periodic("ba", "a") == PeriodicWord("ab")
    assert normalize_periodic("ab", "bb") == PeriodicWord("ba", "b")
    assert normalize_periodic("aab" * 3) == PeriodicWord("aab")


def test_numeric_limiting_words_for_345(t345):
    numeric = limiting_words_numeric(t345, n_letters=40)
    assert numeric.u_R.first_letter == "a"
    assert numeric.v_L.first_letter == "b"


def test_word_after_start_drops_the_zero_start_turn():
    turns = [("a", 0), ("b", 1), ("a", 1), ("b", 2)]
    assert _word_after_start(turns, 2, 4) == PeriodicWord("bab")
    assert _word_after_start([("a", 1), ("b", 1)], 0, 2) == PeriodicWord("ba")
    with pytest.raises(PathFollowingError):
        _word_after_start([("a", 0), ("b", 1), ("a", 0), ("b", 1)], 1, 4)


def test_configured_options_reach_get_tiling(t337):
    configure_tiling(period_tol=1e-9)
    tiling = get_tiling(t337)
    assert tiling.period_tol == 1e-9
    assert get_tiling(t337) is tiling
    configure_tiling(max_polygons=1)
    with pytest.raises(StripConvergenceError):
        get_tiling(t337)
    configure_tiling()
    assert get_tiling(t337).period_tol == DEFAULT_TILING_OPTIONS["period_tol"]
    with pytest.raises(ValueError):
        configure_tiling(resolution=1.0)
