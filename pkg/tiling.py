"""
The tiling graph of a triangle group as isometry frames, spectacle intervals
built from strip geodesics, path following toward boundary points and the
geometric coder of hyperbolic elements.

A frame g places the base edge [A0, B0]: a vertex with placement g sits at
g(A0) or g(B0) according to its type, and its frame edge is g([A0, B0]).
"""

import functools
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

try:
    from .hyperbolic_core import (
        ANGLE_TOL, BoundaryPoint, Geodesic, GroupData, Isometry, MatrixIndex, NoAxisError,
        Triplet, angular_gap, build_group, busemann, classify_and_length, cw_distance,
        fixed_points, to_disk,
    )
    from .words import CyclicWord, PeriodicWord, Syllable, letters_of
except ImportError:
    from hyperbolic_core import (
        ANGLE_TOL, BoundaryPoint, Geodesic, GroupData, Isometry, MatrixIndex, NoAxisError,
        Triplet, angular_gap, build_group, busemann, classify_and_length, cw_distance,
        fixed_points, to_disk,
    )
    from words import CyclicWord, PeriodicWord, Syllable, letters_of

VTYPES = ("A", "B")
LETTER_OF = {"A": "a", "B": "b"}
DEFAULT_TILING_OPTIONS: Dict[str, float] = {
    "angle_tol": ANGLE_TOL,
    "period_tol": 1e-8,
    "midpoint_tol": 1e-12,
    "max_polygons": 200,
    "agreement_tol": 1e-10,
}


def other_type(vtype: str) -> str:
    return "B" if vtype == "A" else "A"


# ==================== Errors ====================
class StripConvergenceError(RuntimeError):
    """Strip midpoints failed to converge to the strip endpoint"""


class PathFollowingError(RuntimeError):
    """Path following left the expected regime or exceeded its step cap"""


# ==================== Data classes ====================
@dataclass(frozen=True, eq=False)
class Vertex:
    placement: Isometry
    vtype: str

    def position(self, gd: GroupData) -> complex:
        return self.placement.apply(gd.a0 if self.vtype == "A" else gd.b0)


@dataclass(frozen=True, eq=False)
class DirectedEdge:
    """Image of [A0, B0] under frame, traversed from its tail_type end"""
    frame: Isometry
    tail_type: str

    @property
    def tail(self) -> Vertex:
        return Vertex(self.frame, self.tail_type)

    @property
    def head(self) -> Vertex:
        return Vertex(self.frame, other_type(self.tail_type))

    def endpoints(self, gd: GroupData) -> Tuple[complex, complex]:
        return self.tail.position(gd), self.head.position(gd)


@dataclass(frozen=True)
class SpectacleInterval:
    """Clockwise boundary arc from left to right"""
    left: BoundaryPoint
    right: BoundaryPoint
    closed_left: bool
    closed_right: bool

    @property
    def measure(self) -> float:
        return cw_distance(self.left.angle, self.right.angle)

    def contains(self, xi: BoundaryPoint, tol: float = ANGLE_TOL) -> bool:
        if angular_gap(xi.angle, self.left.angle) < tol:
            return self.closed_left
        if angular_gap(xi.angle, self.right.angle) < tol:
            return self.closed_right
        return cw_distance(self.left.angle, xi.angle) < self.measure

    def image(self, m: Isometry) -> "SpectacleInterval":
        return SpectacleInterval(m.apply_boundary(self.left), m.apply_boundary(self.right),
                                 self.closed_left, self.closed_right)


@dataclass(frozen=True)
class StripData:
    edges: Tuple[DirectedEdge, ...]
    xi: BoundaryPoint
    geodesic: Geodesic


@dataclass
class VertexPath:
    """Vertices visited and the turn taken at each (relative to its frame edge)"""
    vertices: List[Vertex]
    code: List[int]
    ties: List[int] = field(default_factory=list)

    @property
    def boundary_ambiguous(self) -> bool:
        return bool(self.ties)

    @property
    def syllables(self) -> List[Syllable]:
        """Turns after the start vertex as syllables"""
        out = []
        for v, e in zip(self.vertices[1:], self.code[1:]):
            out.append(Syllable(LETTER_OF[v.vtype], e))
        return out


@dataclass(frozen=True)
class NumericLimitingWords:
    u_L: PeriodicWord
    u_R: PeriodicWord
    v_L: PeriodicWord
    v_R: PeriodicWord
    prefixes: Dict[str, str]


# ==================== Tiling ====================
Target = Union[BoundaryPoint, Isometry]


class Tiling:
    """
    Per-triplet tiling data: strip translation, spectacle angles and face polygons

    Args:
        gd: Group data
        angle_tol: Angle equality tolerance on the boundary
        period_tol: Relative tolerance of frame comparisons in the coder
        midpoint_tol: Convergence threshold of the strip midpoint iteration
        max_polygons: Cap on the midpoint iteration
        agreement_tol: Allowed gap between midpoint limit and fixed point
    """

    def __init__(self, gd: GroupData, angle_tol: float = DEFAULT_TILING_OPTIONS["angle_tol"],
                 period_tol: float = DEFAULT_TILING_OPTIONS["period_tol"],
                 midpoint_tol: float = DEFAULT_TILING_OPTIONS["midpoint_tol"],
                 max_polygons: int = DEFAULT_TILING_OPTIONS["max_polygons"],
                 agreement_tol: float = DEFAULT_TILING_OPTIONS["agreement_tol"]):
        self.gd = gd
        self.triplet = gd.triplet
        self.angle_tol = angle_tol
        self.period_tol = period_tol
        t = gd.triplet
        x1, y1 = gd.step("a", 1), gd.step("b", 1)
        x_left, y_right = gd.step("a", t.p - 1), gd.step("b", t.q - 1)

        # walks around the face polygons on both sides of the base edge
        self.left_frames = self._walk(y1, x_left)
        self.right_frames = self._walk(y_right, x1)
        self.left_polygon = self._polygon(self.left_frames)
        self.right_polygon = self._polygon(self.right_frames)

        r = t.r
        if t.r_is_odd:
            self.strip_translation = self.left_frames[r]
        else:
            self.strip_translation = self.left_frames[r] @ self.right_frames[r]
        self.xi0, self.xi0_back = fixed_points(self.strip_translation)
        self.base_strip = Geodesic(self.xi0_back, self.xi0)
        self._check_midpoints(midpoint_tol, max_polygons, agreement_tol)

        # spectacle boundary angles in the base frames, clockwise interval order
        a_theta = [gd.step("a", e).apply_boundary(self.xi0).angle for e in range(t.p)]
        b_theta = [gd.step("b", f).apply_boundary(self.xi0).angle for f in range(t.q)]
        self.theta = {"A": a_theta, "B": b_theta}
        a_order = [0] + list(range(t.p - 1, 0, -1))
        self._cw_entries = {
            "A": [(e, a_theta[e], a_theta[(e - 1) % t.p]) for e in a_order],
            "B": [(f, b_theta[(f - 1) % t.q], b_theta[f]) for f in range(t.q)],
        }

    def _walk(self, at_b: Isometry, at_a: Isometry) -> List[Isometry]:
        """Edge frames around a face polygon starting with the base edge A0 -> B0"""
        frames = [Isometry.identity()]
        vtype = "B"
        for _ in range(2 * self.triplet.r):
            frames.append(frames[-1] @ (at_b if vtype == "B" else at_a))
            vtype = other_type(vtype)
        return frames

    def _polygon(self, frames: Sequence[Isometry]) -> List[complex]:
        gd = self.gd
        verts = []
        for k in range(2 * self.triplet.r):
            # edge k runs from vertex k to vertex k + 1; even edges start at an A vertex
            verts.append(frames[k].apply(gd.a0 if k % 2 == 0 else gd.b0))
        return verts

    def _check_midpoints(self, tol: float, cap: int, agreement: float) -> None:
        mid = to_disk(1j * math.sqrt(self.gd.b0.imag))
        for _ in range(cap):
            nxt = self.strip_translation.apply_disk(mid)
            if abs(nxt - mid) < tol:
                limit = BoundaryPoint.from_complex(nxt)
                if angular_gap(limit.angle, self.xi0.angle) > agreement:
                    raise StripConvergenceError(
                        f"strip midpoints converge to {limit.angle:.12f}, fixed point at {self.xi0.angle:.12f}"
                    )
                return
            mid = nxt
        raise StripConvergenceError(f"strip midpoints did not converge within {cap} polygons")

    # ---------- graph ----------
    def neighbors(self, v: Vertex) -> List[DirectedEdge]:
        """Outgoing edges anticlockwise starting with the frame edge"""
        t = self.triplet
        if v.vtype == "A":
            return [DirectedEdge(v.placement @ self.gd.step("a", k), "A") for k in range(t.p)]
        return [DirectedEdge(v.placement @ self.gd.step("b", (t.q - k) % t.q), "B") for k in range(t.q)]

    def xi_endpoint(self, e: DirectedEdge, n_edges: int = 6) -> StripData:
        """Forward strip of opposite polygons from e and its limit point"""
        t0 = self.strip_translation
        edges = []
        g = e.frame
        for _ in range(n_edges):
            edges.append(DirectedEdge(g, "A"))
            if not self.triplet.r_is_odd:
                edges.append(DirectedEdge(g @ self.left_frames[self.triplet.r], "B"))
            g = g @ t0
        return StripData(tuple(edges), e.frame.apply_boundary(self.xi0), self.strip_geodesic(e))

    def strip_geodesic(self, e: DirectedEdge) -> Geodesic:
        return self.base_strip.image(e.frame)

    def base_interval(self, vtype: str, dual: bool) -> SpectacleInterval:
        """Interval of the frame edge at the base vertex of the given type"""
        _, left, right = next(entry for entry in self._cw_entries[vtype] if entry[0] == 0)
        return SpectacleInterval(BoundaryPoint(left), BoundaryPoint(right), not dual, dual)

    def spectacle_interval(self, e: DirectedEdge, dual: bool = False) -> SpectacleInterval:
        return self.base_interval(e.tail_type, dual).image(e.frame)

    # ---------- path following ----------
    def select_turn(self, vtype: str, eta: float, dual: bool) -> Tuple[int, bool]:
        """Turn whose interval contains the local target angle; second value flags a tie"""
        entries = self._cw_entries[vtype]
        for j, (idx, left, _) in enumerate(entries):
            if angular_gap(eta, left) < self.angle_tol:
                return (entries[j - 1][0] if dual else idx), True
        for idx, left, right in entries:
            if cw_distance(left, eta) < cw_distance(left, right):
                return idx, False
        raise PathFollowingError(f"angle {eta} not covered by the intervals at a {vtype} vertex")

    def follow_path(self, start: Vertex, xi: Target, dual: bool = False, max_steps: int = 50) -> VertexPath:
        """
        Follow the spectacles from start toward xi

        Args:
            start: Start vertex
            xi: Boundary target, or a hyperbolic isometry standing for its attracting point
            dual: Use the intervals closed on the right
            max_steps: Number of steps

        Returns:
            VertexPath with max_steps + 1 vertices; ties lists the steps decided on an endpoint
        """
        if max_steps < 1:
            raise ValueError("max_steps must be >= 1")
        g, vtype = start.placement, start.vtype
        matrix_target = isinstance(xi, Isometry)
        if matrix_target:
            local = xi.conjugate_by(g)
        else:
            eta = g.inverse().apply_boundary(xi)
        path = VertexPath([start], [])
        for step in range(max_steps):
            angle = fixed_points(local)[0].angle if matrix_target else eta.angle
            turn, tie = self.select_turn(vtype, angle, dual)
            if tie:
                path.ties.append(step)
            path.code.append(turn)
            z = self.gd.step(LETTER_OF[vtype], turn)
            g = g @ z
            vtype = other_type(vtype)
            path.vertices.append(Vertex(g, vtype))
            if matrix_target:
                local = local.conjugate_by(z)
            else:
                eta = z.inverse().apply_boundary(eta)
        return path

    def _periodic_turns(self, target: Isometry, start_type: str, dual: bool, max_steps: int,
                        frame_check: bool) -> Tuple[List[Tuple[str, int]], int, int]:
        """
        Follow toward the attracting point of target until the path repeats

        With frame_check the repeat must be the translation by target itself
        (g_k = target g_j), otherwise a repeated local state suffices.

        Returns:
            (turns, j, k) with the period made of turns[j:k]
        """
        index = MatrixIndex(resolution=1e-5, tol=self.period_tol)
        g = Isometry.identity()
        vtype = start_type
        frames: List[Isometry] = []
        turns: List[Tuple[str, int]] = []
        for step in range(max_steps):
            local = target.conjugate_by(g)
            for j in index.find(local, tag=vtype):
                if not frame_check or g.is_close(target @ frames[j], self.period_tol):
                    return turns, j, step
            index.add(local, step, tag=vtype)
            frames.append(g)
            turn, _ = self.select_turn(vtype, fixed_points(local)[0].angle, dual)
            letter = LETTER_OF[vtype]
            turns.append((letter, turn))
            g = g @ self.gd.step(letter, turn)
            vtype = other_type(vtype)
        raise PathFollowingError(f"no period found within {max_steps} steps")

    def code_of_element(self, m: Isometry, max_steps: int = 2000) -> CyclicWord:
        """
        Cyclic word of the periodic path along the axis of m

        Raises:
            NoAxisError: m is not hyperbolic
            PathFollowingError: no period within max_steps
        """
        if not classify_and_length(m).is_hyperbolic:
            raise NoAxisError(f"no axis: |trace| = {abs(m.trace):.12g} <= 2")
        turns, j, k = self._periodic_turns(m, "A", False, max_steps, frame_check=True)
        period = turns[j:k]
        if any(e == 0 for _, e in period):
            raise PathFollowingError("coded path backtracks along an edge")
        return CyclicWord(tuple(Syllable(letter, e) for letter, e in period))

    def limiting_words_numeric(self, n_letters: int = 60, max_steps: Optional[int] = None) -> NumericLimitingWords:
        """Extreme admissible codes from B0 (u words) and A0 (v words)"""
        gd = self.gd
        t0 = self.strip_translation
        steps = max_steps or 10 * (2 * self.triplet.r + 2)
        x1, y1 = gd.step("a", 1), gd.step("b", 1)
        targets = {
            "u_L": (t0, "B", False),
            "u_R": (y1 @ t0 @ y1.inverse(), "B", True),
            "v_L": (t0, "A", False),
            "v_R": (x1.inverse() @ t0 @ x1, "A", True),
        }
        words = {}
        for name, (target, start, dual) in targets.items():
            turns, j, k = self._periodic_turns(target, start, dual, steps, frame_check=False)
            words[name] = _word_after_start(turns, j, k)
        prefixes = {name: w.letters(n_letters) for name, w in words.items()}
        return NumericLimitingWords(prefixes=prefixes, **words)

    # ---------- diagnostics ----------
    def busemann_margin(self, path: VertexPath, xi: BoundaryPoint) -> float:
        """Smallest decrease of B_xi between consecutive same-type vertices"""
        values: Dict[str, List[float]] = {"A": [], "B": []}
        for v in path.vertices:
            values[v.vtype].append(busemann(xi, v.position(self.gd)))
        margin = float("inf")
        for seq in values.values():
            for a, b in zip(seq, seq[1:]):
                margin = min(margin, a - b)
        return margin


def _word_after_start(turns: List[Tuple[str, int]], j: int, k: int) -> PeriodicWord:
    """Periodic word of turns[0:j] + turns[j:k]^inf with the start turn dropped"""
    # the start turn is the frame edge itself and is usually 0
    if j >= 1:
        pre_turns, period_turns = turns[1:j], turns[j:k]
    else:
        pre_turns, period_turns = [], turns[1:k] + turns[0:1]
    if any(e == 0 for _, e in pre_turns + period_turns):
        raise PathFollowingError("limiting path backtracks along an edge")
    pre = [Syllable(letter, e) for letter, e in pre_turns]
    period = [Syllable(letter, e) for letter, e in period_turns]
    return normalize_periodic(letters_of(period), letters_of(pre))


def normalize_periodic(period: str, preperiod: str = "") -> PeriodicWord:
    """Shortest preperiod and minimal period"""
    while preperiod and preperiod[-1] == period[-1]:
        period = period[-1] + period[:-1]
        preperiod = preperiod[:-1]
    n = len(period)
    for d in range(1, n + 1):
        if n % d == 0 and period[:d] * (n // d) == period:
            period = period[:d]
            break
    return PeriodicWord(period, preperiod)


_tiling_options: Dict[str, float] = dict(DEFAULT_TILING_OPTIONS)


def configure_tiling(**options) -> None:
    """Set Tiling keyword options for later get_tiling calls; no arguments restores the defaults"""
    unknown = set(options) - set(DEFAULT_TILING_OPTIONS)
    if unknown:
        raise ValueError(f"unknown tiling options {sorted(unknown)}")
    _tiling_options.clear()
    _tiling_options.update(DEFAULT_TILING_OPTIONS)
    _tiling_options.update(options)


def get_tiling(t: Triplet) -> Tiling:
    """Cached Tiling of t built with the configured options"""
    return _cached_tiling(t, tuple(sorted(_tiling_options.items())))


@functools.lru_cache(maxsize=None)
def _cached_tiling(t: Triplet, options: Tuple[Tuple[str, float], ...]) -> Tiling:
    return Tiling(build_group(t), **dict(options))


# ==================== Module-level operations ====================
def neighbors(v: Vertex, t: Triplet) -> List[DirectedEdge]:
    return get_tiling(t).neighbors(v)


def xi_endpoint(e: DirectedEdge, t: Triplet) -> StripData:
    return get_tiling(t).xi_endpoint(e)


def spectacle_interval(e: DirectedEdge, t: Triplet, dual: bool = False) -> SpectacleInterval:
    return get_tiling(t).spectacle_interval(e, dual)


def follow_path(start: Vertex, xi: Target, t: Triplet, dual: bool = False, max_steps: int = 50) -> VertexPath:
    return get_tiling(t).follow_path(start, xi, dual, max_steps)


def code_of_element(m: Isometry, t: Triplet, max_steps: int = 2000) -> CyclicWord:
    return get_tiling(t).code_of_element(m, max_steps)


def limiting_words_numeric(t: Triplet, n_letters: int = 60) -> NumericLimitingWords:
    return get_tiling(t).limiting_words_numeric(n_letters)
