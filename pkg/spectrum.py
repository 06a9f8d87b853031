"""
Stopping constant and length spectrum

Contributing polygons of a coded path carry perpendicular geodesics
(lambda-perp); the smallest distance between consecutive ones over all local
windows is the stopping constant c, and every closed geodesic of length <= l0
has combinatorial length <= ceil(l0 / c). The spectrum pipeline enumerates
admissible words up to that bound and groups them by length.
"""

import csv
import functools
import io
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from tqdm import tqdm

try:
    from .config_manager import TOOL_VERSION
    from .constants_store import get_limiting_words
    from .hyperbolic_core import (
        Geodesic, Isometry, Triplet, classify_and_length, geodesic_distance, geodesic_intersection,
        geodesic_through,
    )
    from .tiling import DirectedEdge, Tiling, VertexPath, get_tiling
    from .word_parser import WordParser
    from .words import (
        LEFT, SWITCH, CyclicWord, LimitingWords, PrefixPruner, Syllable, WordFormatError,
        combinatorial_length, enumerate_admissible, matrix_of_word, other_letter, turn_class,
    )
except ImportError:
    from config_manager import TOOL_VERSION
    from constants_store import get_limiting_words
    from hyperbolic_core import (
        Geodesic, Isometry, Triplet, classify_and_length, geodesic_distance, geodesic_intersection,
        geodesic_through,
    )
    from tiling import DirectedEdge, Tiling, VertexPath, get_tiling
    from word_parser import WordParser
    from words import (
        LEFT, SWITCH, CyclicWord, LimitingWords, PrefixPruner, Syllable, WordFormatError,
        combinatorial_length, enumerate_admissible, matrix_of_word, other_letter, turn_class,
    )

DISJOINT_TOL = 1e-12
LENGTH_GROUP_TOL = 1e-9
LENGTH_SLACK = 1e-9
TRACE_AGREEMENT = 1e-9


# ==================== Errors ====================
class PolygonError(ValueError):
    """Descriptor does not name a contributing polygon of the path"""


class DisjointnessError(RuntimeError):
    """Consecutive lambda-perp geodesics meet"""


class BoundViolationError(RuntimeError):
    """A word has length < c * L"""

    def __init__(self, message: str, word: Optional[CyclicWord] = None):
        super().__init__(message)
        self.word = word


# ==================== Data classes ====================
@dataclass(frozen=True)
class PolygonDescriptor:
    """
    Contributing polygon seen from a coded path

    Type I polygons share n >= 2 consecutive edges with the path on one side;
    type II polygons share a single edge between two switches (left side).
    """
    kind: str  # "I" or "II"
    side: str  # "L" or "R"
    first_edge: int
    n: int
    entry_type: str  # tail type of the first shared edge

    def shifted(self, offset: int) -> "PolygonDescriptor":
        return PolygonDescriptor(self.kind, self.side, self.first_edge - offset, self.n, self.entry_type)


@dataclass(frozen=True)
class LambdaPerpData:
    polygon: PolygonDescriptor
    geodesic: Geodesic
    foot: complex


@dataclass(frozen=True)
class Configuration:
    local_word: Tuple[Syllable, ...]
    polygons: Tuple[PolygonDescriptor, PolygonDescriptor]
    distance: float

    @property
    def case(self) -> str:
        return f"{self.polygons[0].kind}-{self.polygons[1].kind}"


@dataclass
class StoppingConstantReport:
    triplet: Triplet
    c: float
    configurations: List[Configuration]
    argmin: Configuration
    cases: Dict[str, int]
    window_syllables: int
    # windows are checked for admissibility on finite prefixes only
    scope: str = "finite-window admissible superset"


@dataclass
class SpectrumEntry:
    length: float
    multiplicity: int
    words: List[CyclicWord]


@dataclass
class SpectrumReport:
    entries: List[SpectrumEntry]
    metadata: Dict[str, object]
    collisions: List[str] = field(default_factory=list)


@dataclass
class BoundReport:
    triplet: Triplet
    c: float
    L_max: int
    checked: int
    min_ratio: float
    argmin: Optional[CyclicWord]


# ==================== Coded path geometry ====================
def _lambda_perp_from_frames(tiling: Tiling, desc: PolygonDescriptor, frames: Sequence[Isometry],
                             tail_types: Sequence[str]) -> LambdaPerpData:
    """
    Geodesic through the middle of the shared boundary and its opposite

    frames[i] and tail_types[i] describe the i-th path edge.
    """
    gd = tiling.gd
    if desc.n % 2 == 1:
        mid = desc.first_edge + (desc.n - 1) // 2
        edge = DirectedEdge(frames[mid], tail_types[mid])
        geodesic = tiling.strip_geodesic(edge)
        tail, head = edge.endpoints(gd)
        foot = geodesic_intersection(geodesic, geodesic_through(tail, head))
        if foot is None:
            foot = (tail + head) / 2
        return LambdaPerpData(desc, geodesic, foot)
    m = desc.first_edge + desc.n // 2 - 1
    r = tiling.triplet.r
    tail_a = tail_types[m] == "A"
    idx = 1 if tail_a else 0
    use_left = (desc.side == LEFT) == tail_a
    polygon = tiling.left_polygon if use_left else tiling.right_polygon
    vertex = frames[m].apply(polygon[idx])
    antipode = frames[m].apply(polygon[(idx + r) % (2 * r)])
    return LambdaPerpData(desc, geodesic_through(vertex, antipode), vertex)


class PathTracker:
    """
    Coded path grown one syllable at a time

    Edge 0 has the identity frame; the syllable pushed k-th is the turn at the
    head of edge k. Contributing polygons are reported once their extent is
    fixed, which needs a turn of another class on both sides.
    """

    def __init__(self, tiling: Tiling, tail_type: str):
        self.tiling = tiling
        self.t = tiling.triplet
        self.frames: List[Isometry] = [Isometry.identity()]
        self.tail_types: List[str] = [tail_type]
        self.syllables: List[Syllable] = []
        self.classes: List[str] = []
        self.items: List[LambdaPerpData] = []
        self._item_counts: List[int] = [0]

    def _completed(self, cls: str) -> Optional[PolygonDescriptor]:
        k = len(self.classes)
        if k == 0:
            return None
        prev = self.classes[-1]
        if prev == SWITCH and cls == SWITCH:
            return PolygonDescriptor("II", LEFT, k, 1, self.tail_types[k])
        if prev != SWITCH and cls != prev:
            j = k - 1
            while j > 0 and self.classes[j - 1] == prev:
                j -= 1
            if j > 0:
                return PolygonDescriptor("I", prev, j, k - j + 1, self.tail_types[j])
        return None

    def push(self, s: Syllable) -> Optional[LambdaPerpData]:
        """Append a turn; returns the polygon it completes, if any"""
        if s.vertex_type == self.tail_types[-1]:
            raise WordFormatError(f"syllable {s} does not alternate with the path", len(self.syllables))
        cls = turn_class(s, self.t)
        desc = self._completed(cls)
        self.syllables.append(s)
        self.classes.append(cls)
        self.frames.append(self.frames[-1] @ self.tiling.gd.step(s.letter, s.exponent))
        self.tail_types.append(s.vertex_type)
        item = None
        if desc is not None:
            item = _lambda_perp_from_frames(self.tiling, desc, self.frames, self.tail_types)
            self.items.append(item)
        self._item_counts.append(len(self.items))
        return item

    def pop(self):
        self.syllables.pop()
        self.classes.pop()
        self.frames.pop()
        self.tail_types.pop()
        self._item_counts.pop()
        del self.items[self._item_counts[-1]:]


def lambda_perp(local_path: VertexPath, polygon: PolygonDescriptor, t: Triplet) -> LambdaPerpData:
    """
    Lambda-perp geodesic of a contributing polygon of a vertex path

    Edge i of the path runs from vertices[i] to vertices[i + 1].

    Raises:
        PolygonError: the descriptor is not a contributing polygon of the path
    """
    tiling = get_tiling(t)
    verts = local_path.vertices
    n_edges = len(verts) - 1
    frames = [verts[i + 1].placement for i in range(n_edges)]
    tail_types = [verts[i].vtype for i in range(n_edges)]
    # class of the turn at the head of edge i
    classes = [turn_class(Syllable("a" if verts[i + 1].vtype == "A" else "b", local_path.code[i + 1]), t)
               if i + 1 < len(local_path.code) and local_path.code[i + 1] > 0 else None
               for i in range(n_edges)]
    first, last = polygon.first_edge, polygon.first_edge + polygon.n - 1
    if first < 0 or last >= n_edges:
        raise PolygonError(f"polygon edges {first}..{last} outside the path (edges 0..{n_edges - 1})")
    if polygon.kind == "I":
        if polygon.n < 2:
            raise PolygonError("type I polygons share at least two edges")
        if any(classes[i] != polygon.side for i in range(first, last)):
            raise PolygonError(f"turns along edges {first}..{last} are not all {polygon.side}")
    elif polygon.kind == "II":
        if polygon.n != 1 or first == 0:
            raise PolygonError("type II polygons share one edge after a switch")
        if classes[first - 1] != SWITCH or classes[first] != SWITCH:
            raise PolygonError(f"edge {first} is not between two switches")
    else:
        raise PolygonError(f"unknown polygon kind {polygon.kind!r}")
    desc = PolygonDescriptor(polygon.kind, polygon.side, first, polygon.n, tail_types[first])
    return _lambda_perp_from_frames(tiling, desc, frames, tail_types)


def lambda_perps_of_word(w: CyclicWord, t: Triplet, periods: int = 2) -> List[LambdaPerpData]:
    """Complete contributing polygons along a few periods of the coded path"""
    tracker = PathTracker(get_tiling(t), "B")
    for _ in range(periods):
        for s in w.syllables:
            tracker.push(s)
    return list(tracker.items)


# ==================== Stopping constant ====================
class _Bound:
    def __init__(self, word, n: int):
        self.text = word.letters(n)

    def prefix(self, n: int) -> str:
        return self.text[:n]


class _WindowSearch:
    """Depth-first windows from one leading syllable until two polygons complete"""

    def __init__(self, tiling: Tiling, lw: LimitingWords, max_syllables: int, disjoint_tol: float):
        self.tiling = tiling
        self.t = tiling.triplet
        self.max_syllables = max_syllables
        self.disjoint_tol = disjoint_tol
        cap = 4 * max_syllables * max(self.t.p, self.t.q) + 64
        self.bounds = {"a": (_Bound(lw.u_L, cap), _Bound(lw.u_R, cap)),
                       "b": (_Bound(lw.v_L, cap), _Bound(lw.v_R, cap))}
        self.letters = ""
        self.offsets: List[int] = []
        self.tracker: Optional[PathTracker] = None
        self.found: Dict[tuple, Configuration] = {}

    def _window_ok(self) -> bool:
        for off in self.offsets:
            x = self.letters[off:]
            lo, hi = self.bounds[x[0]]
            if x < lo.prefix(len(x)) or x > hi.prefix(len(x)):
                return False
        return True

    def run(self, first: Syllable) -> Dict[tuple, Configuration]:
        self.tracker = PathTracker(self.tiling, "B" if first.letter == "a" else "A")
        self._extend(first)
        return self.found

    def _record(self):
        tr = self.tracker
        i1, i2 = tr.items[0], tr.items[1]
        start = i1.polygon.first_edge
        end = i2.polygon.first_edge + i2.polygon.n - 1
        key = (tr.tail_types[start], tuple(tr.syllables[start:end]),
               i1.polygon.shifted(start), i2.polygon.shifted(start))
        if key in self.found:
            return
        sep = geodesic_distance(i1.geodesic, i2.geodesic)
        if sep.distance <= self.disjoint_tol:
            raise DisjointnessError(
                f"disjointness violated in window {WordParser.serialize(tr.syllables)}: "
                f"consecutive lambda-perp geodesics are {sep.relation} (distance {sep.distance:.3e})"
            )
        self.found[key] = Configuration(tuple(tr.syllables), (i1.polygon, i2.polygon), sep.distance)

    def _extend(self, s: Syllable):
        self.offsets.append(len(self.letters))
        self.letters += s.expand()
        self.tracker.push(s)
        try:
            if not self._window_ok():
                return
            if len(self.tracker.items) >= 2:
                self._record()
                return
            if len(self.tracker.syllables) >= self.max_syllables:
                return
            letter = other_letter(s.letter)
            top = self.t.p if letter == "a" else self.t.q
            for e in range(1, top):
                self._extend(Syllable(letter, e))
        finally:
            self.tracker.pop()
            self.offsets.pop()
            self.letters = self.letters[: len(self.letters) - s.exponent]


@functools.lru_cache(maxsize=None)
def _stopping_constant_cached(t: Triplet, disjoint_tol: float, threads: int) -> StoppingConstantReport:
    return _search_configurations(t, disjoint_tol, threads, show_progress=False)


def _search_configurations(t: Triplet, disjoint_tol: float, threads: int,
                           show_progress: bool) -> StoppingConstantReport:
    tiling = get_tiling(t)
    lw = get_limiting_words(t)
    window = 2 * t.r + 4
    starts = [Syllable("a", e) for e in range(1, t.p)] + [Syllable("b", f) for f in range(1, t.q)]

    def run_partition(s: Syllable) -> Dict[tuple, Configuration]:
        return _WindowSearch(tiling, lw, window, disjoint_tol).run(s)

    results: Dict[int, Dict[tuple, Configuration]] = {}
    if threads <= 1:
        for i, s in enumerate(tqdm(starts, desc="Searching configurations", disable=not show_progress)):
            results[i] = run_partition(s)
    else:
        with ThreadPoolExecutor(max_workers=threads) as executor:
            future_to_idx = {executor.submit(run_partition, s): i for i, s in enumerate(starts)}
            for future in tqdm(as_completed(future_to_idx), total=len(starts),
                               desc="Searching configurations", disable=not show_progress):
                results[future_to_idx[future]] = future.result()

    merged: Dict[tuple, Configuration] = {}
    for i in range(len(starts)):
        for key, conf in results[i].items():
            merged.setdefault(key, conf)
    if not merged:
        raise RuntimeError(f"no configurations found for {t}")
    configurations = sorted(merged.values(), key=lambda conf: conf.distance)
    cases: Dict[str, int] = {}
    for conf in configurations:
        cases[conf.case] = cases.get(conf.case, 0) + 1
    argmin = configurations[0]
    return StoppingConstantReport(t, argmin.distance, configurations, argmin, cases, window)


def stopping_constant(t: Triplet, disjoint_tol: float = DISJOINT_TOL, threads: int = 1,
                      show_progress: bool = False) -> StoppingConstantReport:
    """
    Minimum distance between consecutive lambda-perp geodesics over all windows

    Windows are syllable sequences of at most 2r + 4 syllables whose shifts pass
    the admissibility bounds on their finite prefixes; each window stops at the
    second complete contributing polygon. The result is memoized per triplet.

    Raises:
        DisjointnessError: two consecutive lambda-perp geodesics meet
    """
    if show_progress:
        report = _search_configurations(t, disjoint_tol, threads, show_progress=True)
        return report
    return _stopping_constant_cached(t, disjoint_tol, threads)


# ==================== Enumeration pruning ====================
class PathBand(PrefixPruner):
    """
    Prunes prefixes whose complete contributing polygons are already too far apart

    The closed geodesic crosses the lambda-perp geodesics in order, so the
    summed distances between consecutive complete ones bound its length.
    """

    def __init__(self, tiling: Tiling, limit: float):
        self.tracker = PathTracker(tiling, "B")
        self.limit = limit
        self.totals: List[float] = [0.0]

    def push(self, syllable: Syllable) -> bool:
        n_before = len(self.tracker.items)
        item = self.tracker.push(syllable)
        total = self.totals[-1]
        if item is not None and n_before > 0:
            total += geodesic_distance(self.tracker.items[-2].geodesic, item.geodesic).distance
        self.totals.append(total)
        return total <= self.limit

    def pop(self):
        self.tracker.pop()
        self.totals.pop()


# ==================== Spectrum ====================
def combinatorial_bound(ell0: float, c: float) -> int:
    return int(math.ceil(ell0 / c))


def group_by_length(items: Iterable[Tuple[float, CyclicWord, float]],
                    rel_tol: float = LENGTH_GROUP_TOL) -> Tuple[List[SpectrumEntry], List[str]]:
    """
    Group (length, word, |trace|) triples into entries

    Returns:
        (entries sorted by length, collision notes for groups whose traces disagree)
    """
    ordered = sorted(items, key=lambda x: (x[0], x[1].letters))
    entries: List[SpectrumEntry] = []
    collisions: List[str] = []
    traces: List[List[float]] = []
    for length, word, trace in ordered:
        if entries and abs(length - entries[-1].length) <= rel_tol * max(1.0, length):
            entries[-1].words.append(word)
            entries[-1].multiplicity += 1
            traces[-1].append(trace)
        else:
            entries.append(SpectrumEntry(length, 1, [word]))
            traces.append([trace])
    for entry in entries:
        entry.words.sort(key=lambda w: w.letters)
    for entry, tr in zip(entries, traces):
        if max(tr) - min(tr) > TRACE_AGREEMENT * max(1.0, max(tr)):
            collisions.append(f"length {entry.length:.15g}: traces {min(tr):.15g}..{max(tr):.15g} grouped")
    return entries, collisions


def fold_inverse_pairs(entries: List[SpectrumEntry], t: Triplet, lw: LimitingWords) -> List[SpectrumEntry]:
    """Count a class and its inverse once, keeping the lesser word of each pair"""
    tiling = get_tiling(t)
    folded = []
    for entry in entries:
        seen = set()
        kept = []
        for w in entry.words:
            if w in seen:
                continue
            inv = tiling.code_of_element(matrix_of_word(w, tiling.gd).inverse())
            if inv == lw.w_L:
                inv = lw.w_R
            seen.add(w)
            seen.add(inv)
            kept.append(w)
        folded.append(SpectrumEntry(entry.length, len(kept), kept))
    return folded


def compute_spectrum_report(t: Triplet, ell0: float, fold_inverses: bool = False, threads: int = 1,
                            show_progress: bool = False, slack: float = LENGTH_SLACK,
                            group_tol: float = LENGTH_GROUP_TOL, prune: bool = True) -> SpectrumReport:
    """
    Closed geodesic lengths up to ell0 with multiplicities

    Args:
        t: Hyperbolic triplet
        ell0: Length bound (> 0)
        fold_inverses: Count a class and its inverse once
        threads: Worker threads for the enumeration
        show_progress: Show progress bars
        slack: Absolute slack on the length filter
        group_tol: Relative tolerance of length grouping
        prune: Cut prefixes by accumulated lambda-perp distances

    Returns:
        SpectrumReport with entries sorted by length
    """
    if not ell0 > 0:
        raise ValueError(f"ell0 must be > 0 (got {ell0})")
    tiling = get_tiling(t)
    lw = get_limiting_words(t)
    c = stopping_constant(t, threads=threads).c
    L0 = combinatorial_bound(ell0, c)
    pruner_factory = (lambda: PathBand(tiling, ell0 + slack)) if prune else None
    words = enumerate_admissible(t, L0, lw, pruner_factory=pruner_factory, threads=threads,
                                 show_progress=show_progress)
    items = []
    for w in tqdm(list(words), desc="Evaluating lengths", disable=not show_progress):
        if w == lw.w_L:
            continue
        m = matrix_of_word(w, tiling.gd)
        cls = classify_and_length(m)
        if not cls.is_hyperbolic or cls.length > ell0 + slack:
            continue
        items.append((cls.length, w, abs(m.trace)))
    entries, collisions = group_by_length(items, group_tol)
    if fold_inverses:
        entries = fold_inverse_pairs(entries, t, lw)
    metadata = {
        "p": t.p, "q": t.q, "r": t.r,
        "ell0": ell0,
        "c": c,
        "L0": L0,
        "fold_inverses": fold_inverses,
        "tool_version": TOOL_VERSION,
        "source": "spectrum",
    }
    for note in collisions:
        print(f"[WARN] {note}", file=sys.stderr)
    return SpectrumReport(entries, metadata, collisions)


def length_spectrum(t: Triplet, ell0: float, **kwargs) -> List[SpectrumEntry]:
    return compute_spectrum_report(t, ell0, **kwargs).entries


def systole(t: Triplet, start: float = 1.0, max_ell0: float = 16.0) -> SpectrumEntry:
    """Shortest closed geodesic, found by doubling the length bound"""
    ell0 = start
    while ell0 <= max_ell0:
        entries = length_spectrum(t, ell0)
        if entries:
            return entries[0]
        ell0 *= 2.0
    raise RuntimeError(f"no closed geodesic of length <= {max_ell0} found for {t}")


def validate_bound(t: Triplet, L_max: int, threads: int = 1, show_progress: bool = False,
                   prune: bool = True, slack: float = LENGTH_SLACK) -> BoundReport:
    """
    Check length(w) >= c * L(w) for every admissible word with L <= L_max

    With prune set, a prefix whose accumulated lambda-perp distances already
    reach c * L_max is certified together with all of its extensions, and only
    the remaining words are evaluated through their traces.

    Raises:
        BoundViolationError: the first word violating the bound
    """
    tiling = get_tiling(t)
    lw = get_limiting_words(t)
    c = stopping_constant(t, threads=threads).c
    pruner_factory = (lambda: PathBand(tiling, c * L_max + slack)) if prune else None
    words = enumerate_admissible(t, L_max, lw, pruner_factory=pruner_factory, threads=threads,
                                 show_progress=show_progress)
    checked, best, argmin = 0, math.inf, None
    for w in tqdm(list(words), desc="Checking bound", disable=not show_progress):
        L = combinatorial_length(w, t, lw)
        cls = classify_and_length(matrix_of_word(w, tiling.gd))
        if not cls.is_hyperbolic or L == 0:
            continue
        ratio = cls.length / L
        checked += 1
        if ratio < best:
            best, argmin = ratio, w
        if ratio < c * (1.0 - 1e-12):
            raise BoundViolationError(
                f"bound violated by {w}: length {cls.length:.12g} < c*L = {c:.12g}*{L}", w
            )
    return BoundReport(t, c, L_max, checked, best, argmin)


# ==================== Result files ====================
def _entry_row(entry: SpectrumEntry) -> List[str]:
    return [f"{entry.length:.15g}", str(entry.multiplicity), WordParser.serialize_many(entry.words)]


def report_to_csv(report: SpectrumReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["length", "multiplicity", "words"])
    for entry in report.entries:
        writer.writerow(_entry_row(entry))
    return buf.getvalue()


def report_to_json(report: SpectrumReport) -> str:
    data = {
        "metadata": report.metadata,
        "entries": [
            {
                "length": float(f"{e.length:.15g}"),
                "multiplicity": e.multiplicity,
                "words": [WordParser.serialize(w) for w in e.words],
            }
            for e in report.entries
        ],
    }
    if report.collisions:
        data["collisions"] = report.collisions
    return json.dumps(data, ensure_ascii=False, indent=2)


def save_report(report: SpectrumReport, out: Optional[str] = None, fmt: str = "csv") -> str:
    """Serialize a report as csv or json; writes to out when given and returns the text"""
    if fmt == "csv":
        text = report_to_csv(report)
    elif fmt == "json":
        text = report_to_json(report) + "\n"
    else:
        raise ValueError(f"unknown format {fmt!r} (expected csv or json)")
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        with open(out, 'w', encoding='utf-8') as f:
            f.write(text)
    return text


def parse_report(text: str) -> SpectrumReport:
    """Read a report from csv or json text"""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        data = json.loads(stripped)
        entries = [SpectrumEntry(float(e["length"]), int(e["multiplicity"]),
                                 [WordParser.to_cyclic(w) for w in e["words"]])
                   for e in data.get("entries", [])]
        return SpectrumReport(entries, data.get("metadata", {}), data.get("collisions", []))
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames != ["length", "multiplicity", "words"]:
        raise ValueError(f"unexpected csv header {reader.fieldnames}")
    entries = [SpectrumEntry(float(row["length"]), int(row["multiplicity"]),
                             list(WordParser.parse_many(row["words"])))
               for row in reader]
    return SpectrumReport(entries, {})


def load_report(path: str) -> SpectrumReport:
    with open(path, 'r', encoding='utf-8') as f:
        return parse_report(f.read())
