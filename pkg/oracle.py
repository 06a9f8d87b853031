"""
Brute-force ground truth: group elements in a syllable ball, classed by the
geometric coder, and comparison of two spectra
"""

import math
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from tqdm import tqdm

try:
    from .config_manager import TOOL_VERSION
    from .constants_store import get_limiting_words
    from .hyperbolic_core import Isometry, MatrixIndex, Triplet, build_group, classify_and_length
    from .spectrum import LENGTH_GROUP_TOL, LENGTH_SLACK, SpectrumEntry, SpectrumReport, group_by_length
    from .tiling import get_tiling
    from .words import CyclicWord, Syllable, format_syllables
except ImportError:
    from config_manager import TOOL_VERSION
    from constants_store import get_limiting_words
    from hyperbolic_core import Isometry, MatrixIndex, Triplet, build_group, classify_and_length
    from spectrum import LENGTH_GROUP_TOL, LENGTH_SLACK, SpectrumEntry, SpectrumReport, group_by_length
    from tiling import get_tiling
    from words import CyclicWord, Syllable, format_syllables

DEDUP_RESOLUTION = 1e-7
MATCH_TOL = 1e-6
CONJUGACY_RADIUS = 4
MAX_CONJUGACY_CHECKS = 20


@dataclass(frozen=True, eq=False)
class BallElement:
    matrix: Isometry
    word: Tuple[Syllable, ...]

    def __str__(self) -> str:
        return format_syllables(self.word) or "1"


@dataclass
class SpectrumDiff:
    missing: List[SpectrumEntry] = field(default_factory=list)
    extra: List[SpectrumEntry] = field(default_factory=list)
    mismatched: List[Tuple[float, int, int]] = field(default_factory=list)

    @property
    def is_empty(self) -> bool:
        return not (self.missing or self.extra or self.mismatched)

    def describe(self) -> List[str]:
        lines = [f"missing length {e.length:.12g} (multiplicity {e.multiplicity})" for e in self.missing]
        lines += [f"extra length {e.length:.12g} (multiplicity {e.multiplicity})" for e in self.extra]
        lines += [f"length {length:.12g}: multiplicity {m1} vs {m2}" for length, m1, m2 in self.mismatched]
        return lines


# ==================== Ball enumeration ====================
def iter_ball(t: Triplet, n_syllables: int, resolution: float = DEDUP_RESOLUTION,
              show_progress: bool = False) -> Iterator[BallElement]:
    """
    Breadth-first products of at most n_syllables alternating syllables

    A matrix already seen is not extended again: its extensions are products
    with no more syllables than the first word that reached it.
    """
    if n_syllables < 0:
        raise ValueError(f"n_syllables must be >= 0 (got {n_syllables})")
    gd = build_group(t)
    index = MatrixIndex(resolution=resolution)
    identity = BallElement(Isometry.identity(), ())
    index.add(identity.matrix, identity)
    yield identity
    frontier = [identity]
    for _ in tqdm(range(n_syllables), desc="Generating ball", disable=not show_progress):
        nxt = []
        for elem in frontier:
            last = elem.word[-1].letter if elem.word else None
            for letter, top in (("a", t.p), ("b", t.q)):
                if letter == last:
                    continue
                for e in range(1, top):
                    s = Syllable(letter, e)
                    m = elem.matrix @ gd.step(letter, e)
                    child = BallElement(m, elem.word + (s,))
                    if index.insert_unique(m, child):
                        nxt.append(child)
                        yield child
        frontier = nxt
        if not frontier:
            break


def ball_elements(t: Triplet, n_syllables: int, show_progress: bool = False,
                  resolution: float = DEDUP_RESOLUTION) -> List[BallElement]:
    """All distinct elements with at most n_syllables syllables (identity included)"""
    if n_syllables < 1:
        raise ValueError(f"n_syllables must be >= 1 (got {n_syllables})")
    return list(iter_ball(t, n_syllables, resolution=resolution, show_progress=show_progress))


def shortest_two_syllable_length(t: Triplet) -> float:
    gd = build_group(t)
    best = math.inf
    for e in range(1, t.p):
        for f in range(1, t.q):
            cls = classify_and_length(gd.step("a", e) @ gd.step("b", f))
            if cls.is_hyperbolic:
                best = min(best, cls.length)
    if math.isinf(best):
        raise RuntimeError(f"no hyperbolic two-syllable element for {t}")
    return best


def default_ball_radius(t: Triplet, ell0: float) -> int:
    """2 * ceil(ell0 / shortest two-syllable length) + 4"""
    return 2 * int(math.ceil(ell0 / shortest_two_syllable_length(t))) + 4


# ==================== Brute spectrum ====================
def _conjugacy_checks(t: Triplet, pairs: Sequence[Tuple[CyclicWord, Isometry, Isometry]], radius: int,
                      resolution: float) -> List[Dict[str, Optional[str]]]:
    """Search a small ball for a conjugator of each pair coded to one word"""
    if not pairs:
        return []
    ball = ball_elements(t, radius, resolution=resolution)
    checks = []
    for word, m1, m2 in pairs[:MAX_CONJUGACY_CHECKS]:
        g = conjugate_search(m1, m2, ball)
        checks.append({"word": str(word), "conjugator": str(g) if g is not None else None})
    return checks


def brute_spectrum_report(t: Triplet, ell0: float, n_syllables: Optional[int] = None,
                          show_progress: bool = False, slack: float = LENGTH_SLACK,
                          group_tol: float = LENGTH_GROUP_TOL, resolution: float = DEDUP_RESOLUTION,
                          conjugacy_radius: int = CONJUGACY_RADIUS) -> SpectrumReport:
    """
    Spectrum from the ball: hyperbolic elements of length <= ell0 coded and deduplicated

    The exceptional word w_L is merged into w_R so both pipelines use the same
    representative. Words coded twice with different lengths are reported in
    collisions, and each such pair is searched for a conjugator within
    conjugacy_radius syllables (metadata "conjugacy_checks").
    """
    if not ell0 > 0:
        raise ValueError(f"ell0 must be > 0 (got {ell0})")
    radius = n_syllables if n_syllables is not None else default_ball_radius(t, ell0)
    tiling = get_tiling(t)
    lw = get_limiting_words(t)
    classes: Dict[CyclicWord, Tuple[float, float, Isometry]] = {}
    collisions: List[str] = []
    suspicious: List[Tuple[CyclicWord, Isometry, Isometry]] = []
    ball_size = 0
    for elem in iter_ball(t, radius, resolution=resolution, show_progress=show_progress):
        ball_size += 1
        cls = classify_and_length(elem.matrix)
        if not cls.is_hyperbolic or cls.length > ell0 + slack:
            continue
        word = tiling.code_of_element(elem.matrix)
        if word == lw.w_L:
            word = lw.w_R
        trace = abs(elem.matrix.trace)
        if word in classes:
            known_length, _, known = classes[word]
            if abs(known_length - cls.length) > group_tol * max(1.0, cls.length):
                collisions.append(f"{word}: lengths {known_length:.15g} and {cls.length:.15g}")
                suspicious.append((word, known, elem.matrix))
            continue
        classes[word] = (cls.length, trace, elem.matrix)
    checks = _conjugacy_checks(t, suspicious, conjugacy_radius, resolution)
    for check in checks:
        if check["conjugator"] is None:
            collisions.append(f"{check['word']}: no conjugator within {conjugacy_radius} syllables")
    entries, grouped = group_by_length([(length, w, tr) for w, (length, tr, _) in classes.items()], group_tol)
    metadata = {
        "p": t.p, "q": t.q, "r": t.r,
        "ell0": ell0,
        "n_syllables": radius,
        "ball_size": ball_size,
        "dedup_resolution": resolution,
        "conjugacy_checks": checks,
        "tool_version": TOOL_VERSION,
        "source": "oracle",
    }
    return SpectrumReport(entries, metadata, collisions + grouped)


def brute_spectrum(t: Triplet, ell0: float, n_syllables: Optional[int] = None, **kwargs) -> List[SpectrumEntry]:
    return brute_spectrum_report(t, ell0, n_syllables, **kwargs).entries


# ==================== Comparison ====================
def compare_spectra(s1: Sequence[SpectrumEntry], s2: Sequence[SpectrumEntry],
                    tol: float = MATCH_TOL) -> SpectrumDiff:
    """
    Match entries by length within tol

    missing: entries of s1 without a partner in s2; extra: the reverse;
    mismatched: (length, multiplicity in s1, multiplicity in s2).
    """
    diff = SpectrumDiff()
    a = sorted(s1, key=lambda e: e.length)
    b = sorted(s2, key=lambda e: e.length)
    i = j = 0
    while i < len(a) and j < len(b):
        if abs(a[i].length - b[j].length) <= tol:
            if a[i].multiplicity != b[j].multiplicity:
                diff.mismatched.append((a[i].length, a[i].multiplicity, b[j].multiplicity))
            i += 1
            j += 1
        elif a[i].length < b[j].length:
            diff.missing.append(a[i])
            i += 1
        else:
            diff.extra.append(b[j])
            j += 1
    diff.missing.extend(a[i:])
    diff.extra.extend(b[j:])
    return diff


def conjugate_search(m1: Isometry, m2: Isometry, ball: Sequence[BallElement],
                     tol: float = 1e-8) -> Optional[BallElement]:
    """Ball element g with g m1 g^-1 = +-m2, or None"""
    for g in ball:
        if (g.matrix @ m1 @ g.matrix.inverse()).is_close(m2, tol):
            return g
    return None
