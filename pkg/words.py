"""
Words in the letters a, b: syllables, cyclic and periodic words, the table
words, lexicographic admissibility, enumeration of admissible cyclic words,
zigzag/switch factorization and combinatorial length.
"""

from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

from tqdm import tqdm

try:
    from .hyperbolic_core import GroupData, Isometry, Triplet
except ImportError:
    from hyperbolic_core import GroupData, Isometry, Triplet

LETTERS = ("a", "b")
LEFT, RIGHT, SWITCH = "L", "R", "S"


class WordFormatError(ValueError):
    """Malformed word text or syllable out of range"""

    def __init__(self, message: str, position: Optional[int] = None):
        super().__init__(message)
        self.position = position


class AdmissibilityError(ValueError):
    """Word fails the lexicographic admissibility criterion"""


def other_letter(letter: str) -> str:
    return "b" if letter == "a" else "a"


# ==================== Syllables ====================
@dataclass(frozen=True)
class Syllable:
    letter: str
    exponent: int

    def __post_init__(self):
        if self.letter not in LETTERS:
            raise WordFormatError(f"unknown letter {self.letter!r}")
        if self.exponent < 1:
            raise WordFormatError(f"exponent must be >= 1 (got {self.letter}{self.exponent})")

    def expand(self) -> str:
        return self.letter * self.exponent

    @property
    def vertex_type(self) -> str:
        """Type of the vertex where this turn is taken"""
        return "A" if self.letter == "a" else "B"

    def __str__(self) -> str:
        return self.letter if self.exponent == 1 else f"{self.letter}{self.exponent}"


def format_syllables(syllables: Iterable[Syllable], periodic: bool = False) -> str:
    text = "".join(str(s) for s in syllables)
    return text + "*" if periodic else text


def syllables_from_letters(letters: str) -> Tuple[Syllable, ...]:
    """Run-length encode an expanded a/b string"""
    out: List[Syllable] = []
    for ch in letters:
        if out and out[-1].letter == ch:
            out[-1] = Syllable(ch, out[-1].exponent + 1)
        else:
            out.append(Syllable(ch, 1))
    return tuple(out)


def letters_of(syllables: Iterable[Syllable]) -> str:
    return "".join(s.expand() for s in syllables)


def validate_syllables(syllables: Sequence[Syllable], t: Triplet) -> None:
    """Check exponent ranges and letter alternation"""
    for i, s in enumerate(syllables):
        top = t.p - 1 if s.letter == "a" else t.q - 1
        if not 1 <= s.exponent <= top:
            raise WordFormatError(
                f"syllable {i} ({s}) out of range: exponent of {s.letter} must be in 1..{top}"
            )
        if i > 0 and syllables[i - 1].letter == s.letter:
            raise WordFormatError(f"syllables {i - 1} and {i} share the letter {s.letter}")


def turn_class(s: Syllable, t: Triplet) -> str:
    """Sharpest left turn, sharpest right turn, or a switch"""
    if s.letter == "a":
        if s.exponent == t.p - 1:
            return LEFT
        if s.exponent == 1:
            return RIGHT
    else:
        if s.exponent == 1:
            return LEFT
        if s.exponent == t.q - 1:
            return RIGHT
    return SWITCH


def turn_classes(syllables: Sequence[Syllable], t: Triplet) -> List[str]:
    return [turn_class(s, t) for s in syllables]


def class_exponent(letter: str, side: str, t: Triplet) -> int:
    """Exponent that realizes a left or right turn for the given letter"""
    if letter == "a":
        return t.p - 1 if side == LEFT else 1
    return 1 if side == LEFT else t.q - 1


# ==================== Word types ====================
def _canonical_offset(letters: str, offsets: Sequence[int]) -> int:
    best = 0
    best_word = letters
    for off in offsets[1:]:
        rotated = letters[off:] + letters[:off]
        if rotated < best_word:
            best, best_word = off, rotated
    return best


def _syllable_offsets(syllables: Sequence[Syllable]) -> List[int]:
    offsets, pos = [], 0
    for s in syllables:
        offsets.append(pos)
        pos += s.exponent
    return offsets


@dataclass(frozen=True)
class CyclicWord:
    """
    Cyclically alternating syllable word, stored in canonical rotation

    The canonical rotation is the lexicographically least letter expansion
    among rotations at syllable boundaries, so it starts with the letter a.
    """
    syllables: Tuple[Syllable, ...]

    def __post_init__(self):
        syl = tuple(self.syllables)
        if not syl:
            raise WordFormatError("cyclic word must be nonempty")
        if len(syl) % 2:
            raise WordFormatError("cyclic word must have an even number of syllables")
        for i, s in enumerate(syl):
            if syl[i - 1].letter == s.letter:
                raise WordFormatError(f"syllables {(i - 1) % len(syl)} and {i} share the letter {s.letter}")
        letters = letters_of(syl)
        offsets = _syllable_offsets(syl)
        start = _canonical_offset(letters, offsets)
        idx = offsets.index(start)
        object.__setattr__(self, "syllables", syl[idx:] + syl[:idx])

    @classmethod
    def from_letters(cls, letters: str) -> "CyclicWord":
        syl = list(syllables_from_letters(letters))
        # merge the wrap-around run
        if len(syl) > 1 and syl[0].letter == syl[-1].letter:
            syl[0] = Syllable(syl[0].letter, syl[0].exponent + syl[-1].exponent)
            syl.pop()
        return cls(tuple(syl))

    @property
    def letters(self) -> str:
        return letters_of(self.syllables)

    def __len__(self) -> int:
        return len(self.syllables)

    def __str__(self) -> str:
        return format_syllables(self.syllables)

    def as_periodic(self) -> "PeriodicWord":
        return PeriodicWord(self.letters)


@dataclass(frozen=True)
class PeriodicWord:
    """Eventually periodic one-sided word preperiod + period^inf"""
    period: str
    preperiod: str = ""

    def __post_init__(self):
        if not self.period:
            raise WordFormatError("period must be nonempty")
        bad = set(self.period + self.preperiod) - set(LETTERS)
        if bad:
            raise WordFormatError(f"unexpected letters {sorted(bad)}")

    @classmethod
    def from_syllables(cls, period: Sequence[Syllable], preperiod: Sequence[Syllable] = ()) -> "PeriodicWord":
        return cls(letters_of(period), letters_of(preperiod))

    def letters(self, n: int) -> str:
        if n <= len(self.preperiod):
            return self.preperiod[:n]
        rest = n - len(self.preperiod)
        reps = rest // len(self.period) + 1
        return self.preperiod + (self.period * reps)[:rest]

    @property
    def first_letter(self) -> str:
        return self.letters(1)

    def __str__(self) -> str:
        pre = format_syllables(syllables_from_letters(self.preperiod)) if self.preperiod else ""
        if pre:
            pre += "."
        return pre + format_syllables(syllables_from_letters(self.period), periodic=True)


@dataclass(frozen=True)
class TableWords:
    u_L: PeriodicWord
    v_R: PeriodicWord
    w_L: CyclicWord
    w_R: CyclicWord


@dataclass(frozen=True)
class LimitingWords:
    u_L: PeriodicWord
    u_R: PeriodicWord
    v_L: PeriodicWord
    v_R: PeriodicWord
    w_L: CyclicWord
    w_R: CyclicWord

    def __post_init__(self):
        for name in ("u_L", "u_R"):
            if getattr(self, name).first_letter != "a":
                raise ValueError(f"{name} must start with a")
        for name in ("v_L", "v_R"):
            if getattr(self, name).first_letter != "b":
                raise ValueError(f"{name} must start with b")
        if not lex_less(self.u_L, self.u_R):
            raise ValueError("expected u_L < u_R")
        if not lex_less(self.v_L, self.v_R):
            raise ValueError("expected v_L < v_R")

    def bounds(self, letter: str) -> Tuple[PeriodicWord, PeriodicWord]:
        return (self.u_L, self.u_R) if letter == "a" else (self.v_L, self.v_R)


# ==================== Table words ====================
def table_words(t: Triplet) -> TableWords:
    """
    Limiting words u_L, v_R and the exceptional pair w_L, w_R by parity of r

    The odd-r w_L uses a^(p-2) in its last block, mirroring w_R.
    """
    p, q, r = t.p, t.q, t.r
    A = lambda e: "a" * e
    B = lambda f: "b" * f
    if t.r_is_odd:
        k = (r - 3) // 2
        u_l = (A(p - 1) + B(1)) * k + A(p - 1) + B(2)
        v_r = (B(q - 1) + A(1)) * k + B(q - 1) + A(2)
        w_l = (A(p - 1) + B(1)) * k + A(p - 2) + B(1)
        w_r = (B(q - 1) + A(1)) * k + B(q - 2) + A(1)
    else:
        k = (r - 2) // 2
        u_l = (A(p - 1) + B(1)) * k + A(p - 2) + (B(1) + A(p - 1)) * k + B(2)
        v_r = (B(q - 1) + A(1)) * k + B(q - 2) + (A(1) + B(q - 1)) * k + A(2)
        w_l = (A(p - 1) + B(1)) * k + A(p - 2) + B(1) + (A(p - 1) + B(1)) * (k - 1) + A(p - 2) + B(1)
        w_r = (B(q - 1) + A(1)) * k + B(q - 2) + A(1) + (B(q - 1) + A(1)) * (k - 1) + B(q - 2) + A(1)
    return TableWords(
        u_L=PeriodicWord(u_l),
        v_R=PeriodicWord(v_r),
        w_L=CyclicWord.from_letters(w_l),
        w_R=CyclicWord.from_letters(w_r),
    )


# ==================== Lexicographic order ====================
def lex_compare(u: PeriodicWord, v: PeriodicWord) -> int:
    """-1, 0, 1 with a < b; equality decided on the first |u| + |v| letters"""
    n = len(u.preperiod) + len(v.preperiod) + len(u.period) + len(v.period)
    x, y = u.letters(n), v.letters(n)
    return (x > y) - (x < y)


def lex_less(u: PeriodicWord, v: PeriodicWord) -> bool:
    return lex_compare(u, v) < 0


def _shift_words(w: CyclicWord) -> Iterator[Tuple[str, PeriodicWord]]:
    letters = w.letters
    for off in range(len(letters)):
        yield letters[off], PeriodicWord(letters[off:] + letters[:off])


def is_admissible(w: CyclicWord, lw: LimitingWords) -> bool:
    """
    Every shift of w^inf lies in the half-open interval of its first letter

    Shifts are taken at every letter position; the enumeration prunes its
    prefixes at syllable boundaries only and filters complete words here.
    """
    for letter, shift in _shift_words(w):
        lo, hi = lw.bounds(letter)
        if lex_compare(lo, shift) > 0 or lex_compare(shift, hi) >= 0:
            return False
    return True


# ==================== Matrices ====================
WordLike = Union[CyclicWord, PeriodicWord, Sequence[Syllable], str]


def _as_syllables(w: WordLike) -> Sequence[Syllable]:
    if isinstance(w, CyclicWord):
        return w.syllables
    if isinstance(w, PeriodicWord):
        return syllables_from_letters(w.period)
    if isinstance(w, str):
        return syllables_from_letters(w)
    return w


def matrix_of_word(w: WordLike, gd: GroupData) -> Isometry:
    """Ordered product of the syllable matrices (a = gen_a, b = gen_b^-1)"""
    m = Isometry.identity()
    for s in _as_syllables(w):
        m = m @ gd.step(s.letter, s.exponent)
    return m


# ==================== Contributing polygons ====================
class UnionFind:
    def __init__(self, items):
        self.parent = {x: x for x in items}
        self.size = {x: 1 for x in items}

    def find(self, x):
        y = self.parent[x]
        if self.parent[y] != y:
            y = self.parent[x] = self.find(y)
        return y

    def union(self, x, y):
        x, y = self.find(x), self.find(y)
        if x == y:
            return
        if self.size[x] < self.size[y]:
            x, y = y, x
        self.parent[y] = x
        self.size[x] += self.size[y]

    def components(self) -> Dict[object, List[object]]:
        comps: Dict[object, List[object]] = {}
        for x in self.parent:
            comps.setdefault(self.find(x), []).append(x)
        return comps


def count_contributing_polygons(classes: Sequence[str]) -> int:
    """
    Contributing polygons per period of a cyclic turn sequence

    Edge i joins the vertex with turn classes[i] to the next one. A left turn
    glues the left polygons of its two edges, a right turn the right ones.
    Polygons with two or more path edges count once each; an edge between two
    switches adds its isolated left polygon.
    """
    n = len(classes)
    uf = UnionFind([(side, i) for side in (LEFT, RIGHT) for i in range(n)])
    for i, cls in enumerate(classes):
        if cls in (LEFT, RIGHT):
            uf.union((cls, i - 1 if i > 0 else n - 1), (cls, i))
    count = sum(1 for members in uf.components().values() if len(members) >= 2)
    count += sum(1 for i in range(n) if classes[i] == SWITCH and classes[(i + 1) % n] == SWITCH)
    return count


def combinatorial_length(w: CyclicWord, t: Triplet, limiting: LimitingWords) -> int:
    """
    Number of orbits of contributing polygons along the coded path

    Raises:
        AdmissibilityError: w is not admissible
    """
    if not is_admissible(w, limiting):
        raise AdmissibilityError(f"word {w} is not admissible for {t}")
    return count_contributing_polygons(turn_classes(w.syllables, t))


def max_polygon_run(w: CyclicWord, t: Triplet) -> int:
    """Largest number of consecutive path edges on one face polygon"""
    classes = turn_classes(w.syllables, t)
    n = len(classes)
    if all(c == classes[0] for c in classes) and classes[0] != SWITCH:
        return n
    best = 1
    for i in range(n):
        if classes[i] == SWITCH or classes[i - 1] == classes[i]:
            continue
        k = 0
        while k < n and classes[(i + k) % n] == classes[i]:
            k += 1
        best = max(best, k + 1)
    return best


# ==================== Zigzag factorization ====================
@dataclass(frozen=True)
class Factor:
    """Uni-polygonal factor e_X^sign(n): n shared edges, n - 1 turns"""
    start_type: str  # type of the vertex before the first turn
    sign: str  # "-" left, "+" right, "" for the empty factor
    n: int

    def expand(self, t: Triplet) -> List[Syllable]:
        letter = "b" if self.start_type == "A" else "a"
        side = LEFT if self.sign == "-" else RIGHT
        out = []
        for _ in range(self.n - 1):
            out.append(Syllable(letter, class_exponent(letter, side, t)))
            letter = other_letter(letter)
        return out

    def __str__(self) -> str:
        return f"e_{self.start_type}^{self.sign or '0'}({self.n})"


@dataclass(frozen=True)
class ZigzagFactorization:
    zigzags: Tuple[Tuple[Factor, ...], ...]
    switches: Tuple[Syllable, ...]
    anchor: Optional[Factor] = None

    def reassemble(self, t: Triplet) -> CyclicWord:
        out: List[Syllable] = []
        if self.anchor is not None:
            out.extend(self.anchor.expand(t))
            for f in self.zigzags[0] if self.zigzags else ():
                out.extend(f.expand(t))
        else:
            for zig, sw in zip(self.zigzags, self.switches):
                for f in zig:
                    out.extend(f.expand(t))
                out.append(sw)
        return CyclicWord(tuple(out))

    def describe(self) -> str:
        parts = []
        if self.anchor is not None:
            parts.append(f"[{self.anchor}]")
            parts.append("(" + " ".join(str(f) for f in (self.zigzags[0] if self.zigzags else ())) + ")")
        else:
            for zig, sw in zip(self.zigzags, self.switches):
                parts.append("(" + " ".join(str(f) for f in zig) + ")")
                parts.append(str(sw))
        return " ".join(parts)


def _factor_runs(syllables: Sequence[Syllable], classes: Sequence[str]) -> List[Factor]:
    factors: List[Factor] = []
    i = 0
    while i < len(syllables):
        j = i
        while j < len(syllables) and classes[j] == classes[i]:
            j += 1
        start_type = "B" if syllables[i].letter == "a" else "A"
        sign = "-" if classes[i] == LEFT else "+"
        factors.append(Factor(start_type, sign, j - i + 1))
        i = j
    return factors


def zigzag_factorize(w: CyclicWord, t: Triplet) -> ZigzagFactorization:
    """
    Split w into zigzags separated by switches

    Without switches the first maximal run in canonical rotation is the
    anchor and the remaining runs form the single zigzag.
    """
    syl = list(w.syllables)
    classes = turn_classes(syl, t)
    n = len(syl)
    if SWITCH in classes:
        first = classes.index(SWITCH)
        order = list(range(first + 1, n)) + list(range(first + 1))
        syl = [syl[i] for i in order]
        classes = [classes[i] for i in order]
        zigzags, switches = [], []
        current: List[int] = []
        for i, cls in enumerate(classes):
            if cls == SWITCH:
                if current:
                    zigzags.append(tuple(_factor_runs([syl[k] for k in current], [classes[k] for k in current])))
                else:
                    zigzags.append((Factor(syl[i - 1].vertex_type if i else syl[-1].vertex_type, "", 1),))
                switches.append(syl[i])
                current = []
            else:
                current.append(i)
        return ZigzagFactorization(tuple(zigzags), tuple(switches))

    # switchless: rotate to a run boundary
    start = next((i for i in range(n) if classes[i] != classes[i - 1]), 0)
    syl = syl[start:] + syl[:start]
    classes = classes[start:] + classes[:start]
    runs = _factor_runs(syl, classes)
    return ZigzagFactorization((tuple(runs[1:]),), (), anchor=runs[0])


def zigzag_length(fact: ZigzagFactorization) -> int:
    """Sum of factor counts over zigzags, or L(zeta_0) + 1 without switches"""
    if fact.anchor is not None:
        return len(fact.zigzags[0] if fact.zigzags else ()) + 1
    return sum(len(z) for z in fact.zigzags)


def zigzag_word(start_type: str, sign: str, ns: Sequence[int], t: Triplet) -> List[Syllable]:
    """Expand z_X^sign(n_1, ..., n_k): factors with alternating signs"""
    out: List[Syllable] = []
    for n in ns:
        out.extend(Factor(start_type, sign, n).expand(t))
        if n > 1:
            last = out[-1]
            start_type = last.vertex_type
        sign = "+" if sign == "-" else "-"
    return out


# ==================== Enumeration ====================
class PrefixPruner:
    """Hook protocol for enumerate_admissible: push a syllable, then pop it"""

    def push(self, syllable: Syllable) -> bool:
        return True

    def pop(self) -> None:
        return None


class _Bound:
    def __init__(self, word: PeriodicWord):
        self.word = word
        self._cache = word.letters(256)

    def prefix(self, n: int) -> str:
        if n > len(self._cache):
            self._cache = self.word.letters(max(n, 2 * len(self._cache)))
        return self._cache[:n]


class _PrefixSearch:
    """Depth-first syllable extension with interval and length pruning"""

    def __init__(self, t: Triplet, L_max: int, lw: LimitingWords, pruner: Optional[PrefixPruner]):
        self.t = t
        self.L_max = L_max
        self.lw = lw
        self.pruner = pruner
        self.max_syllables = L_max * (t.r - 1)
        self.bounds = {letter: tuple(_Bound(x) for x in lw.bounds(letter)) for letter in LETTERS}
        self.syllables: List[Syllable] = []
        self.classes: List[str] = []
        self.offsets: List[int] = []
        self.letters = ""
        self.completed: List[int] = [0]
        self.found: List[CyclicWord] = []

    def _prefix_ok(self) -> bool:
        nxt = other_letter(self.letters[-1])
        for off in self.offsets:
            x = self.letters[off:] + nxt
            lo, hi = self.bounds[x[0]]
            n = len(x)
            if x < lo.prefix(n) or x > hi.prefix(n):
                return False
        return True

    def _completed_after(self, cls: str) -> int:
        """Completed polygon count once a syllable of class cls is appended"""
        count = self.completed[-1]
        k = len(self.classes)
        if k == 0:
            return count
        prev = self.classes[-1]
        if prev == SWITCH and cls == SWITCH:
            return count + 1
        if prev != SWITCH and cls != prev:
            j = k - 1
            while j > 0 and self.classes[j - 1] == prev:
                j -= 1
            if j > 0:
                return count + 1
        return count

    def _is_canonical(self) -> bool:
        letters = self.letters
        for off in self.offsets[1:]:
            if letters[off:] + letters[:off] < letters:
                return False
        return True

    def run(self, first: Syllable) -> List[CyclicWord]:
        self._extend(first)
        return self.found

    def _extend(self, s: Syllable) -> None:
        cls = turn_class(s, self.t)
        completed = self._completed_after(cls)
        if completed > self.L_max:
            return
        self.offsets.append(len(self.letters))
        self.syllables.append(s)
        self.classes.append(cls)
        self.letters += s.expand()
        self.completed.append(completed)
        pushed = False
        try:
            if not self._prefix_ok():
                return
            if self.pruner is not None:
                pushed = True
                if not self.pruner.push(s):
                    return
            if s.letter == "b" and self._is_canonical():
                w = CyclicWord(tuple(self.syllables))
                if (count_contributing_polygons(self.classes) <= self.L_max
                        and is_admissible(w, self.lw)):
                    self.found.append(w)
            if len(self.syllables) < self.max_syllables:
                letter = other_letter(s.letter)
                top = self.t.p if letter == "a" else self.t.q
                for e in range(1, top):
                    self._extend(Syllable(letter, e))
        finally:
            if pushed:
                self.pruner.pop()
            self.offsets.pop()
            self.syllables.pop()
            self.classes.pop()
            self.letters = self.letters[: len(self.letters) - s.exponent]
            self.completed.pop()


def enumerate_admissible(t: Triplet, L_max: int, lw: LimitingWords,
                         pruner_factory: Optional[Callable[[], PrefixPruner]] = None,
                         threads: int = 1, show_progress: bool = False) -> Iterator[CyclicWord]:
    """
    All admissible canonical cyclic words with combinatorial length <= L_max

    The search is partitioned by the first syllable a^e; partitions run on a
    thread pool and are merged in lexicographic order of the letter expansion.

    Args:
        t: Hyperbolic triplet
        L_max: Bound on the combinatorial length
        lw: Limiting words of t
        pruner_factory: Optional factory of prefix pruning hooks (one per partition)
        threads: Worker threads
        show_progress: Show a progress bar over partitions
    """
    if L_max <= 0:
        return iter(())

    def run_partition(e: int) -> List[CyclicWord]:
        pruner = pruner_factory() if pruner_factory is not None else None
        return _PrefixSearch(t, L_max, lw, pruner).run(Syllable("a", e))

    exponents = list(range(1, t.p))
    results: Dict[int, List[CyclicWord]] = {}
    if threads <= 1:
        for e in tqdm(exponents, desc="Enumerating words", disable=not show_progress):
            results[e] = run_partition(e)
    else:
        with ThreadPoolExecutor(max_workers=threads) as executor:
            future_to_exp = {executor.submit(run_partition, e): e for e in exponents}
            for future in tqdm(as_completed(future_to_exp), total=len(exponents),
                               desc="Enumerating words", disable=not show_progress):
                results[future_to_exp[future]] = future.result()
    merged = [w for e in exponents for w in results[e]]
    merged.sort(key=lambda w: w.letters)
    return iter(merged)
