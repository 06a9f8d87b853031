"""
Word parser: reads and writes the syllable serialization of words

Syllables are written a^e / b^f or ae / bf (exponent 1 may be omitted),
joined without separators, e.g. a2ba2ba2b2. A trailing * marks a periodic
word and an optional preperiod is separated from the period by a dot:
b2a.ba2*.
"""

import re
from typing import Iterable, Optional, Tuple

try:
    from .hyperbolic_core import Triplet
    from .words import CyclicWord, PeriodicWord, Syllable, WordFormatError, format_syllables, letters_of, \
        validate_syllables
except ImportError:
    from hyperbolic_core import Triplet
    from words import CyclicWord, PeriodicWord, Syllable, WordFormatError, format_syllables, letters_of, \
        validate_syllables

_SYLLABLE = re.compile(r'([ab])(?:\^?(\d+))?')


class WordParser:
    """Word serialization parser"""

    @staticmethod
    def parse_syllables(text: str, offset: int = 0) -> Tuple[Syllable, ...]:
        """
        Parse a run of syllables without markers

        Args:
            text: Serialized syllables, whitespace allowed between syllables
            offset: Position of text inside the full input, for error reports

        Returns:
            Tuple of syllables in order (adjacent equal letters are kept apart)
        """
        out = []
        pos = 0
        while pos < len(text):
            if text[pos].isspace():
                pos += 1
                continue
            match = _SYLLABLE.match(text, pos)
            if not match:
                raise WordFormatError(f"unexpected character {text[pos]!r} at position {offset + pos}",
                                      offset + pos)
            exponent = int(match.group(2)) if match.group(2) else 1
            if exponent < 1:
                raise WordFormatError(f"zero exponent at position {offset + pos}", offset + pos)
            out.append(Syllable(match.group(1), exponent))
            pos = match.end()
        return tuple(out)

    @staticmethod
    def parse(text: str) -> Tuple[Tuple[Syllable, ...], Tuple[Syllable, ...], bool]:
        """
        Parse a serialized word

        Returns:
            (preperiod, syllables, periodic) where preperiod is empty unless
            the text has the form pre.period*
        """
        body = text.strip()
        lead = len(text) - len(text.lstrip())
        if not body:
            raise WordFormatError("empty word", 0)
        periodic = body.endswith("*")
        if periodic:
            body = body[:-1]
        star = body.find("*")
        if star >= 0:
            raise WordFormatError(f"'*' is only allowed at the end (position {lead + star})", lead + star)
        preperiod: Tuple[Syllable, ...] = ()
        dot = body.find(".")
        if dot >= 0:
            if not periodic:
                raise WordFormatError(f"preperiod marker without periodic suffix at position {lead + dot}",
                                      lead + dot)
            preperiod = WordParser.parse_syllables(body[:dot], lead)
            body_offset = lead + dot + 1
            body = body[dot + 1:]
        else:
            body_offset = lead
        syllables = WordParser.parse_syllables(body, body_offset)
        if not syllables:
            raise WordFormatError(f"missing syllables at position {body_offset}", body_offset)
        return preperiod, syllables, periodic

    @staticmethod
    def to_cyclic(text: str, t: Optional[Triplet] = None) -> CyclicWord:
        """
        Parse a cyclic word; the trailing * is optional

        Raises:
            WordFormatError: malformed text, a preperiod, or syllables out of range for t
        """
        preperiod, syllables, _ = WordParser.parse(text)
        if preperiod:
            raise WordFormatError("cyclic words have no preperiod", text.find("."))
        word = CyclicWord.from_letters(letters_of(syllables))
        if t is not None:
            validate_syllables(word.syllables, t)
        return word

    @staticmethod
    def to_periodic(text: str) -> PeriodicWord:
        preperiod, syllables, _ = WordParser.parse(text)
        return PeriodicWord(letters_of(syllables), letters_of(preperiod))

    @staticmethod
    def serialize(word: object, periodic: bool = False) -> str:
        """Serialize a CyclicWord, PeriodicWord or syllable sequence"""
        if isinstance(word, PeriodicWord):
            return str(word)
        if isinstance(word, CyclicWord):
            return format_syllables(word.syllables, periodic)
        return format_syllables(word, periodic)

    @staticmethod
    def serialize_many(words: Iterable[CyclicWord], sep: str = "|") -> str:
        return sep.join(WordParser.serialize(w) for w in words)

    @staticmethod
    def parse_many(text: str, sep: str = "|") -> Tuple[CyclicWord, ...]:
        if not text.strip():
            return ()
        return tuple(WordParser.to_cyclic(part) for part in text.split(sep))
