"""
Derived limiting words cache

u_R and v_L come from dual path following and are stored per triplet as
limiting_{p}_{q}_{r}.json in the constants directory, together with the
numeric u_L and v_R used to cross-check the closed-form table words.
"""

import json
import sys
import threading
from pathlib import Path
from typing import Dict, Optional

try:
    from .config_manager import TOOL_VERSION, get_config
    from .hyperbolic_core import ANGLE_TOL, Triplet
    from .tiling import get_tiling
    from .word_parser import WordParser
    from .words import LimitingWords, PeriodicWord, lex_compare, table_words
except ImportError:
    from config_manager import TOOL_VERSION, get_config
    from hyperbolic_core import ANGLE_TOL, Triplet
    from tiling import get_tiling
    from word_parser import WordParser
    from words import LimitingWords, PeriodicWord, lex_compare, table_words

_lock = threading.Lock()
_memory: Dict[tuple, LimitingWords] = {}
_directory_override: Optional[Path] = None

NUMERIC_KEYS = ("u_L", "u_R", "v_L", "v_R")


def use_directory(directory: Optional[Path]):
    """Default constants directory for calls without an explicit one"""
    global _directory_override
    _directory_override = Path(directory) if directory is not None else None


def resolve_directory(directory: Optional[Path] = None) -> Path:
    if directory is not None:
        return Path(directory)
    if _directory_override is not None:
        return _directory_override
    return get_config().get_constants_dir()


def constants_path(t: Triplet, directory: Optional[Path] = None) -> Path:
    directory = resolve_directory(directory)
    return directory / f"limiting_{t.p}_{t.q}_{t.r}.json"


def _derive(t: Triplet) -> Dict[str, PeriodicWord]:
    numeric = get_tiling(t).limiting_words_numeric()
    return {key: getattr(numeric, key) for key in NUMERIC_KEYS}


def _load(path: Path) -> Optional[Dict[str, PeriodicWord]]:
    if not path.exists():
        return None
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = json.load(f)
        return {key: WordParser.to_periodic(data["words"][key]) for key in NUMERIC_KEYS}
    except Exception as e:
        print(f"[WARN] Ignoring constants file {path}: {e}", file=sys.stderr)
        return None


def _save(path: Path, t: Triplet, words: Dict[str, PeriodicWord]):
    data = {
        "p": t.p,
        "q": t.q,
        "r": t.r,
        "angle_tol": ANGLE_TOL,
        "tool_version": TOOL_VERSION,
        "words": {key: WordParser.serialize(words[key]) for key in NUMERIC_KEYS},
    }
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, 'w', encoding='utf-8') as f:
            json.dump(data, f, ensure_ascii=False, indent=2)
    except OSError as e:
        print(f"[WARN] Could not write constants file {path}: {e}", file=sys.stderr)


def derived_words(t: Triplet, directory: Optional[Path] = None, refresh: bool = False) -> Dict[str, PeriodicWord]:
    """Numerically derived u_L, u_R, v_L, v_R, from the cache when present"""
    path = constants_path(t, directory)
    with _lock:
        words = None if refresh else _load(path)
        if words is None:
            words = _derive(t)
            _save(path, t, words)
    return words


def get_limiting_words(t: Triplet, directory: Optional[Path] = None, refresh: bool = False) -> LimitingWords:
    """
    Limiting words of t: table u_L, v_R, w_L, w_R with derived u_R, v_L

    A numeric u_L or v_R that disagrees with its table word is reported on
    stderr; the table word is kept.
    """
    key = (t.p, t.q, t.r, str(resolve_directory(directory)))
    if not refresh and key in _memory:
        return _memory[key]
    table = table_words(t)
    derived = derived_words(t, directory, refresh)
    for name, exact in (("u_L", table.u_L), ("v_R", table.v_R)):
        if lex_compare(exact, derived[name]) != 0:
            print(f"[WARN] {t}: derived {name} = {derived[name]} differs from {exact}", file=sys.stderr)
    lw = LimitingWords(
        u_L=table.u_L,
        u_R=derived["u_R"],
        v_L=derived["v_L"],
        v_R=table.v_R,
        w_L=table.w_L,
        w_R=table.w_R,
    )
    with _lock:
        _memory[key] = lw
    return lw


def clear_memory_cache():
    with _lock:
        _memory.clear()
