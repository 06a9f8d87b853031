import json

import constants_store
from constants_store import NUMERIC_KEYS, constants_path, derived_words, get_limiting_words
from words import lex_compare, table_words


def test_constants_file_is_written(t337, tmp_path):
    derived_words(t337, tmp_path)
    path = constants_path(t337, tmp_path)
    assert path.name == "limiting_3_3_7.json"
    with open(path, 'r', encoding='utf-8') as f:
        data = json.load(f)
    assert (data["p"], data["q"], data["r"]) == (3, 3, 7)
    assert set(data["words"]) == set(NUMERIC_KEYS)


def test_reload_gives_the_same_words(t337, tmp_path):
    first = get_limiting_words(t337, tmp_path)
    constants_store.clear_memory_cache()
    second = get_limiting_words(t337, tmp_path)
    assert first is not second
    assert first == second


def test_memory_cache_returns_the_same_object(t337, tmp_path):
    assert get_limiting_words(t337, tmp_path) is get_limiting_words(t337, tmp_path)


def test_corrupt_file_is_rederived(t344, tmp_path, capsys):
    path = constants_path(t344, tmp_path)
    path.write_text("{not json", encoding='utf-8')
    words = derived_words(t344, tmp_path)
    assert "[WARN]" in capsys.readouterr().err
    assert set(words) == set(NUMERIC_KEYS)
    with open(path, 'r', encoding='utf-8') as f:
        assert "words" in json.load(f)


def test_table_words_win(t337, lw337):
    tw = table_words(t337)
    assert lw337.u_L == tw.u_L
    assert lw337.v_R == tw.v_R
    assert lw337.w_L == tw.w_L
    assert lex_compare(lw337.u_L, lw337.u_R) < 0


def test_explicit_directory_wins(t337, tmp_path):
    assert constants_path(t337, tmp_path).parent == tmp_path


def test_fresh_directory_derives_every_triplet(t337, t344, t345, tmp_path):
    for t in (t337, t344, t345):
        lw = get_limiting_words(t, tmp_path, refresh=True)
        assert lw.u_R.first_letter == "a"
        assert lw.v_L.first_letter == "b"
        assert constants_path(t, tmp_path).exists()
