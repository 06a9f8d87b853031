import pytest

import cli
from cli import main
from config_manager import SpectrumConfigManager
from spectrum import load_report
from words import AdmissibilityError

COMMON = ["--p", "3", "--q", "3", "--r", "7", "--threads", "1", "--no_progress"]


@pytest.fixture
def config_path(tmp_path):
    return str(tmp_path / "spectrum_config.json")


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_words_with_zero_bound(capsys, config_path):
    code, out, _ = run(capsys, "words", *COMMON, "--max_L", "0", "--config_path", config_path)
    assert code == 0
    assert out == ""


def test_words_lists_admissible_words(capsys, config_path):
    code, out, _ = run(capsys, "words", *COMMON, "--max-L", "2", "--config-path", config_path)
    assert code == 0
    assert out.strip()


def test_code(capsys, config_path):
    code, out, _ = run(capsys, "code", *COMMON, "--word", "a2ba2ba2b2*", "--config_path", config_path)
    assert code == 0
    assert "class: hyperbolic" in out
    assert "zigzag length: 2" in out
    assert "geometric code:" in out


def test_bad_triplet(capsys, config_path):
    code, _, err = run(capsys, "code", "--p", "3", "--q", "3", "--r", "3", "--word", "ab",
                       "--config_path", config_path)
    assert code == 2
    assert "[FAIL]" in err


def test_bad_word(capsys, config_path):
    code, _, err = run(capsys, "code", *COMMON, "--word", "a2xb", "--config_path", config_path)
    assert code == 2
    assert "[FAIL]" in err


def test_constant(capsys, config_path):
    code, out, _ = run(capsys, "constant", *COMMON, "--report", "--config_path", config_path)
    assert code == 0
    assert out.startswith("c = ")
    assert "argmin:" in out


def test_spectrum_to_file(capsys, config_path, tmp_path):
    out_file = tmp_path / "spectrum.json"
    code, out, err = run(capsys, "spectrum", *COMMON, "--max_length", "3.0", "--format", "json",
                         "--out", str(out_file), "--config_path", config_path)
    assert code == 0
    assert out == ""
    assert "[OK]" in err
    assert load_report(str(out_file)).metadata["ell0"] == 3.0


def test_spectrum_to_stdout(capsys, config_path):
    code, out, _ = run(capsys, "spectrum", *COMMON, "--max-length", "3.0", "--config_path", config_path)
    assert code == 0
    assert out.splitlines()[0] == "length,multiplicity,words"


def test_validate(capsys, config_path):
    code, out, _ = run(capsys, "validate", *COMMON, "--max_length", "2.5",
                       "--config_path", config_path)
    assert code == 0
    assert "[OK]" in out


def test_render(capsys, config_path, tmp_path):
    out_file = tmp_path / "t.svg"
    code, out, _ = run(capsys, "render", *COMMON, "--depth", "2", "--overlay", "path:1.0",
                       "--output", str(out_file), "--config_path", config_path)
    assert code == 0
    assert out_file.exists()
    assert "[OK] Rendered" in out


def test_missing_command():
    with pytest.raises(SystemExit):
        main([])


def test_nonpositive_length_bound(capsys, config_path):
    code, _, err = run(capsys, "spectrum", *COMMON, "--max_length", "0", "--config_path", config_path)
    assert code == 2
    assert "--max_length" in err


def test_internal_value_error_is_a_failure(capsys, config_path, monkeypatch):
    def broken(*args, **kwargs):
        raise AdmissibilityError("internal word is not admissible")

    monkeypatch.setattr(cli, "compute_spectrum_report", broken)
    code, _, err = run(capsys, "spectrum", *COMMON, "--max_length", "3.0", "--config_path", config_path)
    assert code == 1
    assert "internal word" in err


def test_bad_overlay(capsys, config_path, tmp_path):
    code, _, _ = run(capsys, "render", *COMMON, "--overlay", "word:a9b", "--output",
                     str(tmp_path / "t.svg"), "--config_path", config_path)
    assert code == 2


def test_code_for_non_admissible_word(capsys, config_path):
    code, out, _ = run(capsys, "code", *COMMON, "--word", "a2b", "--config_path", config_path)
    assert code == 0
    assert "admissible: no" in out
    assert "combinatorial length: undefined" in out


def test_strip_options_come_from_the_config(capsys, config_path):
    SpectrumConfigManager(config_path).update("strip", max_polygons=1)
    code, _, err = run(capsys, "code", *COMMON, "--word", "a2ba2ba2b2*", "--config_path", config_path)
    assert code == 1
    assert "did not converge" in err
