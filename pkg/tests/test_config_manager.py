import json
import os

import pytest

from config_manager import CONSTANTS_ENV_VAR, SpectrumConfigManager
from tiling import DEFAULT_TILING_OPTIONS


@pytest.fixture
def config(tmp_path):
    return SpectrumConfigManager(str(tmp_path / "spectrum_config.json"))


def test_missing_file_creates_defaults(tmp_path):
    path = tmp_path / "spectrum_config.json"
    manager = SpectrumConfigManager(str(path))
    assert path.exists()
    assert manager.get("coder", "max_steps") == 2000


def test_tolerances(config):
    assert config.get_tolerance("length_group") == 1e-9
    with pytest.raises(ValueError):
        config.get_tolerance("nope")


def test_missing_keys_fall_back_to_defaults(tmp_path):
    path = tmp_path / "partial.json"
    path.write_text(json.dumps({"tolerances": {"angle": 1e-6}}), encoding='utf-8')
    manager = SpectrumConfigManager(str(path))
    assert manager.get_tolerance("angle") == 1e-6
    assert manager.get_tolerance("dedup") == 1e-7
    assert manager.get("runtime", "unknown", "x") == "x"


def test_update_persists(config):
    config.update("runtime", threads=3, show_progress=False)
    reloaded = SpectrumConfigManager(config.config_path)
    assert reloaded.get_threads() == 3
    assert not reloaded.show_progress()
    with pytest.raises(ValueError):
        config.update("models", threads=1)


def test_zero_threads_means_all_cores(config):
    assert config.get_threads() == (os.cpu_count() or 1)


def test_constants_dir(config, tmp_path, monkeypatch):
    monkeypatch.delenv(CONSTANTS_ENV_VAR, raising=False)
    config.set_constants_dir(str(tmp_path / "c"))
    assert config.get_constants_dir() == tmp_path / "c"
    monkeypatch.setenv(CONSTANTS_ENV_VAR, str(tmp_path / "env"))
    assert config.get_constants_dir() == tmp_path / "env"


def test_broken_file_falls_back(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text("{", encoding='utf-8')
    manager = SpectrumConfigManager(str(path))
    assert "Error loading config file" in capsys.readouterr().out
    assert manager.get_tolerance("angle") == 1e-10


def test_tiling_options(config):
    assert config.tiling_options() == DEFAULT_TILING_OPTIONS
    config.update("strip", max_polygons=50.0)
    config.update("tolerances", period_match=1e-9)
    options = config.tiling_options()
    assert options["max_polygons"] == 50 and isinstance(options["max_polygons"], int)
    assert options["period_tol"] == 1e-9
