"""Shared fixtures: repository root on sys.path, test triplets, scratch constants directory"""

import os
import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parent.parent
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

import constants_store  # noqa: E402
from config_manager import CONSTANTS_ENV_VAR  # noqa: E402
from hyperbolic_core import Triplet, build_group  # noqa: E402
from tiling import configure_tiling, get_tiling  # noqa: E402


@pytest.fixture(scope="session", autouse=True)
def scratch_constants_dir(tmp_path_factory):
    """Keep derived limiting words out of the repository"""
    directory = tmp_path_factory.mktemp("constants")
    previous = os.environ.get(CONSTANTS_ENV_VAR)
    os.environ[CONSTANTS_ENV_VAR] = str(directory)
    constants_store.use_directory(directory)
    yield directory
    constants_store.use_directory(None)
    if previous is None:
        os.environ.pop(CONSTANTS_ENV_VAR, None)
    else:
        os.environ[CONSTANTS_ENV_VAR] = previous


@pytest.fixture(autouse=True)
def default_tiling_options():
    """Commands may configure the tiling from a config file; restore the defaults"""
    yield
    configure_tiling()


@pytest.fixture(scope="session")
def t337():
    return Triplet(3, 3, 7)


@pytest.fixture(scope="session")
def t344():
    return Triplet(3, 4, 4)


@pytest.fixture(scope="session")
def t345():
    return Triplet(3, 4, 5)


@pytest.fixture(scope="session")
def gd337(t337):
    return build_group(t337)


@pytest.fixture(scope="session")
def gd344(t344):
    return build_group(t344)


@pytest.fixture(scope="session")
def gd345(t345):
    return build_group(t345)


@pytest.fixture(scope="session")
def tiling337(t337):
    return get_tiling(t337)


@pytest.fixture(scope="session")
def lw337(t337):
    return constants_store.get_limiting_words(t337)


@pytest.fixture(scope="session")
def lw344(t344):
    return constants_store.get_limiting_words(t344)
