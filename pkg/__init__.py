"""
Triangle Spectrum - closed geodesic length spectra of hyperbolic triangle groups
"""

__version__ = "1.0.0"

from .hyperbolic_core import Triplet, Isometry, build_group, classify_and_length, trig_pack
from .words import CyclicWord, Syllable, table_words, combinatorial_length, enumerate_admissible
from .word_parser import WordParser
from .tiling import Tiling, get_tiling
from .constants_store import get_limiting_words
from .spectrum import stopping_constant, compute_spectrum_report, length_spectrum, systole
from .oracle import brute_spectrum, compare_spectra
from .render import RenderSpec, render
from .config_manager import SpectrumConfigManager

__all__ = [
    'Triplet',
    'Isometry',
    'build_group',
    'classify_and_length',
    'trig_pack',
    'CyclicWord',
    'Syllable',
    'table_words',
    'combinatorial_length',
    'enumerate_admissible',
    'WordParser',
    'Tiling',
    'get_tiling',
    'get_limiting_words',
    'stopping_constant',
    'compute_spectrum_report',
    'length_spectrum',
    'systole',
    'brute_spectrum',
    'compare_spectra',
    'RenderSpec',
    'render',
    'SpectrumConfigManager'
]
