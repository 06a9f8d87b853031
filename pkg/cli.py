#!/usr/bin/env python3
"""
Command-line interface: spectrum, constant, words, code, validate, render

Exit codes: 0 success, 1 internal failure, 2 invalid input.
"""

import argparse
import sys
from typing import List, Optional

try:
    from . import constants_store
    from .config_manager import SpectrumConfigManager, get_config
    from .hyperbolic_core import Triplet, classify_and_length, trig_pack
    from .oracle import brute_spectrum_report, compare_spectra
    from .render import RenderSpec, parse_overlay, render
    from .spectrum import compute_spectrum_report, save_report, stopping_constant
    from .tiling import configure_tiling, get_tiling
    from .word_parser import WordParser
    from .words import combinatorial_length, enumerate_admissible, is_admissible, matrix_of_word, \
        max_polygon_run, zigzag_factorize, zigzag_length
except ImportError:
    import constants_store
    from config_manager import SpectrumConfigManager, get_config
    from hyperbolic_core import Triplet, classify_and_length, trig_pack
    from oracle import brute_spectrum_report, compare_spectra
    from render import RenderSpec, parse_overlay, render
    from spectrum import compute_spectrum_report, save_report, stopping_constant
    from tiling import configure_tiling, get_tiling
    from word_parser import WordParser
    from words import combinatorial_length, enumerate_admissible, is_admissible, matrix_of_word, \
        max_polygon_run, zigzag_factorize, zigzag_length


# ==================== Helpers ====================
class UsageError(ValueError):
    """Invalid command-line input (exit code 2)"""


def _config(args) -> SpectrumConfigManager:
    config = get_config(args.config_path)
    constants_store.use_directory(config.get_constants_dir())
    configure_tiling(**config.tiling_options())
    return config


def _triplet(args) -> Triplet:
    try:
        return Triplet(args.p, args.q, args.r)
    except ValueError as e:
        raise UsageError(str(e)) from e


def _word(text: str, t: Triplet):
    try:
        return WordParser.to_cyclic(text, t)
    except ValueError as e:
        raise UsageError(f"invalid word {text!r}: {e}") from e


def _length_bound(value: float) -> float:
    if not value > 0:
        raise UsageError(f"--max_length must be > 0 (got {value})")
    return value


def _threads(args, config: SpectrumConfigManager) -> int:
    if args.threads is not None and args.threads > 0:
        return args.threads
    return config.get_threads()


def _progress(args, config: SpectrumConfigManager) -> bool:
    return config.show_progress() and not args.no_progress


# ==================== Commands ====================
def cmd_spectrum(args) -> int:
    config = _config(args)
    t = _triplet(args)
    _length_bound(args.max_length)
    report = compute_spectrum_report(
        t, args.max_length,
        fold_inverses=args.fold_inverses,
        threads=_threads(args, config),
        show_progress=_progress(args, config),
        slack=config.get_tolerance("length_slack"),
        group_tol=config.get_tolerance("length_group"),
    )
    text = save_report(report, args.out, args.format)
    if args.out:
        print(f"[OK] {len(report.entries)} lengths up to {args.max_length} for {t}", file=sys.stderr)
        print(f"  - {args.format}: {args.out}", file=sys.stderr)
    else:
        sys.stdout.write(text)
    return 0


def cmd_constant(args) -> int:
    config = _config(args)
    t = _triplet(args)
    report = stopping_constant(t, disjoint_tol=config.get_tolerance("disjointness"),
                               threads=_threads(args, config), show_progress=_progress(args, config))
    print(f"c = {report.c:.15g}")
    if args.report:
        angles = trig_pack(t)
        print("=" * 60)
        print(f"Configuration report for {t}")
        print("=" * 60)
        print(f"configurations: {len(report.configurations)} (windows of <= {report.window_syllables} syllables)")
        print(f"scope: {report.scope}")
        for case in sorted(report.cases):
            print(f"  - case {case}: {report.cases[case]}")
        arg = report.argmin
        print(f"argmin: {WordParser.serialize(arg.local_word)} ({arg.case}, d = {arg.distance:.15g})")
        print(f"phi = {angles.phi_q:.12g}, psi = {angles.psi_q:.12g}, "
              f"mu = {angles.mu_q:.12g}, nu = {angles.nu_q:.12g}")
        print("theta: " + ", ".join(f"{k} = {v:.12g}" for k, v in sorted(angles.theta_j.items())))
    return 0


def cmd_words(args) -> int:
    config = _config(args)
    t = _triplet(args)
    if args.max_L <= 0:
        return 0
    lw = constants_store.get_limiting_words(t)
    for w in enumerate_admissible(t, args.max_L, lw, threads=_threads(args, config),
                                  show_progress=_progress(args, config)):
        print(WordParser.serialize(w))
    return 0


def cmd_code(args) -> int:
    config = _config(args)
    t = _triplet(args)
    word = _word(args.word, t)
    tiling = get_tiling(t)
    m = matrix_of_word(word, tiling.gd)
    cls = classify_and_length(m, margin=config.get_tolerance("hyperbolic_margin"))
    fact = zigzag_factorize(word, t)
    lw = constants_store.get_limiting_words(t)
    print(f"word: {WordParser.serialize(word)}")
    print(f"trace: {abs(m.trace):.15g}")
    print(f"class: {cls.kind}")
    if cls.length is not None:
        print(f"length: {cls.length:.15g}")
    if is_admissible(word, lw):
        print(f"combinatorial length: {combinatorial_length(word, t, lw)}")
    else:
        print("combinatorial length: undefined (not admissible)")
    print(f"zigzag length: {zigzag_length(fact)}")
    print(f"zigzag factorization: {fact.describe()}")
    print(f"longest polygon run: {max_polygon_run(word, t)}")
    print(f"admissible: {'yes' if is_admissible(word, lw) else 'no'}")
    if cls.is_hyperbolic:
        coded = tiling.code_of_element(m, max_steps=int(config.get("coder", "max_steps", 2000)))
        print(f"geometric code: {WordParser.serialize(coded)}")
    return 0


def cmd_validate(args) -> int:
    config = _config(args)
    t = _triplet(args)
    _length_bound(args.max_length)
    show = _progress(args, config)
    main_report = compute_spectrum_report(t, args.max_length, threads=_threads(args, config), show_progress=show,
                                          slack=config.get_tolerance("length_slack"),
                                          group_tol=config.get_tolerance("length_group"))
    oracle_report = brute_spectrum_report(t, args.max_length, n_syllables=args.n_syllables, show_progress=show,
                                          resolution=config.get_tolerance("dedup"),
                                          slack=config.get_tolerance("length_slack"),
                                          group_tol=config.get_tolerance("length_group"))
    diff = compare_spectra(main_report.entries, oracle_report.entries)
    print(f"[INFO] spectrum: {len(main_report.entries)} lengths, c = {main_report.metadata['c']:.12g}, "
          f"L0 = {main_report.metadata['L0']}")
    print(f"[INFO] oracle: {len(oracle_report.entries)} lengths, ball radius "
          f"{oracle_report.metadata['n_syllables']} ({oracle_report.metadata['ball_size']} elements)")
    for note in oracle_report.collisions:
        print(f"[WARN] {note}")
    if diff.is_empty:
        print(f"[OK] spectra agree up to {args.max_length}")
        return 0
    for line in diff.describe():
        print(f"[FAIL] {line}")
    return 1


def cmd_render(args) -> int:
    _config(args)
    t = _triplet(args)
    try:
        overlays = [parse_overlay(text) for text in args.overlay]
        spec = RenderSpec(t, args.depth, overlays, args.output, args.size)
        for ov in overlays:
            if ov.kind == "word":
                _word(ov.value, t)
    except ValueError as e:
        raise UsageError(str(e)) from e
    out = render(spec)
    print(f"[OK] Rendered {spec.triplet} to depth {spec.depth}")
    print(f"  - svg: {out}")
    return 0


# ==================== Parser ====================
def _add_common(sub: argparse.ArgumentParser):
    sub.add_argument('--p', type=int, required=True, help='Rotation order at A vertices (>= 3)')
    sub.add_argument('--q', type=int, required=True, help='Rotation order at B vertices (>= p)')
    sub.add_argument('--r', type=int, required=True, help='Order of ab (>= q)')
    sub.add_argument('--threads', type=int, default=None,
                     help='Worker threads (default: config runtime.threads, 0 = all cores)')
    sub.add_argument('--config_path', '--config-path', dest='config_path', type=str, default=None,
                     help='Path to config file (default: spectrum_config.json)')
    sub.add_argument('--no_progress', '--no-progress', dest='no_progress', action='store_true',
                     help='Hide progress bars')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description='Length spectra of triangle group orbifolds')
    subparsers = parser.add_subparsers(dest='command', required=True)

    sub = subparsers.add_parser('spectrum', help='Closed geodesic lengths up to a bound')
    _add_common(sub)
    sub.add_argument('--max_length', '--max-length', dest='max_length', type=float, required=True,
                     help='Length bound l0')
    sub.add_argument('--format', type=str, default='csv', choices=['csv', 'json'], help='Output format')
    sub.add_argument('--fold_inverses', '--fold-inverses', dest='fold_inverses', action='store_true',
                     help='Count a class and its inverse once')
    sub.add_argument('--out', type=str, default=None, help='Output file (default: stdout)')
    sub.set_defaults(func=cmd_spectrum)

    sub = subparsers.add_parser('constant', help='Stopping constant c')
    _add_common(sub)
    sub.add_argument('--report', action='store_true', help='Print the configuration report')
    sub.set_defaults(func=cmd_constant)

    sub = subparsers.add_parser('words', help='Admissible words up to a combinatorial length')
    _add_common(sub)
    sub.add_argument('--max_L', '--max-L', dest='max_L', type=int, required=True,
                     help='Combinatorial length bound')
    sub.set_defaults(func=cmd_words)

    sub = subparsers.add_parser('code', help='Length, L and factorization of a word')
    _add_common(sub)
    sub.add_argument('--word', type=str, required=True, help='Serialized word, e.g. a2ba2ba2b2*')
    sub.set_defaults(func=cmd_code)

    sub = subparsers.add_parser('validate', help='Compare the spectrum with the brute-force oracle')
    _add_common(sub)
    sub.add_argument('--max_length', '--max-length', dest='max_length', type=float, required=True,
                     help='Length bound l0')
    sub.add_argument('--n_syllables', '--n-syllables', dest='n_syllables', type=int, default=None,
                     help='Oracle ball radius in syllables (default: heuristic)')
    sub.set_defaults(func=cmd_validate)

    sub = subparsers.add_parser('render', help='SVG picture of the tiling')
    _add_common(sub)
    sub.add_argument('--depth', type=int, default=4, help='Tiling generation depth')
    sub.add_argument('--overlay', type=str, action='append', default=[],
                     help='word:<word> | path:<angle> | geodesic:<angle>,<angle> | interval:A|B')
    sub.add_argument('--output', '--out', dest='output', type=str, default='tiling.svg', help='Output SVG path')
    sub.add_argument('--size', type=int, default=800, help='Image size in pixels')
    sub.set_defaults(func=cmd_render)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as e:
        print(f"[FAIL] {e}", file=sys.stderr)
        return 2
    except (ValueError, RuntimeError, AssertionError) as e:
        print(f"[FAIL] {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
