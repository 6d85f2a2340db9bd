"""Command-line surface.

Subcommands: count, import-ngrams, analyze, render, validate. Exit
codes: 0 success, 1 data/statistical error, 2 usage or validation
error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .config import load_config, validate_config
from .errors import AffectInfoError, ConfigError
from .pipeline import FIGURES, run_analyze, run_count, run_import_ngrams, run_render


def _config_overrides(args: argparse.Namespace) -> dict:
    overrides = {}
    for key in ("seed", "sample_size", "bins", "log_base", "max_context", "output_dir"):
        value = getattr(args, key, None)
        if value is not None:
            overrides[key] = value
    return overrides


def _cmd_count(args: argparse.Namespace) -> int:
    diagnostics = run_count(
        Path(args.input),
        Path(args.output),
        max_n=args.max_n,
        shards=args.shards,
        jobs=args.jobs,
        progress=not args.quiet,
    )
    print(f"counted {diagnostics['tokens']} tokens from {diagnostics['documents']} documents")
    for n in sorted(diagnostics["tables"], key=int):
        info = diagnostics["tables"][n]
        print(f"  {n}-grams: {info['distinct']} distinct, {info['total']} total")
    return 0


def _cmd_import_ngrams(args: argparse.Namespace) -> int:
    table = run_import_ngrams(Path(args.input), args.n, Path(args.output))
    print(f"imported {len(table.counts)} distinct {args.n}-grams ({table.total} total)")
    return 0


def _cmd_analyze(args: argparse.Namespace) -> int:
    cfg = load_config(Path(args.config), _config_overrides(args))
    result = run_analyze(cfg)
    summary = result.statistics["summary"]
    shift = result.statistics["shift_test"]
    print(f"analyzed into {result.output_dir}")
    print(
        f"  valence mean/median: unweighted "
        f"{summary['unweighted']['mean']:+.3f}/{summary['unweighted']['median']:+.3f}, "
        f"weighted {summary['weighted']['mean']:+.3f}/{summary['weighted']['median']:+.3f}"
    )
    print(
        f"  shift {shift['shift']:+.3f} "
        f"(95% CI {shift['ci_low']:+.3f}..{shift['ci_high']:+.3f})"
    )
    return 0


def _cmd_render(args: argparse.Namespace) -> int:
    cfg = load_config(Path(args.config), _config_overrides(args))
    for path in run_render(cfg, args.figure):
        print(path)
    return 0


def _cmd_validate(args: argparse.Namespace) -> int:
    cfg = load_config(Path(args.config), _config_overrides(args))
    validate_config(cfg)
    print(f"config ok: {args.config}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="affectinfo",
        description="Word valence vs frequency and information content analytics",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_count = sub.add_parser("count", help="count N-grams in a raw text corpus")
    p_count.add_argument("input", help="corpus file or directory tree")
    p_count.add_argument("-o", "--output", required=True, help="output directory for TSV tables")
    p_count.add_argument("--max-n", type=int, default=4, help="highest N-gram order (default 4)")
    p_count.add_argument("--shards", type=int, default=1, help="shard count (result-invariant)")
    p_count.add_argument("--jobs", type=int, default=1, help="parallel shard workers")
    p_count.add_argument("-q", "--quiet", action="store_true", help="suppress progress output")
    p_count.set_defaults(func=_cmd_count)

    p_import = sub.add_parser("import-ngrams", help="normalize an external count-TSV file")
    p_import.add_argument("input", help="count-TSV file (tok1 .. tokn<TAB>count)")
    p_import.add_argument("-n", type=int, required=True, help="N-gram order of the file")
    p_import.add_argument("-o", "--output", required=True, help="canonical TSV output path")
    p_import.set_defaults(func=_cmd_import_ngrams)

    def add_config_options(p, with_render_overrides=True):
        p.add_argument("-c", "--config", required=True, help="run config JSON")
        p.add_argument("--seed", type=int, help="override resample seed")
        p.add_argument("--output-dir", help="override output directory")
        if with_render_overrides:
            p.add_argument("--sample-size", type=int, help="override resample size")
            p.add_argument("--bins", type=int, help="override histogram bin count")
            p.add_argument("--log-base", help="override log base ('e' or a number)")
            p.add_argument("--max-context", type=int, help="override max context size (1..4)")

    p_analyze = sub.add_parser("analyze", help="score lexicon, compute statistics, write artifacts")
    add_config_options(p_analyze)
    p_analyze.set_defaults(func=_cmd_analyze)

    p_render = sub.add_parser("render", help="render a figure from analyze outputs")
    add_config_options(p_render)
    p_render.add_argument("--figure", required=True, choices=FIGURES, help="figure family")
    p_render.set_defaults(func=_cmd_render)

    p_validate = sub.add_parser("validate", help="check a config without running anything")
    add_config_options(p_validate)
    p_validate.set_defaults(func=_cmd_validate)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except AffectInfoError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
