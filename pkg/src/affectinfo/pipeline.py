"""End-to-end runs: count, analyze, render.

Every run writes into one output directory, atomically (temp file +
rename), with a manifest recording the config hash and seed. Reruns
with identical inputs, config and seed produce byte-identical files.
"""

from __future__ import annotations

import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from . import corpus as corpus_mod
from . import report
from .config import RunConfig, config_hash, validate_config
from .corpus import CountTable, CorpusDiagnostics
from .errors import ConfigError, DataError
from .infotheory import (
    ScoreRow,
    ScoringResult,
    bin_by_information,
    export_scores_csv,
    load_scores_csv,
    score_lexicon,
)
from .lexicon import lexicon_summary, parse_lexicon
from .stats import (
    TABLE_LAYOUT,
    WeightedDistribution,
    WordRecord,
    correlation_table,
    export_table_csv,
    weighted_mean,
    weighted_median,
    weighted_shift_test,
)

FIGURES = ("cloud", "histogram", "bins")


def write_atomic(path: Path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)
    return path


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _update_manifest(out_dir: Path, cfg: RunConfig, new_outputs: Iterable[str]) -> Path:
    manifest_path = out_dir / "manifest.json"
    outputs = set(new_outputs)
    if manifest_path.is_file():
        previous = json.loads(manifest_path.read_text(encoding="utf-8"))
        if previous.get("config_hash") == config_hash(cfg):
            outputs |= set(previous.get("outputs", []))
    manifest = {
        "config_hash": config_hash(cfg),
        "seed": cfg.seed,
        "outputs": sorted(outputs),
    }
    return write_atomic(manifest_path, _dump_json(manifest))


# -- counting ------------------------------------------------------------------


def _count_shard(paths: Sequence[str], max_n: int) -> tuple[dict[int, CountTable], int, int]:
    tokens_seen = 0
    replacements = 0

    def documents():
        nonlocal tokens_seen, replacements
        for p in paths:
            tokens, repl = corpus_mod.read_document(Path(p))
            tokens_seen += len(tokens)
            replacements += repl
            yield tokens

    tables = corpus_mod.count_documents(documents(), max_n)
    return tables, tokens_seen, replacements


def run_count(
    input_path: Path,
    output_dir: Path,
    max_n: int,
    shards: int = 1,
    jobs: int = 1,
    progress: bool = False,
) -> dict:
    """Count a raw corpus into canonical TSV tables plus diagnostics.

    Documents are assigned to shards round-robin; each shard is counted
    independently and the commutative merge makes the result identical
    for any shard count (and any job parallelism).
    """
    input_path = Path(input_path)
    if not input_path.exists():
        raise ConfigError(f"corpus path {input_path} does not exist")
    if shards < 1:
        raise ConfigError(f"shards must be >= 1, got {shards}")
    paths = corpus_mod.iter_document_paths(input_path)
    if not paths:
        raise DataError(f"no documents found under {input_path}")
    shard_paths = [[str(p) for p in paths[i::shards]] for i in range(shards)]
    shard_paths = [s for s in shard_paths if s]

    if jobs > 1 and len(shard_paths) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_count_shard, shard_paths, [max_n] * len(shard_paths)))
    else:
        results = []
        for i, shard in enumerate(shard_paths):
            results.append(_count_shard(shard, max_n))
            if progress:
                print(f"counted shard {i + 1}/{len(shard_paths)}", file=sys.stderr)

    tables = {
        n: corpus_mod.merge([r[0][n] for r in results]) for n in range(1, max_n + 1)
    }
    tokens_seen = sum(r[1] for r in results)
    replacements = sum(r[2] for r in results)

    output_dir = Path(output_dir)
    written = {}
    for n, table in tables.items():
        written[n] = write_atomic(output_dir / f"{n}gram.tsv", corpus_mod.write_count_table(table))
    diagnostics = {
        "documents": len(paths),
        "tokens": tokens_seen,
        "replacements": replacements,
        "tables": {
            str(n): {"distinct": len(t.counts), "total": t.total} for n, t in tables.items()
        },
    }
    write_atomic(output_dir / "diagnostics.json", _dump_json(diagnostics))
    return diagnostics


def run_import_ngrams(input_path: Path, n: int, output_path: Path) -> CountTable:
    """Normalize an external count-TSV (fold case, sum repeats, sort keys)."""
    input_path = Path(input_path)
    if not input_path.is_file():
        raise ConfigError(f"input table {input_path} does not exist")
    with open(input_path, "r", encoding="utf-8") as fh:
        table = corpus_mod.load_count_table(fh, n)
    write_atomic(Path(output_path), corpus_mod.write_count_table(table))
    return table


# -- analyze -------------------------------------------------------------------


@dataclass(frozen=True)
class AnalysisResult:
    statistics: dict
    distribution: dict
    diagnostics: dict
    scoring: ScoringResult
    output_dir: Path


def _load_tables(cfg: RunConfig) -> tuple[Mapping[int, CountTable], CorpusDiagnostics | None]:
    if cfg.raw_dir is not None:
        paths = corpus_mod.iter_document_paths(cfg.raw_dir)
        if not paths:
            raise DataError(f"no documents found under {cfg.raw_dir}")
        tokens_seen = 0
        replacements = 0

        def documents():
            nonlocal tokens_seen, replacements
            for p in paths:
                tokens, repl = corpus_mod.read_document(p)
                tokens_seen += len(tokens)
                replacements += repl
                yield tokens

        tables = corpus_mod.count_documents(documents(), max(1, cfg.max_context))
        diag = CorpusDiagnostics(
            documents=len(paths), tokens=tokens_seen, replacements=replacements
        )
        return tables, diag
    tables = {}
    for n in [1] + cfg.context_sizes():
        with open(cfg.table_paths[n], "r", encoding="utf-8") as fh:
            tables[n] = corpus_mod.load_count_table(fh, n)
    return tables, None


def run_analyze(cfg: RunConfig) -> AnalysisResult:
    """Full analysis: score the lexicon against the corpus and write
    scores.csv, statistics.json, distribution.json, diagnostics.json
    and manifest.json under the configured output directory."""
    validate_config(cfg)
    lex = parse_lexicon(
        cfg.lexicon_path.read_text(encoding="utf-8"), cfg.scale, cfg.language
    )
    if not lex.entries:
        raise DataError(f"lexicon {cfg.lexicon_path} has no entries")
    tables, corpus_diag = _load_tables(cfg)
    context_sizes = cfg.context_sizes()
    scoring = score_lexicon(lex, tables, base=cfg.log_base, context_sizes=context_sizes)
    if len(scoring.scores) < 10:
        raise DataError(
            f"only {len(scoring.scores)} lexicon words matched the corpus; need at least 10"
        )

    entries = lex.by_word()
    records = [
        WordRecord(
            word=s.word,
            valence=entries[s.word].valence,
            length=entries[s.word].length,
            frequency_per_million=s.frequency_per_million,
            self_info=s.self_info,
            context_info=s.context_info,
        )
        for s in scoring.scores
    ]
    correlations = correlation_table(records, context_sizes=context_sizes)

    unweighted = WeightedDistribution.unit(lex.valences())
    weighted = WeightedDistribution(
        values=tuple(r.valence for r in records),
        weights=tuple(r.frequency_per_million for r in records),
    )
    shift = weighted_shift_test(
        weighted.values, weighted.weights, sample_size=cfg.resample_size, seed=cfg.seed
    )
    summary = lexicon_summary(lex)
    distribution = report.histogram_payload(unweighted, weighted, cfg.bins)

    statistics = {
        "language": cfg.language,
        "log_base": cfg.log_base,
        "summary": {
            "unweighted": {
                "mean": summary.mean_valence,
                "median": summary.median_valence,
                "entries": summary.entries,
            },
            "weighted": {
                "mean": weighted_mean(weighted),
                "median": weighted_median(weighted),
                "entries": len(weighted.values),
            },
            "pos_neg_ratio": {
                "unweighted": distribution["unweighted"]["pos_neg_ratio"],
                "weighted": distribution["weighted"]["pos_neg_ratio"],
            },
        },
        "correlations": {
            name: {
                "coefficient": stat.coefficient,
                "n": stat.n,
                "p_value": stat.p_value,
                "method": stat.method,
                "stars": stat.stars,
            }
            for name, stat in correlations.items()
        },
        "shift_test": {
            "shift": shift.shift,
            "ci_low": shift.ci_low,
            "ci_high": shift.ci_high,
            "p_value": shift.p_value,
            "sample_size": cfg.resample_size,
            "seed": cfg.seed,
        },
    }
    diagnostics = {
        "corpus": (
            {
                "documents": corpus_diag.documents,
                "tokens": corpus_diag.tokens,
                "replacements": corpus_diag.replacements,
            }
            if corpus_diag
            else None
        ),
        "lexicon": {
            "entries": len(lex),
            "scored": len(scoring.scores),
            "coverage": len(scoring.scores) / len(lex),
            "missing": sorted(scoring.missing),
        },
    }

    out = Path(cfg.output_dir)
    write_atomic(out / "scores.csv", export_scores_csv(scoring.scores, [r.valence for r in records]))
    write_atomic(out / "statistics.json", _dump_json(statistics))
    write_atomic(out / "distribution.json", _dump_json(distribution))
    write_atomic(out / "diagnostics.json", _dump_json(diagnostics))
    table_files = []
    for which in TABLE_LAYOUT:
        name = f"correlations_{which}.csv"
        write_atomic(out / name, export_table_csv(correlations, which))
        table_files.append(name)
    _update_manifest(
        out,
        cfg,
        ["scores.csv", "statistics.json", "distribution.json", "diagnostics.json", *table_files],
    )
    return AnalysisResult(
        statistics=statistics,
        distribution=distribution,
        diagnostics=diagnostics,
        scoring=scoring,
        output_dir=out,
    )


# -- render --------------------------------------------------------------------


def _score_rows(cfg: RunConfig) -> list[ScoreRow]:
    scores_path = Path(cfg.output_dir) / "scores.csv"
    if not scores_path.is_file():
        raise ConfigError(f"{scores_path} not found; run analyze first")
    return load_scores_csv(scores_path.read_text(encoding="utf-8"))


def run_render(cfg: RunConfig, figure: str) -> list[Path]:
    """Render one figure family from a completed analyze run."""
    if figure not in FIGURES:
        raise ConfigError(f"unknown figure {figure!r}; choose from {FIGURES}")
    rows = _score_rows(cfg)
    out = Path(cfg.output_dir)
    written: list[Path] = []

    if figure == "cloud":
        entries = [(r.word, r.frequency_per_million, r.valence) for r in rows]
        fig = report.wordcloud(entries, seed=cfg.seed)
        written.append(write_atomic(out / "cloud.svg", fig.svg))
        written.append(write_atomic(out / "cloud_geometry.json", _dump_json(fig.geometry())))
    elif figure == "histogram":
        lex = parse_lexicon(
            cfg.lexicon_path.read_text(encoding="utf-8"), cfg.scale, cfg.language
        )
        unweighted = WeightedDistribution.unit(lex.valences())
        weighted = WeightedDistribution(
            values=tuple(r.valence for r in rows),
            weights=tuple(r.frequency_per_million for r in rows),
        )
        svg, _ = report.histogram_figure(unweighted, weighted, cfg.bins)
        written.append(write_atomic(out / "histogram.svg", svg))
    else:
        by_size: dict[int, list] = {}
        candidates: dict[int, list[tuple[float, float, str]]] = {1: []}
        for r in rows:
            candidates[1].append((r.self_info, r.valence, r.word))
            for size, value in r.context_info.items():
                candidates.setdefault(size, []).append((value, r.valence, r.word))
        for size, triples in sorted(candidates.items()):
            if len(triples) < cfg.info_bins:
                continue
            by_size[size] = bin_by_information(
                [t[0] for t in triples],
                [t[1] for t in triples],
                n_bins=cfg.info_bins,
                words=[t[2] for t in triples],
            )
        svg = report.info_bins_figure(by_size)
        written.append(write_atomic(out / "info_bins.svg", svg))

    _update_manifest(out, cfg, [p.name for p in written])
    return written
