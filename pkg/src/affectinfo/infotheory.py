"""Self-information and context-conditional information content.

Self-information of a word is -log P(w) with P(w) estimated from the
unigram table. The context measure for order n averages -log P(w|c)
over every observed occurrence of w, where c is the n-1 tokens
preceding w and P(w|c) = count(c+w) / sum over continuations of c,
with the denominator taken from the order-n table itself (public
N-gram datasets are pruned, so cross-order totals cannot be trusted).

Logs are natural by default; a different base rescales every score
uniformly and leaves rank/correlation structure unchanged.
"""

from __future__ import annotations

import csv
import io
import math
import statistics
import warnings
from dataclasses import dataclass, field
from typing import Mapping, Sequence, TextIO

from .corpus import CountTable, NgramKey
from .errors import DataError, DataIntegrityError, ParseError
from .lexicon import Lexicon

CONTEXT_SIZES = (2, 3, 4)

#: Relative cross-order disagreement tolerated before warning that the
#: order-(n-1) table and the order-n continuation totals diverge.
CONSISTENCY_WARN_THRESHOLD = 0.05


@dataclass(frozen=True)
class InformationScores:
    word: str
    frequency_per_million: float
    self_info: float
    occurrences: int
    context_info: dict[int, float] = field(default_factory=dict)


@dataclass(frozen=True)
class InfoBin:
    words: tuple[str, ...]
    mean_info: float
    mean_valence: float
    valence_stderr: float


@dataclass(frozen=True)
class ScoringResult:
    scores: tuple[InformationScores, ...]
    missing: tuple[str, ...]


class ContinuationIndex:
    """Reverse index over one order-n table.

    Maps each final token to its observed (context, count) pairs and
    each context to its continuation total. Contexts are kept sorted
    so summation order (and thus float output) never depends on table
    construction order.
    """

    def __init__(self, table: CountTable):
        self.n = table.n
        if table.n < 2:
            raise DataError("continuation index needs an order >= 2 table")
        totals: dict[NgramKey, int] = {}
        by_final: dict[str, list[tuple[NgramKey, int]]] = {}
        for key, count in table.counts.items():
            ctx = key[:-1]
            totals[ctx] = totals.get(ctx, 0) + count
            by_final.setdefault(key[-1], []).append((ctx, count))
        for pairs in by_final.values():
            pairs.sort()
        self.context_totals = totals
        self.by_final = by_final


def self_information(p: float, base: float = math.e) -> float:
    """Information carried by an event of probability p, -log(p)."""
    if not 0.0 < p <= 1.0:
        raise DataError(f"probability must be in (0, 1], got {p}")
    ln_base = 1.0 if base == math.e else math.log(base)
    return -math.log(p) / ln_base


def check_table_consistency(tables: Mapping[int, CountTable], n: int) -> float:
    """Cross-order integrity check for the order-n table.

    Raises DataIntegrityError when an n-gram count exceeds its own
    context's (n-1)-gram count. Returns the aggregate relative
    disagreement between order-n continuation totals and the
    order-(n-1) counts, warning beyond 5% (pruned public datasets
    routinely exceed this; freshly counted corpora only accumulate
    small document-final deficits). No-op (0.0) when the lower-order
    table is absent.
    """
    table = tables[n]
    lower = tables.get(n - 1)
    if lower is None:
        return 0.0
    totals: dict[NgramKey, int] = {}
    for key, count in table.counts.items():
        ctx = key[:-1]
        ctx_count = lower.count(ctx)
        if ctx_count and count > ctx_count:
            raise DataIntegrityError(
                f"count({' '.join(key)!r}) = {count} exceeds "
                f"count({' '.join(ctx)!r}) = {ctx_count}"
            )
        totals[ctx] = totals.get(ctx, 0) + count
    mismatch = 0
    covered = 0
    for ctx, total in totals.items():
        ctx_count = lower.count(ctx)
        if ctx_count:
            mismatch += abs(total - ctx_count)
            covered += ctx_count
    discrepancy = mismatch / covered if covered else 0.0
    if discrepancy > CONSISTENCY_WARN_THRESHOLD:
        warnings.warn(
            f"order-{n} continuation totals differ from the order-{n - 1} table "
            f"by {discrepancy:.1%} overall (pruned dataset?)",
            stacklevel=2,
        )
    return discrepancy


def contextual_information(
    word: str,
    n: int,
    tables: Mapping[int, CountTable],
    base: float = math.e,
    index: ContinuationIndex | None = None,
) -> float | None:
    """Occurrence-averaged -log P(w|c) over the word's order-n contexts.

    Returns None when the word never appears as the final token of an
    n-gram (not scorable, distinct from an informative 0.0). When the
    order-(n-1) table is also available it is cross-checked; standalone
    calls (no prebuilt index) additionally warn when the word's
    continuation totals disagree with it by more than 5%; batch
    scoring runs one table-level check instead (check_table_consistency).
    """
    if n not in tables:
        raise DataError(f"no order-{n} table available")
    standalone = index is None
    if standalone:
        index = ContinuationIndex(tables[n])
    elif index.n != n:
        raise DataError(f"index is for order {index.n}, expected {n}")

    pairs = index.by_final.get(word)
    if not pairs:
        return None

    lower = tables.get(n - 1)
    mismatch = 0
    covered = 0
    total_occurrences = 0
    acc = 0.0
    for ctx, count in pairs:
        continuation_total = index.context_totals[ctx]
        if lower is not None:
            ctx_count = lower.count(ctx)
            if ctx_count and count > ctx_count:
                raise DataIntegrityError(
                    f"count({' '.join(ctx + (word,))!r}) = {count} exceeds "
                    f"count({' '.join(ctx)!r}) = {ctx_count}"
                )
            if ctx_count:
                mismatch += abs(continuation_total - ctx_count)
                covered += ctx_count
        total_occurrences += count
        acc += count * math.log(count / continuation_total)

    if standalone and covered and mismatch / covered > CONSISTENCY_WARN_THRESHOLD:
        warnings.warn(
            f"order-{n} continuation totals for {word!r} differ from the "
            f"order-{n - 1} table by {mismatch / covered:.1%} (pruned dataset?)",
            stacklevel=2,
        )
    ln_base = 1.0 if base == math.e else math.log(base)
    return -acc / total_occurrences / ln_base


def score_lexicon(
    lex: Lexicon,
    tables: Mapping[int, CountTable],
    base: float = math.e,
    context_sizes: Sequence[int] | None = None,
) -> ScoringResult:
    """Per-word information scores for every lexicon word found in the corpus.

    Words absent from the unigram table are excluded (their bare
    probability, hence self-information, is undefined) and reported in
    the result's ``missing`` list.
    """
    unigrams = tables.get(1)
    if unigrams is None or unigrams.total <= 0:
        raise DataError("scoring requires a non-empty unigram table")
    if context_sizes is None:
        context_sizes = [n for n in CONTEXT_SIZES if n in tables]
    else:
        missing_orders = [n for n in context_sizes if n not in tables]
        if missing_orders:
            raise DataError(f"missing tables for context sizes {missing_orders}")

    indexes = {n: ContinuationIndex(tables[n]) for n in context_sizes}
    for n in context_sizes:
        check_table_consistency(tables, n)
    scores: list[InformationScores] = []
    missing: list[str] = []
    for entry in lex.entries:
        count = unigrams.counts.get((entry.word,), 0)
        if count == 0:
            missing.append(entry.word)
            continue
        context_info = {}
        for n in context_sizes:
            value = contextual_information(entry.word, n, tables, base=base, index=indexes[n])
            if value is not None:
                context_info[n] = value
        scores.append(
            InformationScores(
                word=entry.word,
                frequency_per_million=1e6 * count / unigrams.total,
                self_info=self_information(count / unigrams.total, base=base),
                occurrences=count,
                context_info=context_info,
            )
        )
    return ScoringResult(scores=tuple(scores), missing=tuple(missing))


def bin_by_information(
    values: Sequence[float],
    valences: Sequence[float],
    n_bins: int = 10,
    words: Sequence[str] | None = None,
) -> list[InfoBin]:
    """Sort words by information value and split into near-equal bins.

    When len(values) is not divisible by n_bins the remainder is spread
    one word per bin starting from the lowest-information bin.
    """
    if len(values) != len(valences):
        raise DataError("values and valences must have equal length")
    if n_bins < 1:
        raise DataError(f"n_bins must be >= 1, got {n_bins}")
    if len(values) < n_bins:
        raise DataError(f"need at least {n_bins} scored words, got {len(values)}")
    if words is None:
        words = [""] * len(values)

    order = sorted(range(len(values)), key=lambda i: values[i])
    q, r = divmod(len(values), n_bins)
    bins: list[InfoBin] = []
    start = 0
    for b in range(n_bins):
        size = q + 1 if b < r else q
        chunk = order[start : start + size]
        start += size
        vals = [valences[i] for i in chunk]
        stderr = statistics.stdev(vals) / math.sqrt(len(vals)) if len(vals) > 1 else 0.0
        bins.append(
            InfoBin(
                words=tuple(words[i] for i in chunk),
                mean_info=statistics.fmean(values[i] for i in chunk),
                mean_valence=statistics.fmean(vals),
                valence_stderr=stderr,
            )
        )
    return bins


def rescale_for_display(values: Sequence[float]) -> list[float]:
    """Min-max rescale onto [0, 1]. Display-only; never feed into correlations."""
    lo, hi = min(values), max(values)
    if hi == lo:
        raise DataError("cannot rescale: all values are equal")
    return [(v - lo) / (hi - lo) for v in values]


# -- scores CSV (word,valence,freq_per_million,I,I2,I3,I4) -------------------


@dataclass(frozen=True)
class ScoreRow:
    """One row of an exported scores file."""

    word: str
    valence: float
    frequency_per_million: float
    self_info: float
    context_info: dict[int, float]


_SCORES_HEADER = ["word", "valence", "freq_per_million", "I", "I2", "I3", "I4"]


def export_scores_csv(scores: Sequence[InformationScores], valences: Sequence[float]) -> str:
    """Serialize aligned scores/valences; empty cells mark unscorable sizes."""
    if len(scores) != len(valences):
        raise DataError("scores and valences must have equal length")
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(_SCORES_HEADER)
    for s, v in zip(scores, valences):
        row = [s.word, repr(v), repr(s.frequency_per_million), repr(s.self_info)]
        for n in CONTEXT_SIZES:
            row.append(repr(s.context_info[n]) if n in s.context_info else "")
        writer.writerow(row)
    return out.getvalue()


def load_scores_csv(source: str | TextIO) -> list[ScoreRow]:
    stream = io.StringIO(source) if isinstance(source, str) else source
    reader = csv.reader(stream)
    header = next(reader, None)
    if header != _SCORES_HEADER:
        raise ParseError(f"unexpected scores header {header!r}", line=1)
    rows = []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(_SCORES_HEADER):
            raise ParseError(f"expected {len(_SCORES_HEADER)} columns, got {len(row)}", line=lineno)
        try:
            context_info = {
                n: float(cell) for n, cell in zip(CONTEXT_SIZES, row[4:]) if cell != ""
            }
            rows.append(
                ScoreRow(
                    word=row[0],
                    valence=float(row[1]),
                    frequency_per_million=float(row[2]),
                    self_info=float(row[3]),
                    context_info=context_info,
                )
            )
        except ValueError as exc:
            raise ParseError(f"bad numeric field: {exc}", line=lineno)
    return rows
