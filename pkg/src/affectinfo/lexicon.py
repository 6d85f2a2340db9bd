"""Affective lexicon parsing and valence rescaling.

A lexicon file is UTF-8 CSV with a ``word,valence`` header, one word
per row, decimal point ``.``. Extra columns are ignored. The rating
scale is never inferred from the file; callers pass a ValenceScale
(or use one of the shipped presets).
"""

from __future__ import annotations

import csv
import io
import statistics
import unicodedata
from dataclasses import dataclass
from typing import Iterable, TextIO

from .errors import DataError, ParseError


@dataclass(frozen=True)
class ValenceScale:
    """Raw rating scale bounds, e.g. 1..9 for SAM studies."""

    min_raw: float
    max_raw: float

    def __post_init__(self):
        if not self.min_raw < self.max_raw:
            raise DataError(
                f"valence scale requires min_raw < max_raw, got [{self.min_raw}, {self.max_raw}]"
            )


#: Rating scales used by the established affective-norm studies.
SCALE_PRESETS = {
    "sam-1-9": ValenceScale(1.0, 9.0),
    "symmetric-3": ValenceScale(-3.0, 3.0),
}


@dataclass(frozen=True)
class LexiconEntry:
    word: str
    valence_raw: float
    valence: float
    length: int


@dataclass(frozen=True)
class Lexicon:
    language: str
    scale: ValenceScale
    entries: tuple[LexiconEntry, ...]

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def valences(self) -> list[float]:
        return [e.valence for e in self.entries]

    def by_word(self) -> dict[str, LexiconEntry]:
        return {e.word: e for e in self.entries}


@dataclass(frozen=True)
class LexiconSummary:
    mean_valence: float
    median_valence: float
    entries: int


def grapheme_length(word: str) -> int:
    """Number of grapheme clusters in ``word``.

    NFC-normalizes first, then counts code points that are not combining
    marks. Exact for the Latin-script lexica this package targets; does
    not implement the full segmentation rules for e.g. emoji sequences.
    """
    normalized = unicodedata.normalize("NFC", word)
    return sum(1 for ch in normalized if not unicodedata.combining(ch))


def rescale_valence(raw: float, scale: ValenceScale, word: str | None = None) -> float:
    """Affine map of a raw rating onto [-1, 1]; the scale midpoint maps to 0."""
    if not scale.min_raw <= raw <= scale.max_raw:
        where = f" for word {word!r}" if word else ""
        raise DataError(
            f"valence {raw}{where} outside scale [{scale.min_raw}, {scale.max_raw}]"
        )
    return 2.0 * (raw - scale.min_raw) / (scale.max_raw - scale.min_raw) - 1.0


def _lines(source: str | TextIO) -> TextIO:
    if isinstance(source, str):
        return io.StringIO(source)
    return source


def parse_lexicon(source: str | TextIO, scale: ValenceScale, language: str = "") -> Lexicon:
    """Parse lexicon CSV into a Lexicon with rescaled valences.

    Words are lowercased (locale-independent) so they match corpus
    tokens; entry length is the grapheme count of the folded word.
    Raises ParseError for malformed rows, DataError for duplicate words
    or ratings outside the scale.
    """
    reader = csv.reader(_lines(source))
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError("empty lexicon file, expected 'word,valence' header", line=1)
    if [h.strip().lower() for h in header[:2]] != ["word", "valence"]:
        raise ParseError(
            f"expected header starting with 'word,valence', got {','.join(header)!r}", line=1
        )

    entries: list[LexiconEntry] = []
    seen: set[str] = set()
    for lineno, row in enumerate(reader, start=2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) < 2:
            raise ParseError(f"expected at least 2 columns, got {len(row)}", line=lineno)
        word = row[0].strip().lower()
        if not word:
            raise ParseError("empty word field", line=lineno)
        if any(ch.isspace() for ch in word):
            raise ParseError(f"word {word!r} contains whitespace; one word per entry", line=lineno)
        try:
            raw = float(row[1])
        except ValueError:
            raise ParseError(f"non-numeric valence {row[1]!r}", line=lineno)
        if word in seen:
            raise DataError(f"duplicate lexicon word {word!r}")
        seen.add(word)
        entries.append(
            LexiconEntry(
                word=word,
                valence_raw=raw,
                valence=rescale_valence(raw, scale, word=word),
                length=grapheme_length(word),
            )
        )
    return Lexicon(language=language, scale=scale, entries=tuple(entries))


def write_lexicon(lex: Lexicon) -> str:
    """Serialize back to lexicon CSV (raw valences, exact float round-trip)."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["word", "valence"])
    for e in lex.entries:
        writer.writerow([e.word, repr(e.valence_raw)])
    return out.getvalue()


def lexicon_summary(lex: Lexicon | Iterable[float]) -> LexiconSummary:
    """Unweighted mean/median of the rescaled valences."""
    values = lex.valences() if isinstance(lex, Lexicon) else list(lex)
    if not values:
        raise DataError("cannot summarize an empty lexicon")
    return LexiconSummary(
        mean_valence=statistics.fmean(values),
        median_valence=statistics.median(values),
        entries=len(values),
    )
