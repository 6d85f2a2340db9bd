"""Corpus analytics linking word emotional valence to frequency and
information content: lexicon ingestion, N-gram counting, self- and
contextual information scoring, rank/correlation statistics, and
deterministic SVG figure emitters."""

__version__ = "0.1.0"

from .corpus import (
    CountTable,
    count_documents,
    count_ngrams,
    frequency_per_million,
    load_count_table,
    merge,
    tokenize,
    write_count_table,
)
from .errors import AffectInfoError, ConfigError, DataError, DataIntegrityError, ParseError
from .infotheory import (
    InfoBin,
    InformationScores,
    bin_by_information,
    contextual_information,
    rescale_for_display,
    score_lexicon,
    self_information,
)
from .lexicon import (
    Lexicon,
    LexiconEntry,
    SCALE_PRESETS,
    ValenceScale,
    lexicon_summary,
    parse_lexicon,
    rescale_valence,
)
from .stats import (
    CorrelationResult,
    RankTestResult,
    WeightedDistribution,
    correlation_table,
    histogram,
    mann_whitney_shift,
    partial_correlation,
    pearson,
    pos_neg_ratio,
    significance_stars,
    spearman,
    weighted_mean,
    weighted_median,
    weighted_shift_test,
)

__all__ = [
    "AffectInfoError",
    "ConfigError",
    "CorrelationResult",
    "CountTable",
    "DataError",
    "DataIntegrityError",
    "InfoBin",
    "InformationScores",
    "Lexicon",
    "LexiconEntry",
    "ParseError",
    "RankTestResult",
    "SCALE_PRESETS",
    "ValenceScale",
    "WeightedDistribution",
    "bin_by_information",
    "contextual_information",
    "correlation_table",
    "count_documents",
    "count_ngrams",
    "frequency_per_million",
    "histogram",
    "lexicon_summary",
    "load_count_table",
    "mann_whitney_shift",
    "merge",
    "parse_lexicon",
    "partial_correlation",
    "pearson",
    "pos_neg_ratio",
    "rescale_for_display",
    "rescale_valence",
    "score_lexicon",
    "self_information",
    "significance_stars",
    "spearman",
    "tokenize",
    "weighted_mean",
    "weighted_median",
    "weighted_shift_test",
    "write_count_table",
]
