"""Statistical machinery: weighted distributions, correlations,
partial correlations, and Wilcoxon/Mann-Whitney location-shift tests
with Hodges-Lehmann estimates.

Everything here is a pure function of its inputs (plus an explicit
seed where resampling is involved); nothing reads ambient RNG state.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
from scipy.stats import norm, rankdata, t as t_dist

from .errors import DataError

#: Above this many pairwise comparisons the rank test switches from the
#: exact permutation distribution to the tie-corrected normal approximation.
EXACT_PAIR_LIMIT = 10_000

#: Pairwise-difference matrices up to this size are materialized; larger
#: ones fall back to binary-search order-statistic selection.
_MATERIALIZE_LIMIT = 5_000_000

#: Star legends as used in published correlation tables.
STARS_MAIN = {"*": 0.01, "**": 0.001}
STARS_EXTENDED = {"°": 0.3, "*": 0.1, "**": 0.01, "***": 0.001}


@dataclass(frozen=True)
class WeightedDistribution:
    """(value, weight) pairs; weights are word counts or frequencies."""

    values: tuple[float, ...]
    weights: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        if len(self.values) != len(self.weights):
            raise DataError(
                f"{len(self.values)} values but {len(self.weights)} weights"
            )
        if any(w < 0 for w in self.weights):
            raise DataError("weights must be non-negative")
        if math.fsum(self.weights) <= 0:
            raise DataError("total weight must be positive")

    @classmethod
    def unit(cls, values: Sequence[float]) -> "WeightedDistribution":
        return cls(values=tuple(values), weights=(1.0,) * len(values))


@dataclass(frozen=True)
class CorrelationResult:
    coefficient: float
    n: int
    p_value: float
    method: str


@dataclass(frozen=True)
class RankTestResult:
    shift: float
    ci_low: float
    ci_high: float
    p_value: float


@dataclass(frozen=True)
class WordRecord:
    """Joined per-word record feeding correlation_table."""

    word: str
    valence: float
    length: int
    frequency_per_million: float
    self_info: float
    context_info: Mapping[int, float]


@dataclass(frozen=True)
class TableStatistic:
    name: str
    coefficient: float
    n: int
    p_value: float
    method: str
    stars: str


# -- weighted distributions ---------------------------------------------------


def weighted_mean(d: WeightedDistribution) -> float:
    return math.fsum(v * w for v, w in zip(d.values, d.weights)) / math.fsum(d.weights)


def weighted_median(d: WeightedDistribution) -> float:
    """Smallest value whose cumulative weight reaches half the total."""
    half = math.fsum(d.weights) / 2.0
    acc = 0.0
    for v, w in sorted(zip(d.values, d.weights)):
        acc += w
        if acc >= half:
            return v
    return d.values[-1]  # unreachable for valid weights


def pos_neg_ratio(d: WeightedDistribution) -> float:
    """Weight on positive values over weight on negative values; zeros excluded."""
    pos = math.fsum(w for v, w in zip(d.values, d.weights) if v > 0)
    neg = math.fsum(w for v, w in zip(d.values, d.weights) if v < 0)
    if neg <= 0:
        raise DataError("positive/negative ratio undefined: no weight on negative values")
    return pos / neg


def histogram(d: WeightedDistribution, bins: int) -> list[float]:
    """Normalized masses over equal-width bins spanning [-1, 1].

    The right edge is inclusive only for the last bin; masses sum to 1.
    """
    if bins < 2:
        raise DataError(f"need at least 2 bins, got {bins}")
    values = np.asarray(d.values)
    weights = np.asarray(d.weights)
    if np.any(values < -1.0) or np.any(values > 1.0):
        raise DataError("histogram values must lie in [-1, 1]")
    width = 2.0 / bins
    idx = np.minimum(((values + 1.0) / width).astype(int), bins - 1)
    masses = np.zeros(bins)
    np.add.at(masses, idx, weights)
    return list(masses / weights.sum())


def histogram_edges(bins: int) -> list[float]:
    return list(np.linspace(-1.0, 1.0, bins + 1))


# -- correlations -------------------------------------------------------------


def _check_pair(x: np.ndarray, y: np.ndarray) -> int:
    if x.shape != y.shape or x.ndim != 1:
        raise DataError(f"samples must be 1-d and equal length, got {x.shape} vs {y.shape}")
    n = x.size
    if n < 3:
        raise DataError(f"need at least 3 samples for a correlation, got {n}")
    if np.all(x == x[0]) or np.all(y == y[0]):
        raise DataError("correlation undefined for constant input")
    return n


def _pearson_r(x: np.ndarray, y: np.ndarray) -> float:
    r = float(np.corrcoef(x, y)[0, 1])
    return max(-1.0, min(1.0, r))


def _t_p_value(r: float, df: int) -> float:
    if df < 1:
        raise DataError(f"not enough samples for a p-value (df={df})")
    if 1.0 - r * r <= 0.0:
        return 0.0
    t = r * math.sqrt(df / (1.0 - r * r))
    return float(2.0 * t_dist.sf(abs(t), df))


def pearson(x: Sequence[float], y: Sequence[float]) -> CorrelationResult:
    """Sample Pearson r, two-sided p from the t statistic with n-2 df."""
    xa, ya = np.asarray(x, float), np.asarray(y, float)
    n = _check_pair(xa, ya)
    r = _pearson_r(xa, ya)
    return CorrelationResult(coefficient=r, n=n, p_value=_t_p_value(r, n - 2), method="pearson")


def spearman(x: Sequence[float], y: Sequence[float]) -> CorrelationResult:
    """Pearson on average ranks (ties share the mean of their rank span)."""
    xa, ya = np.asarray(x, float), np.asarray(y, float)
    n = _check_pair(xa, ya)
    r = _pearson_r(rankdata(xa), rankdata(ya))
    return CorrelationResult(coefficient=r, n=n, p_value=_t_p_value(r, n - 2), method="spearman")


def partial_from_pairwise(rho_xy: float, rho_xz: float, rho_yz: float) -> float:
    """First-order partial correlation from the three pairwise coefficients."""
    if abs(rho_xz) >= 1.0 or abs(rho_yz) >= 1.0:
        raise DataError("partial correlation singular: a control correlation is +-1")
    r = (rho_xy - rho_xz * rho_yz) / math.sqrt((1.0 - rho_xz**2) * (1.0 - rho_yz**2))
    return max(-1.0, min(1.0, r))


def partial_correlation(
    x: Sequence[float], y: Sequence[float], z: Sequence[float]
) -> CorrelationResult:
    """Correlation of x and y with z linearly removed from both.

    Two-sided p from the t statistic with n-3 degrees of freedom.
    """
    xa, ya, za = np.asarray(x, float), np.asarray(y, float), np.asarray(z, float)
    n = _check_pair(xa, ya)
    _check_pair(xa, za)
    _check_pair(ya, za)
    r = partial_from_pairwise(_pearson_r(xa, ya), _pearson_r(xa, za), _pearson_r(ya, za))
    return CorrelationResult(coefficient=r, n=n, p_value=_t_p_value(r, n - 3), method="partial")


# -- rank-based location-shift test -------------------------------------------


def _subset_sum_counts(values: np.ndarray, k: int) -> np.ndarray:
    """ways[s] = number of k-subsets of ``values`` (non-negative ints)
    summing to s. Float64 counts: exact for small totals, ample
    precision for p-value ratios elsewhere."""
    smax = int(np.sort(values)[-k:].sum()) if k else 0
    ways = np.zeros((k + 1, smax + 1))
    ways[0, 0] = 1.0
    for i, v in enumerate(values):
        v = int(v)
        for kk in range(min(k, i + 1), 0, -1):
            if v == 0:
                ways[kk] += ways[kk - 1]
            else:
                ways[kk, v:] += ways[kk - 1, :-v]
    return ways[k]


def _exact_two_sided_p(scaled_ranks: np.ndarray, n: int, s_obs: int) -> float:
    """Two-sided p for the rank sum over all C(N, n) group assignments.

    ``scaled_ranks`` are 2x the average ranks of the pooled sample, so
    ties are handled by enumerating the true permutation distribution.
    """
    ways = _subset_sum_counts(scaled_ranks, n)
    total = ways.sum()
    center = n * (len(scaled_ranks) + 1)  # E[sum of n scaled ranks]
    deviation = abs(s_obs - center)
    s_values = np.arange(ways.size)
    return float(ways[np.abs(s_values - center) >= deviation].sum() / total)


def _approx_two_sided_p(u: float, n: int, m: int, pooled_ranks: np.ndarray) -> float:
    """Normal approximation with tie correction and continuity correction."""
    big_n = n + m
    _, tie_counts = np.unique(pooled_ranks, return_counts=True)
    tie_term = float((tie_counts**3 - tie_counts).sum())
    variance = n * m / 12.0 * ((big_n + 1) - tie_term / (big_n * (big_n - 1)))
    if variance <= 0:
        return 1.0
    numerator = max(abs(u - n * m / 2.0) - 0.5, 0.0)
    return float(2.0 * norm.sf(numerator / math.sqrt(variance)))


def _count_diffs_at_most(a: np.ndarray, b_sorted: np.ndarray, t: float) -> int:
    """Pairs with (a_i - b_j) <= t under float subtraction.

    Per-row binary search evaluating the rounded difference itself;
    searchsorted on a_i - t would test a differently-rounded predicate
    and drift off the true order statistics by an ulp.
    """
    n, m = a.size, b_sorted.size
    lo = np.zeros(n, dtype=np.int64)
    hi = np.full(n, m, dtype=np.int64)
    while True:
        active = lo < hi
        if not active.any():
            break
        mid = (lo + hi) // 2
        pred = (a - b_sorted[np.minimum(mid, m - 1)]) <= t
        hi = np.where(active & pred, mid, hi)
        lo = np.where(active & ~pred, mid + 1, lo)
    return int((m - lo).sum())


def _kth_diff_binary_search(a_sorted: np.ndarray, b_sorted: np.ndarray, k: int) -> float:
    """k-th smallest (1-indexed) of all pairwise differences a_i - b_j,
    found without materializing the n*m difference matrix. Exact: the
    count function steps only at realized difference values, so the
    bisection pins the true order statistic."""
    lo = float(np.nextafter(a_sorted[0] - b_sorted[-1], -np.inf))
    hi = float(a_sorted[-1] - b_sorted[0])
    while True:
        mid = lo + (hi - lo) / 2.0
        if mid <= lo or mid >= hi:
            return hi
        if _count_diffs_at_most(a_sorted, b_sorted, mid) >= k:
            hi = mid
        else:
            lo = mid


def _diff_order_stats(a: np.ndarray, b: np.ndarray, ranks: list[int]) -> list[float]:
    """Selected order statistics (1-indexed ranks) of {a_i - b_j}."""
    if a.size * b.size <= _MATERIALIZE_LIMIT:
        diffs = np.sort((a[:, None] - b[None, :]).ravel())
        return [float(diffs[r - 1]) for r in ranks]
    a_sorted = np.sort(a)
    b_sorted = np.sort(b)
    return [_kth_diff_binary_search(a_sorted, b_sorted, r) for r in ranks]


def _shift_ci_rank(n: int, m: int, alpha: float, exact: bool) -> int:
    """Largest u with P(U <= u) <= alpha/2 under the no-ties null; -1 if none."""
    if exact:
        scaled = 2 * np.arange(1, n + m + 1)
        ways = _subset_sum_counts(scaled, n)
        cdf = np.cumsum(ways) / ways.sum()
        # U = (S - n(n+1)) / 2 with S the scaled rank sum
        u_probs = cdf[n * (n + 1) + 2 * np.arange(n * m + 1)]
        below = np.nonzero(u_probs <= alpha / 2.0)[0]
        return int(below[-1]) if below.size else -1
    sigma = math.sqrt(n * m * (n + m + 1) / 12.0)
    return int(math.floor(n * m / 2.0 - norm.ppf(1.0 - alpha / 2.0) * sigma))


def mann_whitney_shift(
    a: Sequence[float], b: Sequence[float], confidence: float = 0.95
) -> RankTestResult:
    """Two-sided Mann-Whitney test with Hodges-Lehmann shift estimate.

    shift = median of all pairwise differences a_i - b_j. The p-value is
    exact (full permutation enumeration, ties included) when
    len(a)*len(b) <= EXACT_PAIR_LIMIT, otherwise the tie-corrected
    normal approximation. The confidence interval comes from the rank
    positions of the ordered pairwise differences.
    """
    aa = np.asarray(a, float)
    bb = np.asarray(b, float)
    n, m = aa.size, bb.size
    if n < 2 or m < 2:
        raise DataError(f"both samples need >= 2 observations, got {n} and {m}")

    pooled_ranks = rankdata(np.concatenate([aa, bb]))
    r1 = float(pooled_ranks[:n].sum())
    u1 = r1 - n * (n + 1) / 2.0

    exact = n * m <= EXACT_PAIR_LIMIT
    if exact:
        scaled = np.rint(2.0 * pooled_ranks).astype(np.int64)
        p_value = _exact_two_sided_p(scaled, n, int(round(2.0 * r1)))
    else:
        p_value = _approx_two_sided_p(u1, n, m, pooled_ranks)

    # order statistics of the n*m pairwise differences
    alpha = 1.0 - confidence
    u_crit = _shift_ci_rank(n, m, alpha, exact)
    if u_crit < 0:  # too little data for the requested confidence: full range
        u_crit = 0
    lo_rank = u_crit + 1
    hi_rank = n * m - u_crit
    if n * m % 2:
        median_ranks = [(n * m + 1) // 2]
    else:
        median_ranks = [n * m // 2, n * m // 2 + 1]
    stats = _diff_order_stats(aa, bb, [lo_rank, *median_ranks, hi_rank])
    ci_low, ci_high = stats[0], stats[-1]
    middles = stats[1:-1]
    shift = middles[0] if len(middles) == 1 else (middles[0] + middles[1]) / 2.0
    return RankTestResult(shift=shift, ci_low=ci_low, ci_high=ci_high, p_value=p_value)


def weighted_shift_test(
    values: Sequence[float],
    weights: Sequence[float],
    sample_size: int = 100_000,
    seed: int = 0,
) -> RankTestResult:
    """Location shift of the weight-proportional distribution vs the flat one.

    Draws ``sample_size`` values with probability proportional to weight
    (seeded, deterministic) and runs mann_whitney_shift(sample, values).
    A positive shift means weighting moves the distribution upward.
    """
    d = WeightedDistribution(values=tuple(values), weights=tuple(weights))
    if sample_size < 1000:
        raise DataError(f"sample_size must be >= 1000, got {sample_size}")
    rng = np.random.default_rng(seed)
    w = np.asarray(d.weights)
    sample = rng.choice(np.asarray(d.values), size=sample_size, replace=True, p=w / w.sum())
    return mann_whitney_shift(sample, d.values)


# -- table assembly -----------------------------------------------------------


def significance_stars(p: float, legend: Mapping[str, float] = STARS_MAIN) -> str:
    """Most significant label whose threshold exceeds p; '' if none apply."""
    if not 0.0 <= p <= 1.0:
        raise DataError(f"p-value must be in [0, 1], got {p}")
    for label, threshold in sorted(legend.items(), key=lambda item: item[1]):
        if p < threshold:
            return label
    return ""


def _labelled(name: str, result: CorrelationResult, legend: Mapping[str, float]) -> TableStatistic:
    return TableStatistic(
        name=name,
        coefficient=result.coefficient,
        n=result.n,
        p_value=result.p_value,
        method=result.method,
        stars=significance_stars(result.p_value, legend),
    )


def correlation_table(
    records: Sequence[WordRecord],
    context_sizes: Sequence[int] = (2, 3, 4),
    strict: bool = True,
) -> dict[str, TableStatistic]:
    """Every correlation the analysis reports, keyed by statistic name.

    Context-size statistics use pairwise exclusion: only words scorable
    at that size enter. Valence/frequency statistics carry the
    two-level star legend, the additional and partial statistics the
    four-level one, mirroring how such tables are usually published.

    With strict=True (default) any statistic that cannot be computed
    (too few pairs, constant column, singular control) raises a
    DataError naming it; strict=False omits it instead, for degenerate
    synthetic inputs.
    """
    if len(records) < 10:
        raise DataError(f"need at least 10 joined records, got {len(records)}")
    v = np.array([r.valence for r in records])
    length = np.array([r.length for r in records], dtype=float)
    f = np.array([r.frequency_per_million for r in records])
    info = np.array([r.self_info for r in records])

    table: dict[str, TableStatistic] = {}
    failures: list[str] = []

    def emit(name, legend, func):
        try:
            table[name] = _labelled(name, func(), legend)
        except DataError:
            failures.append(name)

    emit("rho(v,f)", STARS_MAIN, lambda: pearson(v, f))
    emit("rho(v,I)", STARS_MAIN, lambda: pearson(v, info))
    subsets = {}
    for size in context_sizes:
        have = [i for i, r in enumerate(records) if size in r.context_info]
        subsets[size] = (
            np.array([records[i].context_info[size] for i in have]),
            np.array(have, dtype=int),
        )
        i_n, rows = subsets[size]
        emit(f"rho(v,I{size})", STARS_MAIN, lambda i_n=i_n, rows=rows: pearson(v[rows], i_n))
    emit("rho(abs(v),I)", STARS_EXTENDED, lambda: pearson(np.abs(v), info))
    emit("rho(l,I)", STARS_EXTENDED, lambda: pearson(length, info))
    emit("rho(v,l)", STARS_EXTENDED, lambda: pearson(v, length))
    emit("rho(v,I|l)", STARS_EXTENDED, lambda: partial_correlation(v, info, length))
    emit("rho(l,I|v)", STARS_EXTENDED, lambda: partial_correlation(length, info, v))
    for size in context_sizes:
        i_n, rows = subsets[size]
        emit(
            f"rho(v,I{size}|I)",
            STARS_EXTENDED,
            lambda i_n=i_n, rows=rows: partial_correlation(v[rows], i_n, info[rows]),
        )

    if failures and strict:
        raise DataError(f"insufficient data for statistics: {', '.join(failures)}")
    return table


#: Statistic grouping of the three exported correlation tables.
TABLE_LAYOUT = {
    "main": ("rho(v,f)", "rho(v,I)", "rho(v,I2)", "rho(v,I3)", "rho(v,I4)"),
    "additional": ("rho(abs(v),I)", "rho(l,I)", "rho(v,l)", "rho(v,I|l)", "rho(l,I|v)"),
    "partial": ("rho(v,I2|I)", "rho(v,I3|I)", "rho(v,I4|I)"),
}


def export_table_csv(table: Mapping[str, TableStatistic], which: str) -> str:
    """One of the three correlation tables as CSV; statistics missing
    from ``table`` (unused context sizes) are simply omitted."""
    if which not in TABLE_LAYOUT:
        raise DataError(f"unknown table {which!r}; choose from {sorted(TABLE_LAYOUT)}")
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["statistic", "coefficient", "n", "p_value", "stars"])
    for name in TABLE_LAYOUT[which]:
        if name in table:
            stat = table[name]
            writer.writerow([name, repr(stat.coefficient), stat.n, repr(stat.p_value), stat.stars])
    return out.getvalue()
