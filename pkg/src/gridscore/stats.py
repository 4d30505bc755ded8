"""Across-period summaries and paired significance testing.

Models are compared over a series of test periods; a measure's value per
period forms a series. `summarize` gives the mean and (sample) standard
deviation of a series; `wilcoxon_signed_rank` tests whether two models'
per-period values differ systematically, and `bonferroni` adjusts the
resulting p-values when several model pairs are tested at once.

The signed-rank test uses the exact null distribution of W+ whenever the
number of non-zero differences is at most EXACT_LIMIT, computed by a
subset-sum style dynamic program over the (doubled, hence integer)
mid-ranks; beyond that it switches to the normal approximation with the
usual tie-corrected variance and a continuity correction.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass
from typing import Optional, Sequence

from .domain import PeriodId
from .errors import ValidationError

#: Largest n for which the exact W+ distribution is computed.
EXACT_LIMIT = 25


@dataclass(frozen=True)
class PeriodSeries:
    """One measure's value per test period for one model."""

    measure_id: str
    model_id: str
    values: tuple[tuple[PeriodId, float], ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))
        if not self.values:
            raise ValidationError("a period series needs at least one value")
        periods = [p for p, _ in self.values]
        if len(set(periods)) != len(periods):
            dupes = sorted({p for p in periods if periods.count(p) > 1})
            raise ValidationError(f"duplicate periods in series: {dupes}")


@dataclass(frozen=True)
class WsrResult:
    """Outcome of a Wilcoxon signed-rank test.

    ``n_used`` counts the pairs left after dropping zero differences;
    ``w_plus`` is the sum of the ranks of the positive differences and
    always lies in [0, n_used(n_used+1)/2]. ``method`` records whether the
    p-value came from the exact distribution or the normal approximation.
    """

    n_used: int
    w_plus: float
    p_value: float
    method: str


def summarize(series: PeriodSeries) -> tuple[float, Optional[float]]:
    """Mean and sample standard deviation of a series.

    The standard deviation of a single value is undefined and returned as
    None, to be rendered as such — never as 0.
    """
    xs = [v for _, v in series.values]
    mean = math.fsum(xs) / len(xs)
    if len(xs) < 2:
        return mean, None
    return mean, statistics.stdev(xs)


def _midranks(abs_diffs: Sequence[float]) -> list[float]:
    """Ranks of |d| with ties sharing the average of the ranks they span."""
    order = sorted(range(len(abs_diffs)), key=lambda i: abs_diffs[i])
    ranks = [0.0] * len(abs_diffs)
    pos = 0
    while pos < len(order):
        tied = [order[pos]]
        while (
            pos + len(tied) < len(order)
            and abs_diffs[order[pos + len(tied)]] == abs_diffs[tied[0]]
        ):
            tied.append(order[pos + len(tied)])
        mid = pos + (len(tied) + 1) / 2
        for i in tied:
            ranks[i] = mid
        pos += len(tied)
    return ranks


def _exact_tail_probs(doubled_ranks: list[int], doubled_w: int) -> tuple[float, float]:
    """P(W+ <= w) and P(W+ >= w) under the exact null, via a counting DP.

    Doubling the mid-ranks makes all values integers, so the distribution
    of 2·W+ is a vector of subset counts. With n ranks there are 2**n
    equally likely sign assignments; the counts are exact integers and the
    final division by 2**n is exact in binary floating point for n <= 25.
    """
    total = sum(doubled_ranks)
    counts = [0] * (total + 1)
    counts[0] = 1
    for r in doubled_ranks:
        for w in range(total - r, -1, -1):
            if counts[w]:
                counts[w + r] += counts[w]
    denom = 2 ** len(doubled_ranks)
    lower = sum(counts[: doubled_w + 1]) / denom
    upper = sum(counts[doubled_w:]) / denom
    return lower, upper


def wilcoxon_signed_rank(
    pairs: Sequence[tuple[float, float]], two_sided: bool = True
) -> WsrResult:
    """Wilcoxon signed-rank test on paired per-period values.

    Differences d_i = x_i − y_i are formed, zero differences dropped, the
    absolute values mid-ranked, and W+ accumulated over the positive
    differences. When all differences are zero there is no evidence either
    way and the result is p = 1 with n_used = 0.

    The two-sided p-value is min(1, 2·min(P(W+ ≤ w), P(W+ ≥ w))); the
    one-sided alternative is "the first series tends larger", i.e.
    p = P(W+ ≥ w).
    """
    if not pairs:
        raise ValidationError("the signed-rank test needs at least one pair")
    diffs = [x - y for x, y in pairs if x != y]
    n = len(diffs)
    if n == 0:
        return WsrResult(n_used=0, w_plus=0.0, p_value=1.0, method="exact")
    ranks = _midranks([abs(d) for d in diffs])
    w_plus = math.fsum(r for r, d in zip(ranks, diffs) if d > 0)

    if n <= EXACT_LIMIT:
        doubled = [round(2 * r) for r in ranks]
        lower, upper = _exact_tail_probs(doubled, round(2 * w_plus))
        method = "exact"
    else:
        mean = n * (n + 1) / 4
        tie_term = 0.0
        seen: dict[float, int] = {}
        for d in diffs:
            seen[abs(d)] = seen.get(abs(d), 0) + 1
        for a in sorted(seen):
            t = seen[a]
            tie_term += (t**3 - t) / 48
        var = n * (n + 1) * (2 * n + 1) / 24 - tie_term
        if var <= 0:
            return WsrResult(n, w_plus, 1.0, "normal-approximation")
        sd = math.sqrt(var)
        norm = statistics.NormalDist()
        # Continuity correction: pull each tail half a step toward the mean.
        lower = norm.cdf((w_plus + 0.5 - mean) / sd)
        upper = 1.0 - norm.cdf((w_plus - 0.5 - mean) / sd)
        method = "normal-approximation"

    if two_sided:
        p = min(1.0, 2.0 * min(lower, upper))
    else:
        p = min(1.0, upper)
    return WsrResult(n_used=n, w_plus=w_plus, p_value=p, method=method)


def bonferroni(p_values: Sequence[float]) -> list[float]:
    """Bonferroni adjustment: multiply by the family size, cap at 1."""
    m = len(p_values)
    for p in p_values:
        if not (isinstance(p, (int, float)) and 0.0 <= p <= 1.0):
            raise ValidationError(f"p-values must lie in [0, 1], got {p!r}")
    return [min(1.0, p * m) for p in p_values]
