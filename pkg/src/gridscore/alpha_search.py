"""Grid search for the PPAI penalty exponent.

Given pre-aggregated hotspot units, the procedure orders them canonically
(smallest area first, highest crime share within equal areas), builds the
cumulative coverage levels, and scans a grid of alpha values looking for
those under which the PPAI curve over levels peaks exactly at the level
matching a desired patrol coverage. Among the alphas that work, it keeps
the one separating the target level most sharply from its neighbours.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import AlphaSearchError, ValidationError
from .metrics import HotspotUnit, ppai

#: Slack when matching a cumulative area against the target coverage.
TARGET_TOL = 1e-12


@dataclass(frozen=True)
class CumulativeLevel:
    """Running totals after taking the first ``prefix_len`` ordered units."""

    prefix_len: int
    cum_area: float
    cum_crime: float

    def ppai(self, alpha: float) -> float:
        """PPAI of the whole prefix treated as one selection."""
        return ppai(self.cum_crime, self.cum_area, alpha)


@dataclass(frozen=True)
class AlphaSearchResult:
    """Outcome of the grid search.

    ``valid_range`` is the closed interval spanned by every grid alpha
    whose PPAI-over-levels curve peaks uniquely at the target level;
    ``alpha_star`` is the member of that set with the largest minimum gap
    between the target level's PPAI and its neighbouring levels' PPAI.
    ``per_alpha_diagnostics`` records, for every grid alpha, which prefix
    length peaked — useful when the search fails and someone needs to see
    how close it came.
    """

    alpha_star: float
    valid_range: tuple[float, float]
    target_level: CumulativeLevel
    per_alpha_diagnostics: tuple[tuple[float, int], ...]


def order_units(units: Iterable[HotspotUnit]) -> tuple[HotspotUnit, ...]:
    """Canonical unit order: area ascending, crime share descending, id.

    The id tie-break is not part of the published ordering rule; it exists
    so that permuting the input can never change any downstream result.
    """
    rows = tuple(units)
    if not rows:
        raise ValidationError("cannot order an empty unit collection")
    return tuple(
        sorted(rows, key=lambda u: (u.area_fraction, -u.crime_fraction, u.id))
    )


def cumulative_levels(
    ordered: Sequence[HotspotUnit],
) -> tuple[CumulativeLevel, ...]:
    """Running (area, crime) totals for every prefix of the ordered units."""
    if not ordered:
        raise ValidationError("cannot build levels from an empty unit sequence")
    levels = []
    for k in range(1, len(ordered) + 1):
        levels.append(
            CumulativeLevel(
                prefix_len=k,
                cum_area=math.fsum(u.area_fraction for u in ordered[:k]),
                cum_crime=math.fsum(u.crime_fraction for u in ordered[:k]),
            )
        )
    return tuple(levels)


def _alpha_grid(grid_step: float) -> list[float]:
    if not 0 < grid_step < 1:
        raise ValidationError(f"grid_step must be in (0, 1), got {grid_step!r}")
    alphas = []
    k = 0
    while True:
        # Rebuild from k each time (instead of accumulating) so the grid is
        # not subject to drift, then squash residual binary noise.
        alpha = round(0.01 + k * grid_step, 12)
        if alpha > 0.99 + TARGET_TOL:
            break
        alphas.append(alpha)
        k += 1
    return alphas


def optimal_alpha(
    levels: Sequence[CumulativeLevel],
    target_coverage: float,
    grid_step: float = 0.01,
) -> AlphaSearchResult:
    """Find the alpha making PPAI peak at the level nearest a coverage target.

    Parameters
    ----------
    levels : sequence of CumulativeLevel
        Cumulative levels in prefix order, as from :func:`cumulative_levels`.
    target_coverage : float
        Desired total patrol coverage as a fraction of the region, in (0, 1).
        The target level is the longest prefix whose cumulative area still
        fits under this value (with 1e-12 slack).
    grid_step : float
        Spacing of the alpha grid over [0.01, 0.99].

    Returns
    -------
    AlphaSearchResult

    Raises
    ------
    AlphaSearchError
        If no level fits under the target, or no grid alpha makes the
        target level the unique PPAI peak. The latter error carries the
        per-alpha peak diagnostics rather than guessing an answer.
    """
    if not levels:
        raise ValidationError("no cumulative levels supplied")
    if not (0.0 < target_coverage < 1.0):
        raise ValidationError(
            f"target_coverage must lie in (0, 1), got {target_coverage!r}"
        )
    target_idx = None
    for i, lvl in enumerate(levels):
        if lvl.cum_area <= target_coverage + TARGET_TOL:
            target_idx = i
    if target_idx is None:
        raise AlphaSearchError(
            f"no cumulative level fits under target coverage "
            f"{target_coverage!r}; the smallest level covers "
            f"{levels[0].cum_area!r}"
        )
    target = levels[target_idx]

    diagnostics = []
    valid = []
    gaps = {}
    for alpha in _alpha_grid(grid_step):
        scores = [lvl.ppai(alpha) for lvl in levels]
        peak_idx = max(range(len(scores)), key=lambda i: (scores[i], -i))
        diagnostics.append((alpha, levels[peak_idx].prefix_len))
        others = [s for i, s in enumerate(scores) if i != target_idx]
        if others and not all(scores[target_idx] > s for s in others):
            continue
        valid.append(alpha)
        neighbour_gaps = []
        if target_idx > 0:
            neighbour_gaps.append(scores[target_idx] - scores[target_idx - 1])
        if target_idx + 1 < len(scores):
            neighbour_gaps.append(scores[target_idx] - scores[target_idx + 1])
        # A single-level input has no neighbours; every alpha then ties at
        # gap +inf and the smallest-alpha rule below settles it.
        gaps[alpha] = min(neighbour_gaps) if neighbour_gaps else math.inf

    if not valid:
        raise AlphaSearchError(
            f"no alpha on the grid makes level {target.prefix_len} "
            f"(cumulative coverage {target.cum_area!r}) the unique PPAI "
            f"peak; see diagnostics for where each alpha peaked",
            diagnostics=tuple(diagnostics),
        )
    best_gap = max(gaps[a] for a in valid)
    alpha_star = min(a for a in valid if gaps[a] == best_gap)
    return AlphaSearchResult(
        alpha_star=alpha_star,
        valid_range=(min(valid), max(valid)),
        target_level=target,
        per_alpha_diagnostics=tuple(diagnostics),
    )
