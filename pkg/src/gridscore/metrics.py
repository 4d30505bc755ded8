"""Single-model accuracy and efficiency measures.

Two families live here. The contingency-derived rates (sensitivity,
precision, accuracy, ...) work on cell-level TP/FP/TN/FN counts. The
hotspot measures (hit rate, coverage, PAI, PPAI, SER, ALS) are event-based
and come in two flavours: a pre-aggregated path over :class:`HotspotUnit`
rows with known (a/A, n/N), and a cell-level path computed from a grid, a
selection and an event set. The two paths must agree whenever both apply;
the test suite holds them to that.

A rate whose denominator is zero is returned as ``None`` — a deliberate
"undefined" marker that report layers must render as such, never as 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional

from .domain import (
    CellId,
    ContingencyTable,
    EventSet,
    GridSpec,
    HotspotSelection,
    PeriodId,
    ProbabilitySurface,
)
from .errors import PeriodMismatchError, ValidationError, ZeroMassError

#: Slack allowed on fraction sums before they count as "greater than one".
FRACTION_TOL = 1e-9


@dataclass(frozen=True)
class HotspotUnit:
    """A pre-aggregated hotspot: its share of area (a/A) and of crime (n/N).

    Parameters
    ----------
    id : str
        Opaque unit identifier.
    area_fraction : float
        The unit's area as a fraction of the whole region, in (0, 1].
    crime_fraction : float
        The unit's share of all observed crime, in [0, 1].
    """

    id: str
    area_fraction: float
    crime_fraction: float

    def __post_init__(self):
        if not (0.0 < self.area_fraction <= 1.0):
            raise ValidationError(
                f"unit {self.id!r}: area_fraction must be in (0, 1], "
                f"got {self.area_fraction!r}"
            )
        if not (0.0 <= self.crime_fraction <= 1.0):
            raise ValidationError(
                f"unit {self.id!r}: crime_fraction must be in [0, 1], "
                f"got {self.crime_fraction!r}"
            )


@dataclass(frozen=True)
class RateSet:
    """The six contingency-derived rates; None marks an undefined (0/0) rate.

    ``fpr`` is always exactly ``1 - specificity`` when the latter is
    defined; the constructor path in :func:`rates_from_contingency`
    computes it that way rather than as fp/(tn+fp) so the identity holds
    bit-for-bit.
    """

    sensitivity: Optional[float]
    specificity: Optional[float]
    ppv: Optional[float]
    npv: Optional[float]
    accuracy: Optional[float]
    fpr: Optional[float]

    def as_dict(self) -> dict[str, Optional[float]]:
        return {
            "sensitivity": self.sensitivity,
            "specificity": self.specificity,
            "ppv": self.ppv,
            "npv": self.npv,
            "accuracy": self.accuracy,
            "fpr": self.fpr,
        }


def _ratio(num: int, den: int) -> Optional[float]:
    return None if den == 0 else num / den


def rates_from_contingency(t: ContingencyTable) -> RateSet:
    """All six standard rates from a cell-level contingency table.

    sensitivity = TP/(TP+FN) (the hit rate at cell level), specificity =
    TN/(TN+FP), ppv = TP/(TP+FP) (precision), npv = TN/(TN+FN),
    accuracy = (TP+TN)/total and fpr = 1 - specificity. Any rate with a
    zero denominator comes back as None.
    """
    specificity = _ratio(t.tn, t.tn + t.fp)
    return RateSet(
        sensitivity=_ratio(t.tp, t.tp + t.fn),
        specificity=specificity,
        ppv=_ratio(t.tp, t.tp + t.fp),
        npv=_ratio(t.tn, t.tn + t.fn),
        accuracy=_ratio(t.tp + t.tn, t.total),
        fpr=None if specificity is None else 1.0 - specificity,
    )


def _fraction_sum(units: Iterable[HotspotUnit], attr: str, what: str) -> float:
    rows = sorted(units, key=lambda u: u.id)
    if not rows:
        raise ValidationError(f"cannot compute {what} of an empty unit selection")
    total = math.fsum(getattr(u, attr) for u in rows)
    if total > 1.0 + FRACTION_TOL:
        raise ValidationError(
            f"{what} of selected units sums to {total!r} > 1; the units "
            f"overlap or their fractions are inconsistent"
        )
    return total


def hit_rate(selected: Iterable[HotspotUnit]) -> float:
    """n/N for a set of pre-aggregated units: the sum of their crime shares."""
    return _fraction_sum(selected, "crime_fraction", "hit rate")


def coverage(selected: Iterable[HotspotUnit]) -> float:
    """a/A for a set of pre-aggregated units: the sum of their area shares."""
    return _fraction_sum(selected, "area_fraction", "coverage")


def hit_rate_from_events(
    grid: GridSpec,
    selection: HotspotSelection,
    events: EventSet,
    period: PeriodId,
) -> Optional[float]:
    """Event-level hit rate n/N: events in flagged cells over all events.

    Returns None (undefined) when the period has no events at all.
    """
    if selection.period != period:
        raise PeriodMismatchError(
            f"selection is for period {selection.period!r}, not {period!r}"
        )
    unknown = sorted(selection.flagged - grid.cell_ids)
    if unknown:
        raise ValidationError(f"selection flags unknown cells: {unknown}")
    in_period = events.in_period(period)
    if not in_period:
        return None
    hits = sum(1 for e in in_period if e.cell_id in selection.flagged)
    return hits / len(in_period)


def coverage_from_cells(grid: GridSpec, selection: HotspotSelection) -> float:
    """a/A from cell areas: flagged area over the grid's total area."""
    unknown = sorted(selection.flagged - grid.cell_ids)
    if unknown:
        raise ValidationError(f"selection flags unknown cells: {unknown}")
    flagged_area = math.fsum(grid.area_of(c) for c in sorted(selection.flagged))
    return flagged_area / grid.total_area_km2


def pai(hit: float, cov: float) -> float:
    """Predictive accuracy index: hit rate scaled by coverage, hit/cov."""
    if cov <= 0:
        raise ValidationError(f"PAI needs positive coverage, got {cov!r}")
    return hit / cov


def ppai(hit: float, cov: float, alpha: float) -> float:
    """Penalized PAI: hit / cov**alpha for a penalty exponent in [0, 1].

    alpha = 0 ignores coverage entirely and returns the hit rate; alpha = 1
    applies the full PAI penalty. Both endpoints are special-cased so they
    reproduce :func:`hit_rate` and :func:`pai` bit-for-bit rather than
    relying on the platform's pow() being exact there.
    """
    if cov <= 0:
        raise ValidationError(f"PPAI needs positive coverage, got {cov!r}")
    if not (0.0 <= alpha <= 1.0):
        raise ValidationError(f"alpha must lie in [0, 1], got {alpha!r}")
    if alpha == 0.0:
        return hit
    if alpha == 1.0:
        return hit / cov
    return hit / cov**alpha


def ser(hits: int, patrolled_area_km2: float) -> float:
    """Search efficiency rate: successfully predicted crimes per km²."""
    if hits < 0:
        raise ValidationError(f"hit count must be non-negative, got {hits!r}")
    if not patrolled_area_km2 > 0:
        raise ValidationError(
            f"patrolled area must be positive, got {patrolled_area_km2!r}"
        )
    return hits / patrolled_area_km2


def als(
    surface: ProbabilitySurface,
    events: EventSet,
    period: PeriodId,
    restrict_to: Optional[HotspotSelection] = None,
    floor: Optional[float] = None,
) -> float:
    """Average logarithmic score: mean natural log of the mass at each event.

    Parameters
    ----------
    surface : ProbabilitySurface
        The model's per-cell mass for ``period``.
    events : EventSet
        Test events; only those in ``period`` are scored.
    period : str
        The period being scored; must match the surface's.
    restrict_to : HotspotSelection, optional
        When given, only events inside the flagged cells enter the mean and
        N is the restricted count.
    floor : float, optional
        When set, each mass is replaced by max(mass, floor) before taking
        the log. Without it, an event at a zero-mass cell is a hard
        error — a model that declared the observed data impossible should
        not be scored quietly.

    Notes
    -----
    Natural log. Changing the base rescales every ALS by the same constant
    and so never reorders models; the base in use is recorded in report
    metadata.
    """
    if surface.period != period:
        raise PeriodMismatchError(
            f"surface is for period {surface.period!r}, not {period!r}"
        )
    if restrict_to is not None and restrict_to.period != period:
        raise PeriodMismatchError(
            f"restriction is for period {restrict_to.period!r}, not {period!r}"
        )
    if floor is not None and not floor > 0:
        raise ValidationError(f"floor must be positive when given, got {floor!r}")
    scoped = events.in_period(period)
    if restrict_to is not None:
        scoped = tuple(e for e in scoped if e.cell_id in restrict_to.flagged)
    if not scoped:
        raise ValidationError(
            f"no events in scope for period {period!r}; ALS is undefined"
        )
    logs = []
    for e in scoped:
        mass = surface.mass.get(e.cell_id, 0.0)
        if floor is not None:
            mass = max(mass, floor)
        if mass <= 0.0:
            raise ZeroMassError(e.cell_id, period)
        logs.append(math.log(mass))
    return math.fsum(logs) / len(logs)
