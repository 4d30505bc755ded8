"""Core domain objects: the grid, flagged hotspots, observed events, surfaces.

Cells are opaque identifiers with an area in square kilometres; there is no
geometry here. Period and cell identifiers are plain strings; periods order
lexicographically, so ordinal period labels should be zero-padded
(``p00 < p01 < ... < p10``).

Everything is immutable after construction and safe to share across threads;
the two operations at the bottom are pure functions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import PeriodMismatchError, ValidationError

# Opaque identifiers. Periods must order lexicographically in ordinal order.
CellId = str
PeriodId = str
EventId = str

#: Relative tolerance for the grid's total-area bookkeeping.
AREA_RTOL = 1e-9

#: Absolute tolerance on the mass sum of a probability surface.
MASS_ATOL = 1e-6


@dataclass(frozen=True)
class Cell:
    """One grid cell: an opaque id and its area in km^2."""

    id: CellId
    area_km2: float

    def __post_init__(self):
        if not (self.area_km2 > 0 and math.isfinite(self.area_km2)):
            raise ValidationError(
                f"cell {self.id!r}: area must be a positive finite number, "
                f"got {self.area_km2!r}"
            )


@dataclass(frozen=True)
class GridSpec:
    """The discretized study region.

    ``total_area_km2`` may be passed explicitly (it is then checked against
    the cell sum to within a relative tolerance of 1e-9) or left as None to
    be derived from the cells.
    """

    cells: tuple[Cell, ...]
    total_area_km2: float = None  # type: ignore[assignment]

    def __post_init__(self):
        cells = tuple(self.cells)
        object.__setattr__(self, "cells", cells)
        if not cells:
            raise ValidationError("a grid needs at least one cell")
        ids = [c.id for c in cells]
        if len(set(ids)) != len(ids):
            dupes = sorted({i for i in ids if ids.count(i) > 1})
            raise ValidationError(f"duplicate cell ids: {dupes}")
        derived = math.fsum(c.area_km2 for c in cells)
        if self.total_area_km2 is None:
            object.__setattr__(self, "total_area_km2", derived)
        elif not math.isclose(self.total_area_km2, derived, rel_tol=AREA_RTOL):
            raise ValidationError(
                f"declared total area {self.total_area_km2!r} km^2 does not "
                f"match the cell sum {derived!r} km^2"
            )

    @property
    def cell_ids(self) -> frozenset[CellId]:
        return frozenset(c.id for c in self.cells)

    def area_of(self, cell_id: CellId) -> float:
        try:
            return self._areas[cell_id]
        except KeyError:
            raise ValidationError(f"unknown cell id {cell_id!r}") from None

    @property
    def _areas(self) -> Mapping[CellId, float]:
        # Lazily built lookup; cached on the instance despite frozen-ness.
        cached = self.__dict__.get("_areas_cache")
        if cached is None:
            cached = {c.id: c.area_km2 for c in self.cells}
            object.__setattr__(self, "_areas_cache", cached)
        return cached


@dataclass(frozen=True)
class HotspotSelection:
    """The set of cells one model flags as hotspots for one period."""

    period: PeriodId
    flagged: frozenset[CellId]

    def __post_init__(self):
        object.__setattr__(self, "flagged", frozenset(self.flagged))


@dataclass(frozen=True)
class Event:
    """One observed crime, already assigned to a cell and period."""

    event_id: EventId
    cell_id: CellId
    period: PeriodId


@dataclass(frozen=True)
class EventSet:
    """Observed events, held in a canonical (period, event id) order.

    The canonical order makes every downstream aggregate independent of the
    order rows appeared in the source file. Cross-validation against a grid
    happens at the construction sites (:func:`assign_events`, the loaders),
    not here, because the event set does not hold a grid reference.
    """

    events: tuple[Event, ...]

    def __post_init__(self):
        ordered = tuple(
            sorted(self.events, key=lambda e: (e.period, e.event_id, e.cell_id))
        )
        object.__setattr__(self, "events", ordered)

    def __len__(self) -> int:
        return len(self.events)

    def periods(self) -> tuple[PeriodId, ...]:
        return tuple(sorted({e.period for e in self.events}))

    def in_period(self, period: PeriodId) -> tuple[Event, ...]:
        return tuple(e for e in self.events if e.period == period)

    def count(self, period: PeriodId) -> int:
        """N: the total number of events observed in ``period``."""
        return sum(1 for e in self.events if e.period == period)

    def counts_by_cell(self, period: PeriodId | None = None) -> dict[CellId, int]:
        """Events per cell, over one period or over the whole set."""
        counts: dict[CellId, int] = {}
        for e in self.events:
            if period is None or e.period == period:
                counts[e.cell_id] = counts.get(e.cell_id, 0) + 1
        return counts


@dataclass(frozen=True)
class ProbabilitySurface:
    """Per-cell probability mass a model assigns to one period.

    The masses must lie in [0, 1] and sum to 1 within ``MASS_ATOL``.
    Completeness against a particular grid (an entry for every cell) is
    checked where grid and surface meet: in the loader and in the scoring
    functions.
    """

    period: PeriodId
    mass: Mapping[CellId, float]

    def __post_init__(self):
        mass = dict(self.mass)
        object.__setattr__(self, "mass", mass)
        if not mass:
            raise ValidationError("a probability surface needs at least one cell")
        for cid in sorted(mass):
            m = mass[cid]
            if not (math.isfinite(m) and 0.0 <= m <= 1.0):
                raise ValidationError(
                    f"surface mass for cell {cid!r} is {m!r}, outside [0, 1]"
                )
        total = math.fsum(mass[cid] for cid in sorted(mass))
        if abs(total - 1.0) > MASS_ATOL:
            raise ValidationError(
                f"surface masses sum to {total!r}, not 1 within {MASS_ATOL}"
            )

    @classmethod
    def renormalized(
        cls, period: PeriodId, mass: Mapping[CellId, float]
    ) -> "ProbabilitySurface":
        """Build a surface from non-negative weights, scaling them to sum 1."""
        total = math.fsum(mass[cid] for cid in sorted(mass))
        if total <= 0:
            raise ValidationError("cannot renormalize: masses sum to zero")
        return cls(period, {cid: m / total for cid, m in mass.items()})


@dataclass(frozen=True)
class ContingencyTable:
    """Cell-level confusion counts for one (model, period) pair.

    A flagged cell with at least one event counts once as a true positive
    no matter how many events hit it; event-level accounting lives in the
    metrics module instead.
    """

    tp: int
    fp: int
    tn: int
    fn: int

    def __post_init__(self):
        for name in ("tp", "fp", "tn", "fn"):
            v = getattr(self, name)
            if not isinstance(v, int) or v < 0:
                raise ValidationError(f"{name} must be a non-negative integer, got {v!r}")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


@dataclass(frozen=True)
class RejectedRow:
    """A raw event row dropped during lenient ingestion."""

    event_id: EventId
    cell_id: CellId
    period: PeriodId
    reason: str


def assign_events(
    grid: GridSpec,
    raw: Iterable[tuple[EventId, CellId, PeriodId]],
    strict: bool = True,
) -> tuple[EventSet, tuple[RejectedRow, ...]]:
    """Turn raw (event id, cell id, period) rows into a validated EventSet.

    In strict mode (the default) any row referencing a cell the grid does
    not contain is a hard error naming the offending event id. In lenient
    mode such rows are dropped and returned alongside the event set so the
    caller can count and report them; silent dropping would hide upstream
    geocoding mistakes.
    """
    known = grid.cell_ids
    kept: list[Event] = []
    rejected: list[RejectedRow] = []
    for event_id, cell_id, period in raw:
        if cell_id in known:
            kept.append(Event(event_id, cell_id, period))
        elif strict:
            raise ValidationError(
                f"event {event_id!r} references unknown cell {cell_id!r}"
            )
        else:
            rejected.append(RejectedRow(event_id, cell_id, period, "unknown cell"))
    return EventSet(tuple(kept)), tuple(rejected)


def contingency(
    grid: GridSpec,
    selection: HotspotSelection,
    events: EventSet,
    period: PeriodId,
) -> ContingencyTable:
    """Classify every grid cell as TP, FP, TN or FN for one period.

    flagged and hit -> TP; flagged and quiet -> FP; unflagged and quiet ->
    TN; unflagged and hit -> FN. Counts are cells, so the four numbers
    always sum to the grid size.
    """
    if selection.period != period:
        raise PeriodMismatchError(
            f"selection is for period {selection.period!r}, asked to score "
            f"period {period!r}"
        )
    unknown = sorted(selection.flagged - grid.cell_ids)
    if unknown:
        raise ValidationError(f"selection flags unknown cells: {unknown}")
    hit = set(events.counts_by_cell(period))
    tp = fp = tn = fn = 0
    for cell in grid.cells:
        flagged = cell.id in selection.flagged
        has_event = cell.id in hit
        if flagged and has_event:
            tp += 1
        elif flagged:
            fp += 1
        elif has_event:
            fn += 1
        else:
            tn += 1
    return ContingencyTable(tp=tp, fp=fp, tn=tn, fn=fn)
