"""Shared fixtures: the 15-hotspot worked example and its four models."""

import pytest

from gridscore import ContingencyTable, HotspotUnit

# The hypothetical urban area: 15 hotspots, 42% of the area, 83% of the
# crime, listed in decreasing order of their individual PAI.
AREA_FRACTIONS = (
    0.01, 0.01, 0.01, 0.01,
    0.02, 0.02, 0.02,
    0.03, 0.03, 0.03,
    0.04, 0.04,
    0.05, 0.05, 0.05,
)
CRIME_FRACTIONS = (
    0.1, 0.09, 0.08, 0.07,
    0.06, 0.06, 0.05,
    0.05, 0.05, 0.04,
    0.04, 0.04,
    0.04, 0.03, 0.03,
)

#: Which hotspots (1-based) each candidate model flags.
MODEL_UNITS = {
    "M-I": (1, 2, 3),
    "M-II": (1,),
    "M-III": (1, 5, 10, 15),
    "M-IV": (13, 14, 15),
}


@pytest.fixture(scope="session")
def fifteen_units():
    return tuple(
        HotspotUnit(f"h{i:02d}", a, n)
        for i, (a, n) in enumerate(zip(AREA_FRACTIONS, CRIME_FRACTIONS), start=1)
    )


@pytest.fixture(scope="session")
def unit_index(fifteen_units):
    return {u.id: u for u in fifteen_units}


@pytest.fixture(scope="session")
def model_selections(unit_index):
    return {
        name: tuple(unit_index[f"h{i:02d}"] for i in ids)
        for name, ids in MODEL_UNITS.items()
    }


# Cell-level contingency tables realizing the two-model comparison example:
# 2000 cells, 100 labelled '+', conditional rates (85, 15, 30, 70) and
# (75, 25, 45, 55) percent.
@pytest.fixture(scope="session")
def table_a():
    return ContingencyTable(tp=85, fp=15, tn=570, fn=1330)


@pytest.fixture(scope="session")
def table_b():
    return ContingencyTable(tp=75, fp=25, tn=855, fn=1045)


@pytest.fixture
def announce(capfd):
    """Print one PASS/FAIL line per acceptance criterion past the capture."""

    def _announce(criterion, ok, label, detail=""):
        line = f"ACCEPTANCE {criterion:2d} {'PASS' if ok else 'FAIL'}  {label}"
        if detail and not ok:
            line += f"  [{detail}]"
        with capfd.disabled():
            print(line, flush=True)

    return _announce
