import numpy as np
import pytest

from gridscore import (
    Cell,
    Event,
    EventSet,
    GridSpec,
    HotspotSelection,
    HotspotUnit,
    IngestError,
    ProbabilitySurface,
    ValidationError,
    coverage,
    hit_rate,
)
from gridscore.ingest import (
    DEFAULT_ORIENTATION,
    RunConfig,
    load_cells,
    load_config,
    load_dataset,
    load_events,
    load_selections,
    load_surfaces,
    load_units,
    read_config_pairs,
    write_cells,
    write_events,
    write_selections,
    write_surfaces,
    write_units,
)

from conftest import AREA_FRACTIONS, CRIME_FRACTIONS


def w(path, text):
    path.write_text(text, encoding="utf-8")
    return str(path)


CELLS_CSV = "cell_id,area_km2\nc1,1.0\nc2,1.0\nc3,2.0\n"
EVENTS_CSV = "event_id,cell_id,period_id\ne1,c1,p1\ne2,c2,p1\ne3,c1,p2\n"
SELECTIONS_CSV = "model_id,period_id,cell_id\nm1,p1,c1\nm1,p2,c2\nm2,p1,c3\n"


class TestLoadCells:
    def test_good_file(self, tmp_path):
        grid = load_cells(w(tmp_path / "cells.csv", CELLS_CSV))
        assert len(grid.cells) == 3
        assert grid.total_area_km2 == 4.0

    def test_bad_header(self, tmp_path):
        path = w(tmp_path / "cells.csv", "cell,area\nc1,1.0\n")
        with pytest.raises(IngestError, match="header"):
            load_cells(path)

    def test_duplicate_id_cites_line(self, tmp_path):
        path = w(tmp_path / "cells.csv", "cell_id,area_km2\nc1,1.0\nc1,2.0\n")
        with pytest.raises(IngestError, match=r"csv:3:"):
            load_cells(path)

    def test_non_numeric_area(self, tmp_path):
        path = w(tmp_path / "cells.csv", "cell_id,area_km2\nc1,wide\n")
        with pytest.raises(IngestError, match="not a number"):
            load_cells(path)

    def test_zero_area(self, tmp_path):
        path = w(tmp_path / "cells.csv", "cell_id,area_km2\nc1,0.0\n")
        with pytest.raises(IngestError):
            load_cells(path)

    def test_wrong_field_count(self, tmp_path):
        path = w(tmp_path / "cells.csv", "cell_id,area_km2\nc1,1.0,extra\n")
        with pytest.raises(IngestError, match="fields"):
            load_cells(path)

    def test_empty_file(self, tmp_path):
        path = w(tmp_path / "cells.csv", "")
        with pytest.raises(IngestError, match="empty"):
            load_cells(path)

    def test_header_only(self, tmp_path):
        path = w(tmp_path / "cells.csv", "cell_id,area_km2\n")
        with pytest.raises(IngestError, match="no cells"):
            load_cells(path)

    def test_blank_lines_skipped(self, tmp_path):
        path = w(tmp_path / "cells.csv", "cell_id,area_km2\nc1,1.0\n\nc2,1.0\n")
        assert len(load_cells(path).cells) == 2

    def test_missing_file(self, tmp_path):
        with pytest.raises(IngestError, match="cannot open"):
            load_cells(str(tmp_path / "nope.csv"))


class TestLoadEvents:
    def test_good_file(self, tmp_path):
        grid = load_cells(w(tmp_path / "cells.csv", CELLS_CSV))
        events, rejected = load_events(
            w(tmp_path / "events.csv", EVENTS_CSV), grid
        )
        assert len(events) == 3
        assert rejected == ()
        assert events.periods() == ("p1", "p2")

    def test_unknown_cell_strict(self, tmp_path):
        grid = load_cells(w(tmp_path / "cells.csv", CELLS_CSV))
        path = w(
            tmp_path / "events.csv",
            "event_id,cell_id,period_id\ne1,c1,p1\ne2,zz,p1\n",
        )
        with pytest.raises(IngestError, match=r"csv:3:"):
            load_events(path, grid, strict=True)

    def test_unknown_cell_lenient(self, tmp_path):
        grid = load_cells(w(tmp_path / "cells.csv", CELLS_CSV))
        path = w(
            tmp_path / "events.csv",
            "event_id,cell_id,period_id\ne1,c1,p1\ne2,zz,p1\n",
        )
        events, rejected = load_events(path, grid, strict=False)
        assert len(events) == 1
        assert len(rejected) == 1
        assert rejected[0].event_id == "e2"
        assert rejected[0].reason == "unknown cell"

    def test_duplicate_event_id(self, tmp_path):
        grid = load_cells(w(tmp_path / "cells.csv", CELLS_CSV))
        path = w(
            tmp_path / "events.csv",
            "event_id,cell_id,period_id\ne1,c1,p1\ne1,c2,p1\n",
        )
        with pytest.raises(IngestError, match="duplicate event_id"):
            load_events(path, grid)


class TestLoadSelections:
    def test_good_file(self, tmp_path):
        known = frozenset({"c1", "c2", "c3"})
        sel = load_selections(
            w(tmp_path / "sel.csv", SELECTIONS_CSV), known
        )
        assert set(sel) == {"m1", "m2"}
        assert sel["m1"]["p1"].flagged == frozenset({"c1"})
        assert sel["m1"]["p2"].flagged == frozenset({"c2"})
        assert sel["m2"]["p1"].flagged == frozenset({"c3"})

    def test_unknown_id_always_an_error(self, tmp_path):
        path = w(
            tmp_path / "sel.csv", "model_id,period_id,cell_id\nm1,p1,zz\n"
        )
        with pytest.raises(IngestError, match="unknown cell"):
            load_selections(path, frozenset({"c1"}))

    def test_unit_kind_named_in_error(self, tmp_path):
        path = w(
            tmp_path / "sel.csv", "model_id,period_id,cell_id\nm1,p1,zz\n"
        )
        with pytest.raises(IngestError, match="unknown unit"):
            load_selections(path, frozenset({"u1"}), id_kind="unit")

    def test_duplicate_row(self, tmp_path):
        path = w(
            tmp_path / "sel.csv",
            "model_id,period_id,cell_id\nm1,p1,c1\nm1,p1,c1\n",
        )
        with pytest.raises(IngestError, match="duplicate selection"):
            load_selections(path, frozenset({"c1"}))


class TestLoadSurfaces:
    def surface_csv(self, rows):
        return "model_id,period_id,cell_id,probability\n" + "".join(
            f"{m},{p},{c},{v}\n" for m, p, c, v in rows
        )

    def test_good_file(self, tmp_path):
        grid = load_cells(w(tmp_path / "cells.csv", CELLS_CSV))
        text = self.surface_csv(
            [("m1", "p1", "c1", 0.5), ("m1", "p1", "c2", 0.25), ("m1", "p1", "c3", 0.25)]
        )
        surfaces = load_surfaces(w(tmp_path / "s.csv", text), grid)
        assert surfaces["m1"]["p1"].mass["c1"] == 0.5

    def test_incomplete_surface(self, tmp_path):
        grid = load_cells(w(tmp_path / "cells.csv", CELLS_CSV))
        text = self.surface_csv([("m1", "p1", "c1", 1.0)])
        with pytest.raises(IngestError, match="misses"):
            load_surfaces(w(tmp_path / "s.csv", text), grid)

    def test_mass_not_summing_to_one(self, tmp_path):
        grid = load_cells(w(tmp_path / "cells.csv", CELLS_CSV))
        text = self.surface_csv(
            [("m1", "p1", "c1", 0.5), ("m1", "p1", "c2", 0.3), ("m1", "p1", "c3", 0.3)]
        )
        with pytest.raises(IngestError, match="sum"):
            load_surfaces(w(tmp_path / "s.csv", text), grid)

    def test_renormalize_rescues_unnormalized_mass(self, tmp_path):
        grid = load_cells(w(tmp_path / "cells.csv", CELLS_CSV))
        text = self.surface_csv(
            [("m1", "p1", "c1", 5.0), ("m1", "p1", "c2", 3.0), ("m1", "p1", "c3", 2.0)]
        )
        surfaces = load_surfaces(w(tmp_path / "s.csv", text), grid, renormalize=True)
        np.testing.assert_allclose(surfaces["m1"]["p1"].mass["c1"], 0.5, atol=1e-12)

    def test_negative_probability(self, tmp_path):
        grid = load_cells(w(tmp_path / "cells.csv", CELLS_CSV))
        text = self.surface_csv(
            [("m1", "p1", "c1", 1.2), ("m1", "p1", "c2", -0.2), ("m1", "p1", "c3", 0.0)]
        )
        with pytest.raises(IngestError, match="non-negative"):
            load_surfaces(w(tmp_path / "s.csv", text), grid)

    def test_duplicate_entry(self, tmp_path):
        grid = load_cells(w(tmp_path / "cells.csv", CELLS_CSV))
        text = self.surface_csv(
            [("m1", "p1", "c1", 0.5), ("m1", "p1", "c1", 0.5)]
        )
        with pytest.raises(IngestError, match="duplicate surface"):
            load_surfaces(w(tmp_path / "s.csv", text), grid)


class TestLoadUnits:
    def test_fifteen_unit_table(self, tmp_path, fifteen_units):
        text = "unit_id,area_fraction,crime_fraction\n" + "".join(
            f"h{i:02d},{a},{n}\n"
            for i, (a, n) in enumerate(zip(AREA_FRACTIONS, CRIME_FRACTIONS), 1)
        )
        units = load_units(w(tmp_path / "units.csv", text))
        assert units == fifteen_units
        np.testing.assert_allclose(hit_rate(units), 0.83, atol=1e-12)
        np.testing.assert_allclose(coverage(units), 0.42, atol=1e-12)

    def test_duplicate_unit(self, tmp_path):
        text = "unit_id,area_fraction,crime_fraction\nu1,0.1,0.2\nu1,0.1,0.2\n"
        with pytest.raises(IngestError, match="duplicate unit_id"):
            load_units(w(tmp_path / "units.csv", text))

    def test_out_of_range_fraction(self, tmp_path):
        text = "unit_id,area_fraction,crime_fraction\nu1,1.7,0.2\n"
        with pytest.raises(IngestError):
            load_units(w(tmp_path / "units.csv", text))


class TestLoadDataset:
    def test_cell_mode(self, tmp_path):
        ds = load_dataset(
            cells=w(tmp_path / "cells.csv", CELLS_CSV),
            events=w(tmp_path / "events.csv", EVENTS_CSV),
            selections=w(tmp_path / "sel.csv", SELECTIONS_CSV),
        )
        assert ds.models() == ("m1", "m2")
        assert ds.periods() == ("p1", "p2")
        assert ds.grid is not None
        assert ds.units is None

    def test_units_mode(self, tmp_path):
        units = "unit_id,area_fraction,crime_fraction\nu1,0.1,0.3\nu2,0.2,0.2\n"
        sel = "model_id,period_id,cell_id\nm1,p1,u1\nm2,p1,u2\n"
        ds = load_dataset(
            units=w(tmp_path / "units.csv", units),
            selections=w(tmp_path / "sel.csv", sel),
        )
        assert ds.models() == ("m1", "m2")
        assert ds.grid is None
        assert ds.units_by_id()["u1"].crime_fraction == 0.3

    def test_selection_of_unknown_unit(self, tmp_path):
        units = "unit_id,area_fraction,crime_fraction\nu1,0.1,0.3\n"
        sel = "model_id,period_id,cell_id\nm1,p1,u9\n"
        with pytest.raises(IngestError, match="unknown unit"):
            load_dataset(
                units=w(tmp_path / "units.csv", units),
                selections=w(tmp_path / "sel.csv", sel),
            )

    def test_needs_cells_or_units(self, tmp_path):
        with pytest.raises(ValidationError):
            load_dataset(selections=w(tmp_path / "sel.csv", SELECTIONS_CSV))

    def test_events_need_cells(self, tmp_path):
        units = "unit_id,area_fraction,crime_fraction\nu1,0.1,0.3\n"
        with pytest.raises(ValidationError, match="cells"):
            load_dataset(
                units=w(tmp_path / "units.csv", units),
                events=w(tmp_path / "events.csv", EVENTS_CSV),
            )

    def test_no_models_defined(self, tmp_path):
        with pytest.raises(ValidationError, match="no models"):
            load_dataset(
                cells=w(tmp_path / "cells.csv", CELLS_CSV),
                events=w(tmp_path / "events.csv", EVENTS_CSV),
            )


class TestConfigPairs:
    def test_comments_blank_lines_and_last_wins(self, tmp_path):
        text = (
            "# a comment\n"
            "\n"
            "measures = hit_rate   # trailing comment\n"
            "measures = pai,coverage\n"
        )
        pairs = read_config_pairs(w(tmp_path / "run.conf", text))
        assert pairs == {"measures": "pai,coverage"}

    def test_line_without_equals(self, tmp_path):
        with pytest.raises(IngestError, match="key = value"):
            read_config_pairs(w(tmp_path / "run.conf", "just some words\n"))

    def test_empty_key(self, tmp_path):
        with pytest.raises(IngestError, match="empty key"):
            read_config_pairs(w(tmp_path / "run.conf", "= value\n"))


class TestLoadConfig:
    def test_empty_file_gives_defaults(self, tmp_path):
        config = load_config(w(tmp_path / "run.conf", ""))
        assert config == RunConfig()
        assert config.measures == ("hit_rate", "coverage", "pai")
        assert config.strict is True
        assert config.alpha_mode == "hit_rate"

    def test_unknown_key_strict(self, tmp_path):
        path = w(tmp_path / "run.conf", "no_such_key = 1\n")
        with pytest.raises(IngestError, match="no_such_key"):
            load_config(path)

    def test_unknown_key_lenient(self, tmp_path):
        path = w(tmp_path / "run.conf", "strict = off\nno_such_key = 1\n")
        config = load_config(path)
        assert config.strict is False

    def test_cli_strict_overrides_file(self, tmp_path):
        path = w(tmp_path / "run.conf", "strict = off\nno_such_key = 1\n")
        with pytest.raises(IngestError, match="no_such_key"):
            load_config(path, cli_strict=True)

    def test_unknown_measure(self, tmp_path):
        path = w(tmp_path / "run.conf", "measures = hit_rate,f1\n")
        with pytest.raises(IngestError, match="f1"):
            load_config(path)

    def test_empty_measures(self, tmp_path):
        path = w(tmp_path / "run.conf", "measures =\n")
        with pytest.raises(IngestError, match="empty"):
            load_config(path)

    def test_fixed_alpha_requires_value(self, tmp_path):
        path = w(
            tmp_path / "run.conf",
            "measures = ppai\nppai.alpha_mode = fixed\n",
        )
        with pytest.raises(IngestError, match="ppai.alpha"):
            load_config(path)

    def test_grid_search_requires_target(self, tmp_path):
        path = w(
            tmp_path / "run.conf",
            "measures = ppai\nppai.alpha_mode = grid_search\n",
        )
        with pytest.raises(IngestError, match="target_coverage"):
            load_config(path)

    def test_alpha_bounds(self, tmp_path):
        path = w(tmp_path / "run.conf", "ppai.alpha = 1.5\n")
        with pytest.raises(IngestError, match="\\[0, 1\\]"):
            load_config(path)

    def test_utilities_all_or_nothing(self, tmp_path):
        path = w(tmp_path / "run.conf", "eu.u_tp = 1\neu.u_fp = -0.5\n")
        with pytest.raises(IngestError, match="all-or-nothing"):
            load_config(path)

    def test_full_utilities(self, tmp_path):
        path = w(
            tmp_path / "run.conf",
            "eu.u_tp = 1\neu.u_fp = -0.5\neu.u_tn = 1\neu.u_fn = -1\n",
        )
        config = load_config(path)
        assert config.utilities is not None
        assert config.utilities.u_fp == -0.5

    def test_weights_extend_measures(self, tmp_path):
        path = w(
            tmp_path / "run.conf",
            "measures = hit_rate\nweights.hit_rate = 0.7\nweights.precision = 0.3\n",
        )
        config = load_config(path)
        assert config.weights is not None
        assert "precision" in config.measures

    def test_weights_must_sum_to_one(self, tmp_path):
        path = w(
            tmp_path / "run.conf",
            "weights.hit_rate = 0.7\nweights.precision = 0.4\n",
        )
        with pytest.raises(IngestError, match="weights"):
            load_config(path)

    def test_weight_for_unknown_measure(self, tmp_path):
        path = w(tmp_path / "run.conf", "weights.f1 = 1.0\n")
        with pytest.raises(IngestError, match="f1"):
            load_config(path)

    def test_orientation_override(self, tmp_path):
        path = w(tmp_path / "run.conf", "orientation.pai = lower\n")
        config = load_config(path)
        assert config.orientations["pai"] == "lower"
        assert config.orientations["hit_rate"] == "higher"

    def test_orientation_validation(self, tmp_path):
        path = w(tmp_path / "run.conf", "orientation.pai = sideways\n")
        with pytest.raises(IngestError, match="higher or lower"):
            load_config(path)

    def test_default_orientation_table(self):
        assert DEFAULT_ORIENTATION["fpr"] == "lower"
        assert all(
            v == "higher" for k, v in DEFAULT_ORIENTATION.items() if k != "fpr"
        )

    def test_bad_transform(self, tmp_path):
        path = w(tmp_path / "run.conf", "combine.score_transform = zscore\n")
        with pytest.raises(IngestError, match="score_transform"):
            load_config(path)

    def test_generator_defaults(self, tmp_path):
        path = w(tmp_path / "run.conf", "gen.seed = 42\n")
        config = load_config(path)
        g = config.generator
        assert g is not None
        assert g.seed == 42
        assert g.n_cells == 100
        assert g.n_periods == 12
        assert g.events_per_period == 100
        assert g.weights == (1.0,) * 100

    def test_generator_weight_length_mismatch(self, tmp_path):
        path = w(tmp_path / "run.conf", "gen.cells = 3\ngen.weights = 1,2\n")
        with pytest.raises(IngestError, match="gen"):
            load_config(path)

    def test_gen_top_k_bounds(self, tmp_path):
        path = w(tmp_path / "run.conf", "gen.cells = 5\ngen.top_k = 9\n")
        with pytest.raises(IngestError, match="top_k"):
            load_config(path)

    def test_config_echo_pairs(self, tmp_path):
        path = w(
            tmp_path / "run.conf",
            "measures = hit_rate,fpr\nppai.alpha = 0.5\nppai.alpha_mode = fixed\n",
        )
        pairs = dict(load_config(path).to_pairs())
        assert pairs["als.log_base"] == "e"
        assert pairs["ppai.alpha"] == "0.5"
        assert pairs["orientation.fpr"] == "lower"
        assert pairs["orientation.hit_rate"] == "higher"
        # orientations echoed only for the measures actually selected
        assert "orientation.pai" not in pairs


class TestWriters:
    def build(self):
        grid = GridSpec(cells=(Cell("c1", 1.0), Cell("c2", 1.5)))
        events = EventSet(
            events=(Event("e1", "c1", "p1"), Event("e2", "c2", "p1"))
        )
        selections = {
            "m1": {"p1": HotspotSelection(period="p1", flagged=frozenset({"c1"}))}
        }
        surfaces = {
            "m1": {"p1": ProbabilitySurface(period="p1", mass={"c1": 0.75, "c2": 0.25})}
        }
        units = (HotspotUnit("u1", 0.25, 0.5), HotspotUnit("u2", 0.1, 0.1))
        return grid, events, selections, surfaces, units

    def test_round_trip(self, tmp_path):
        grid, events, selections, surfaces, units = self.build()
        paths = {name: str(tmp_path / f"{name}.csv") for name in
                 ("cells", "events", "selections", "surfaces", "units")}
        write_cells(paths["cells"], grid)
        write_events(paths["events"], events)
        write_selections(paths["selections"], selections)
        write_surfaces(paths["surfaces"], surfaces)
        write_units(paths["units"], units)

        assert load_cells(paths["cells"]) == grid
        loaded_events, _ = load_events(paths["events"], grid)
        assert loaded_events == events
        assert load_selections(paths["selections"], grid.cell_ids) == selections
        assert load_surfaces(paths["surfaces"], grid) == surfaces
        assert load_units(paths["units"]) == units

    def test_writes_are_deterministic(self, tmp_path):
        grid, events, selections, surfaces, units = self.build()
        a, b = str(tmp_path / "a.csv"), str(tmp_path / "b.csv")
        write_surfaces(a, surfaces)
        write_surfaces(b, surfaces)
        assert open(a, "rb").read() == open(b, "rb").read()

    def test_float_fields_round_trip_exactly(self, tmp_path):
        # repr() emits the shortest string that parses back to the same float
        units = (HotspotUnit("u1", 0.1 + 0.2, 1 / 3),)
        path = str(tmp_path / "units.csv")
        write_units(path, units)
        assert load_units(path) == units
