"""Batch command-line front end.

Four subcommands:

* ``evaluate`` — all requested measures per model per period, with
  mean/std summaries across periods.
* ``compare`` — adds measure combination (expected utility or weighted
  sums) and pairwise Wilcoxon signed-rank tests with Bonferroni-adjusted
  p-values.
* ``optimize-alpha`` — the PPAI penalty grid search over a pre-aggregated
  units table.
* ``gen`` — seeded synthetic dataset generation in the ingest formats.

Reports are deterministic: the same inputs, configuration and tool version
always produce the same bytes. Exit status is 0 exactly when a full report
was produced.
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys
from typing import Optional, Sequence

from . import __version__, combine, metrics, stats, synth
from .alpha_search import cumulative_levels, optimal_alpha, order_units
from .domain import EventSet, contingency
from .errors import (
    AlphaSearchError,
    GridscoreError,
    ValidationError,
)
from .ingest import (
    MEASURE_IDS,
    UNIT_MEASURES,
    Dataset,
    RunConfig,
    load_config,
    load_dataset,
    load_units,
    write_cells,
    write_events,
    write_selections,
    write_surfaces,
)
from .report import FORMAT_VERSION, Report, fmt

_RATE_FIELDS = {
    "sensitivity": "sensitivity",
    "specificity": "specificity",
    "precision": "ppv",
    "npv": "npv",
    "accuracy": "accuracy",
    "fpr": "fpr",
}


def _dataset_inputs(dataset: Dataset) -> list[tuple[str, str]]:
    inputs = [
        ("models", ",".join(dataset.models())),
        ("periods", ",".join(dataset.periods())),
    ]
    if dataset.grid is not None:
        inputs.append(("n_cells", str(len(dataset.grid.cells))))
        inputs.append(("total_area_km2", fmt(dataset.grid.total_area_km2)))
    if dataset.events is not None:
        inputs.append(("n_events", str(len(dataset.events))))
        inputs.append(("n_rejected_rows", str(len(dataset.rejected))))
    if dataset.units is not None:
        inputs.append(("n_units", str(len(dataset.units))))
    return inputs


def _resolve_global_alpha(
    config: RunConfig, dataset: Dataset, report: Report
) -> Optional[float]:
    """The alpha applying to every PPAI row, or None for per-row n/N."""
    if "ppai" not in config.measures:
        return None
    if config.alpha_mode == "fixed":
        return config.alpha
    if config.alpha_mode == "hit_rate":
        return None  # resolved per model and period, to that row's n/N
    # grid_search: needs the pre-aggregated units table to define levels.
    if not dataset.units:
        raise ValidationError(
            "ppai.alpha_mode = grid_search needs a units file to define "
            "the cumulative levels"
        )
    levels = cumulative_levels(order_units(dataset.units))
    result = optimal_alpha(
        levels, config.target_coverage, grid_step=config.grid_step
    )
    lo, hi = result.valid_range
    report.alpha_info = [
        ("alpha_star", fmt(result.alpha_star)),
        ("valid_range_high", fmt(hi)),
        ("valid_range_low", fmt(lo)),
        ("target_prefix_len", str(result.target_level.prefix_len)),
        ("target_cum_area", fmt(result.target_level.cum_area)),
        ("target_cum_crime", fmt(result.target_level.cum_crime)),
    ]
    return result.alpha_star


def _unit_measure_rows(
    dataset: Dataset, config: RunConfig, report: Report, global_alpha: Optional[float]
) -> None:
    bad = [m for m in config.measures if m not in UNIT_MEASURES]
    if bad:
        raise ValidationError(
            f"measures {', '.join(bad)} need cell-level data; a units-only "
            f"dataset supports {', '.join(UNIT_MEASURES)}"
        )
    by_id = dataset.units_by_id()
    for model in dataset.models():
        for period in sorted(dataset.selections.get(model, {})):
            selection = dataset.selections[model][period]
            selected = [by_id[uid] for uid in sorted(selection.flagged)]
            hit = metrics.hit_rate(selected)
            cov = metrics.coverage(selected)
            values = {"hit_rate": hit, "coverage": cov}
            if "pai" in config.measures:
                values["pai"] = metrics.pai(hit, cov)
            if "ppai" in config.measures:
                alpha = global_alpha if global_alpha is not None else hit
                values["ppai"] = metrics.ppai(hit, cov, alpha)
            for measure in config.measures:
                report.measure_rows.append((model, period, measure, values[measure]))


def _cell_measure_rows(
    dataset: Dataset, config: RunConfig, report: Report, global_alpha: Optional[float]
) -> None:
    if dataset.events is None:
        raise ValidationError("cell-level evaluation needs an events file")
    grid = dataset.grid
    needs_selection = [m for m in config.measures if m != "als"]
    for model in dataset.models():
        sel_periods = set(dataset.selections.get(model, {}))
        surf_periods = set(dataset.surfaces.get(model, {}))
        for period in sorted(sel_periods | surf_periods):
            rows: list[tuple[str, Optional[float]]] = []
            if period in sel_periods and needs_selection:
                selection = dataset.selections[model][period]
                table = contingency(grid, selection, dataset.events, period)
                rates = metrics.rates_from_contingency(table)
                hit = metrics.hit_rate_from_events(
                    grid, selection, dataset.events, period
                )
                cov = metrics.coverage_from_cells(grid, selection)
                if hit is None:
                    report.warnings.append(
                        f"model {model} period {period}: no events, "
                        f"event-level rates undefined"
                    )
                for measure in config.measures:
                    if measure in _RATE_FIELDS:
                        value = getattr(rates, _RATE_FIELDS[measure])
                    elif measure == "hit_rate":
                        value = hit
                    elif measure == "coverage":
                        value = cov
                    elif measure == "pai":
                        value = None if hit is None else metrics.pai(hit, cov)
                    elif measure == "ppai":
                        if global_alpha is not None:
                            alpha = global_alpha
                        else:
                            alpha = hit  # alpha_mode = hit_rate
                        value = (
                            None
                            if hit is None or alpha is None
                            else metrics.ppai(hit, cov, alpha)
                        )
                    elif measure == "ser":
                        hits = sum(
                            1
                            for e in dataset.events.in_period(period)
                            if e.cell_id in selection.flagged
                        )
                        area = cov * grid.total_area_km2
                        value = metrics.ser(hits, area)
                    else:  # als, handled below
                        continue
                    rows.append((measure, value))
            if "als" in config.measures and period in surf_periods:
                surface = dataset.surfaces[model][period]
                restrict = None
                if config.als_restrict_to_hotspots:
                    restrict = dataset.selections.get(model, {}).get(period)
                    if restrict is None:
                        report.warnings.append(
                            f"model {model} period {period}: als restriction "
                            f"requested but model has no selection here"
                        )
                floor = (
                    config.als_floor_epsilon if config.als_floor_enabled else None
                )
                scoped = dataset.events.in_period(period)
                if restrict is not None:
                    scoped = tuple(
                        e for e in scoped if e.cell_id in restrict.flagged
                    )
                if scoped:
                    value = metrics.als(
                        surface,
                        dataset.events,
                        period,
                        restrict_to=restrict,
                        floor=floor,
                    )
                else:
                    value = None
                    report.warnings.append(
                        f"model {model} period {period}: no events in scope, "
                        f"als undefined"
                    )
                rows.append(("als", value))
            for measure, value in rows:
                report.measure_rows.append((model, period, measure, value))


def _expected_utility_rows(
    dataset: Dataset, config: RunConfig, report: Report
) -> None:
    for model in dataset.models():
        for period in sorted(dataset.selections.get(model, {})):
            selection = dataset.selections[model][period]
            table = contingency(dataset.grid, selection, dataset.events, period)
            try:
                rates = combine.conditional_rates(table)
            except ValidationError as exc:
                report.warnings.append(
                    f"model {model} period {period}: expected utility "
                    f"undefined ({exc})"
                )
                report.measure_rows.append(
                    (model, period, "expected_utility", None)
                )
                continue
            value = combine.expected_utility(rates, config.utilities)
            report.measure_rows.append((model, period, "expected_utility", value))


def _collect_series(report: Report) -> dict[str, dict[str, list[tuple[str, float]]]]:
    """measure → model → [(period, value)] over the defined measure rows."""
    series: dict[str, dict[str, list[tuple[str, float]]]] = {}
    for model, period, measure, value in report.measure_rows:
        if value is None:
            continue
        series.setdefault(measure, {}).setdefault(model, []).append(
            (period, value)
        )
    for by_model in series.values():
        for rows in by_model.values():
            rows.sort()
    return series


def _summary_rows(report: Report) -> None:
    series = _collect_series(report)
    for measure in sorted(series):
        for model in sorted(series[measure]):
            ps = stats.PeriodSeries(measure, model, tuple(series[measure][model]))
            mean, std = stats.summarize(ps)
            report.summary_rows.append((model, measure, mean, std))


def _measure_means(report: Report) -> dict[str, dict[str, float]]:
    means: dict[str, dict[str, float]] = {}
    for model, measure, mean, _ in report.summary_rows:
        means.setdefault(measure, {})[model] = mean
    return means


def _combined_rows(dataset: Dataset, config: RunConfig, report: Report) -> None:
    means = _measure_means(report)
    if config.utilities is not None:
        scores = means.get("expected_utility", {})
        if len(scores) < 2:
            raise ValidationError(
                "expected-utility ranking needs at least two models with a "
                "defined expected utility"
            )
        excluded = sorted(set(dataset.models()) - set(scores))
        for model in excluded:
            report.warnings.append(
                f"model {model}: excluded from combined ranking "
                f"(no expected utility)"
            )
        report.combined_rule = "expected_utility(mean over periods)"
        ranks = combine.rank_models(scores, higher_is_better=True)
        report.combined_rows = [
            (model, scores[model], ranks[model]) for model in sorted(scores)
        ]
        return

    if config.weights is not None:
        measures = sorted(config.weights.weights)
        eligible = None
        for measure in measures:
            have = set(means.get(measure, {}))
            eligible = have if eligible is None else eligible & have
        eligible = eligible or set()
        if len(eligible) < 2:
            raise ValidationError(
                f"weighted ranking needs at least two models with every "
                f"weighted measure defined ({', '.join(measures)})"
            )
        excluded = sorted(set(dataset.models()) - eligible)
        for model in excluded:
            report.warnings.append(
                f"model {model}: excluded from combined ranking "
                f"(missing a weighted measure)"
            )
        table: dict[str, dict[str, float]] = {}
        for measure in measures:
            scores = {m: means[measure][m] for m in sorted(eligible)}
            orientation = config.orientations.get(measure, "higher")
            if config.score_transform == "raw":
                if orientation == "lower":
                    raise ValidationError(
                        f"measure {measure!r} is lower-is-better; raw "
                        f"weighted sums would reward the wrong direction — "
                        f"use the standardized or rank transform"
                    )
                table[measure] = scores
            elif config.score_transform == "standardized":
                z = combine.standardize(scores)
                if orientation == "lower":
                    z = {m: -v for m, v in z.items()}
                table[measure] = z
            else:  # rank
                table[measure] = combine.rank_models(
                    scores, higher_is_better=(orientation == "higher")
                )
        aggregate = combine.weighted_aggregate(table, config.weights)
        # Weighted ranks: small is good. Raw/standardized sums: big is good.
        higher_better = config.score_transform != "rank"
        ranks = combine.rank_models(aggregate, higher_is_better=higher_better)
        report.combined_rule = f"weighted_sum({config.score_transform})"
        report.combined_rows = [
            (model, aggregate[model], ranks[model]) for model in sorted(aggregate)
        ]
        return

    # Neither utilities nor weights: fall back to ranking on the first
    # requested measure's mean, so compare always states a full ordering.
    first = config.measures[0]
    scores = means.get(first, {})
    if len(scores) < 2:
        raise ValidationError(
            f"fallback ranking on {first!r} needs at least two models with "
            f"a defined value"
        )
    orientation = config.orientations.get(first, "higher")
    ranks = combine.rank_models(scores, higher_is_better=(orientation == "higher"))
    report.combined_rule = f"rank_by_mean({first})"
    report.combined_rows = [
        (model, scores[model], ranks[model]) for model in sorted(scores)
    ]


def _wsr_rows(dataset: Dataset, config: RunConfig, report: Report) -> None:
    series = _collect_series(report)
    models = dataset.models()
    measures = list(config.measures)
    if config.utilities is not None:
        measures.append("expected_utility")
    skipped: set[tuple[str, str]] = set()
    for measure in sorted(set(measures)):
        by_model = series.get(measure, {})
        tested = []
        for i, model_a in enumerate(models):
            for model_b in models[i + 1 :]:
                a = dict(by_model.get(model_a, ()))
                b = dict(by_model.get(model_b, ()))
                shared = sorted(set(a) & set(b))
                if not shared:
                    skipped.add((model_a, model_b))
                    continue
                pairs = [(a[p], b[p]) for p in shared]
                result = stats.wilcoxon_signed_rank(pairs)
                tested.append((model_a, model_b, result))
        adjusted = stats.bonferroni([r.p_value for _, _, r in tested])
        for (model_a, model_b, result), p_adj in zip(tested, adjusted):
            report.wsr_rows.append(
                (
                    measure,
                    model_a,
                    model_b,
                    result.n_used,
                    result.w_plus,
                    result.method,
                    result.p_value,
                    p_adj,
                )
            )
    for model_a, model_b in sorted(skipped):
        report.warnings.append(
            f"wsr skipped for {model_a}/{model_b}: no shared periods with "
            f"defined values"
        )


def _load_run(args) -> tuple[Dataset, RunConfig]:
    cli_strict = None
    if args.strict:
        cli_strict = True
    elif args.lenient:
        cli_strict = False
    if args.config is not None:
        config = load_config(args.config, cli_strict=cli_strict)
    else:
        config = RunConfig(strict=cli_strict if cli_strict is not None else True)
    dataset = load_dataset(
        cells=args.cells,
        events=args.events,
        selections=args.selections,
        surfaces=args.surfaces,
        units=args.units,
        strict=config.strict,
        renormalize_surfaces=args.renormalize_surfaces,
    )
    return dataset, config


def cmd_evaluate(args) -> Report:
    dataset, config = _load_run(args)
    report = Report(command="evaluate")
    report.config_pairs = config.to_pairs()
    report.inputs = _dataset_inputs(dataset)
    if dataset.rejected:
        report.warnings.append(
            f"{len(dataset.rejected)} event rows dropped (unknown cells)"
        )
    global_alpha = _resolve_global_alpha(config, dataset, report)
    if dataset.grid is None:
        _unit_measure_rows(dataset, config, report, global_alpha)
    else:
        _cell_measure_rows(dataset, config, report, global_alpha)
    if not report.measure_rows:
        raise ValidationError(
            "nothing to compute: no model has inputs for any requested measure"
        )
    _summary_rows(report)
    return report


def cmd_compare(args) -> Report:
    dataset, config = _load_run(args)
    if len(dataset.models()) < 2:
        raise ValidationError(
            f"compare needs at least two models, found {len(dataset.models())}"
        )
    report = Report(command="compare")
    report.config_pairs = config.to_pairs()
    report.inputs = _dataset_inputs(dataset)
    if dataset.rejected:
        report.warnings.append(
            f"{len(dataset.rejected)} event rows dropped (unknown cells)"
        )
    global_alpha = _resolve_global_alpha(config, dataset, report)
    if dataset.grid is None:
        if config.utilities is not None:
            raise ValidationError(
                "expected utility needs cell-level data (a contingency "
                "table), not a pre-aggregated units table"
            )
        _unit_measure_rows(dataset, config, report, global_alpha)
    else:
        _cell_measure_rows(dataset, config, report, global_alpha)
        if config.utilities is not None:
            if dataset.events is None:
                raise ValidationError("expected utility needs an events file")
            _expected_utility_rows(dataset, config, report)
    _summary_rows(report)
    _combined_rows(dataset, config, report)
    _wsr_rows(dataset, config, report)
    return report


def cmd_optimize_alpha(args) -> Report:
    units = load_units(args.units)
    ordered = order_units(units)
    levels = cumulative_levels(ordered)
    result = optimal_alpha(levels, args.target, grid_step=args.grid_step)
    report = Report(command="optimize-alpha")
    report.config_pairs = [
        ("ppai.grid_step", fmt(args.grid_step)),
        ("ppai.target_coverage", fmt(args.target)),
    ]
    report.inputs = [("n_units", str(len(units)))]
    lo, hi = result.valid_range
    report.alpha_info = [
        ("alpha_star", fmt(result.alpha_star)),
        ("valid_range_high", fmt(hi)),
        ("valid_range_low", fmt(lo)),
        ("target_prefix_len", str(result.target_level.prefix_len)),
        ("target_cum_area", fmt(result.target_level.cum_area)),
        ("target_cum_crime", fmt(result.target_level.cum_crime)),
    ]
    for unit, level in zip(ordered, levels):
        report.level_rows.append(
            (
                level.prefix_len,
                unit.id,
                level.cum_area,
                level.cum_crime,
                level.ppai(result.alpha_star),
            )
        )
    return report


def cmd_gen(args) -> Report:
    config = load_config(args.config)
    if config.generator is None:
        raise ValidationError(
            "gen needs a gen.* section in the config (at least one gen key)"
        )
    spec = config.generator
    if args.seed is not None:
        spec = dataclasses.replace(spec, seed=args.seed)
    if spec.n_periods < 2:
        raise ValidationError(
            "gen needs at least two periods: the baselines train on each "
            "period and predict the next"
        )
    grid = synth.make_grid(spec)
    events = synth.generate_events(spec)
    top_k = config.gen_top_k
    if top_k is None:
        top_k = max(1, spec.n_cells // 10)

    selections: dict[str, dict[str, object]] = {"top_k": {}}
    surfaces: dict[str, dict[str, object]] = {"empirical": {}, "uniform": {}}
    periods = spec.period_ids()
    for prev, period in zip(periods, periods[1:]):
        train = EventSet(events.in_period(prev))
        selections["top_k"][period] = synth.top_k_baseline(
            train, grid, top_k, period
        )
        surfaces["empirical"][period] = synth.empirical_surface(
            train, grid, period, smoothing=config.gen_smoothing
        )
        surfaces["uniform"][period] = synth.uniform_surface(grid, period)

    os.makedirs(args.out_dir, exist_ok=True)
    paths = {
        "cells.csv": lambda p: write_cells(p, grid),
        "events.csv": lambda p: write_events(p, events),
        "selections.csv": lambda p: write_selections(p, selections),
        "surfaces.csv": lambda p: write_surfaces(p, surfaces),
    }
    for name in sorted(paths):
        paths[name](os.path.join(args.out_dir, name))

    report = Report(command="gen")
    report.config_pairs = [
        (k, v)
        for k, v in dataclasses.replace(config, generator=spec).to_pairs()
        if k.startswith("gen.")
    ]
    report.inputs = [
        ("n_cells", str(spec.n_cells)),
        ("n_events", str(len(events))),
        ("n_periods", str(spec.n_periods)),
        ("seed", str(spec.seed)),
    ]
    report.generated_files = sorted(paths)
    return report


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gridscore",
        description="Scoring and comparison of gridded hotspot forecasts.",
    )
    parser.add_argument(
        "--version",
        action="version",
        version=f"gridscore {__version__} (report format {FORMAT_VERSION})",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add_io(p, needs_dataset=True):
        if needs_dataset:
            p.add_argument("--cells", help="cells file (cell_id,area_km2)")
            p.add_argument("--events", help="events file (event_id,cell_id,period_id)")
            p.add_argument(
                "--selections", help="selections file (model_id,period_id,cell_id)"
            )
            p.add_argument(
                "--surfaces",
                help="surfaces file (model_id,period_id,cell_id,probability)",
            )
            p.add_argument(
                "--units", help="units file (unit_id,area_fraction,crime_fraction)"
            )
            p.add_argument("--config", help="run configuration (key = value lines)")
            p.add_argument(
                "--renormalize-surfaces",
                action="store_true",
                help="rescale surface masses to sum to 1 instead of erroring",
            )
            mode = p.add_mutually_exclusive_group()
            mode.add_argument(
                "--strict",
                action="store_true",
                help="reject any invalid row (default)",
            )
            mode.add_argument(
                "--lenient",
                action="store_true",
                help="drop and count invalid event rows instead of failing",
            )
        p.add_argument("--out", help="write the report here instead of stdout")

    p_eval = sub.add_parser("evaluate", help="score each model per period")
    add_io(p_eval)
    p_eval.set_defaults(func=cmd_evaluate)

    p_cmp = sub.add_parser(
        "compare", help="combine measures and test model differences"
    )
    add_io(p_cmp)
    p_cmp.set_defaults(func=cmd_compare)

    p_opt = sub.add_parser(
        "optimize-alpha", help="grid-search the PPAI penalty exponent"
    )
    p_opt.add_argument("--units", required=True, help="units file")
    p_opt.add_argument(
        "--target",
        required=True,
        type=float,
        help="desired cumulative coverage, a fraction in (0, 1)",
    )
    p_opt.add_argument(
        "--grid-step", type=float, default=0.01, help="alpha grid spacing"
    )
    p_opt.add_argument("--out", help="write the report here instead of stdout")
    p_opt.set_defaults(func=cmd_optimize_alpha)

    p_gen = sub.add_parser("gen", help="generate a seeded synthetic dataset")
    p_gen.add_argument("--config", required=True, help="config with a gen.* section")
    p_gen.add_argument("--out-dir", required=True, help="directory for the files")
    p_gen.add_argument(
        "--seed", type=int, help="override gen.seed from the config"
    )
    p_gen.add_argument("--out", help="write the report here instead of stdout")
    p_gen.set_defaults(func=cmd_gen)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report = args.func(args)
    except AlphaSearchError as exc:
        print(f"gridscore: error: {exc}", file=sys.stderr)
        for alpha, peak in exc.diagnostics[:12]:
            print(f"  alpha {alpha!r} peaked at level {peak}", file=sys.stderr)
        if len(exc.diagnostics) > 12:
            print(f"  ... {len(exc.diagnostics) - 12} more", file=sys.stderr)
        return 1
    except GridscoreError as exc:
        print(f"gridscore: error: {exc}", file=sys.stderr)
        return 1
    text = report.render()
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
