"""Deterministic plain-text reports.

A report is structured text: a preamble, then named ``[sections]`` holding
either ``key = value`` lines (sorted) or a small DSV table with a header
row. Rows are sorted before rendering and floats are written with repr()
(the shortest round-tripping form), so a given input, configuration and
tool version always renders to the same bytes.

Rates with a zero denominator appear as the literal token ``undefined`` —
never 0, never NaN.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

from . import __version__

FORMAT_VERSION = 1

Value = Union[float, int, str, None]


def fmt(value: Value) -> str:
    """Render one value: repr for floats, 'undefined' for None."""
    if value is None:
        return "undefined"
    if isinstance(value, float):
        return repr(value)
    return str(value)


@dataclass
class Report:
    """Everything a command produced, ready to render deterministically."""

    command: str
    config_pairs: list[tuple[str, str]] = field(default_factory=list)
    inputs: list[tuple[str, str]] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    # model_id, period_id, measure, value
    measure_rows: list[tuple[str, str, str, Value]] = field(default_factory=list)
    # model_id, measure, mean, std
    summary_rows: list[tuple[str, str, Value, Value]] = field(default_factory=list)
    alpha_info: list[tuple[str, str]] = field(default_factory=list)
    # prefix_len, unit_id, cum_area, cum_crime, ppai_at_alpha_star
    level_rows: list[tuple[int, str, float, float, float]] = field(
        default_factory=list
    )
    combined_rule: Optional[str] = None
    # model_id, score, rank
    combined_rows: list[tuple[str, float, float]] = field(default_factory=list)
    # measure, model_a, model_b, n_used, w_plus, method, p, p_bonferroni
    wsr_rows: list[
        tuple[str, str, str, int, float, str, float, float]
    ] = field(default_factory=list)
    generated_files: list[str] = field(default_factory=list)

    def render(self) -> str:
        lines = [
            "# gridscore report",
            f"format_version = {FORMAT_VERSION}",
            f"tool_version = {__version__}",
            f"command = {self.command}",
            "",
            "[config]",
        ]
        for key, value in sorted(self.config_pairs):
            lines.append(f"{key} = {value}")
        lines.append("")

        lines.append("[inputs]")
        for key, value in sorted(self.inputs):
            lines.append(f"{key} = {value}")
        lines.append("")

        lines.append("[warnings]")
        if self.warnings:
            lines.extend(sorted(self.warnings))
        else:
            lines.append("none")
        lines.append("")

        if self.alpha_info:
            lines.append("[alpha]")
            for key, value in sorted(self.alpha_info):
                lines.append(f"{key} = {value}")
            lines.append("")

        if self.level_rows:
            lines.append("[levels]")
            lines.append("prefix_len,unit_id,cum_area,cum_crime,ppai_at_alpha_star")
            for row in sorted(self.level_rows):
                prefix_len, unit_id, cum_area, cum_crime, score = row
                lines.append(
                    f"{prefix_len},{unit_id},{fmt(cum_area)},"
                    f"{fmt(cum_crime)},{fmt(score)}"
                )
            lines.append("")

        if self.measure_rows:
            lines.append("[measures]")
            lines.append("model_id,period_id,measure,value")
            for model, period, measure, value in sorted(
                self.measure_rows, key=lambda r: (r[0], r[1], r[2])
            ):
                lines.append(f"{model},{period},{measure},{fmt(value)}")
            lines.append("")

        if self.summary_rows:
            lines.append("[summary]")
            lines.append("model_id,measure,mean,std")
            for model, measure, mean, std in sorted(
                self.summary_rows, key=lambda r: (r[0], r[1])
            ):
                lines.append(f"{model},{measure},{fmt(mean)},{fmt(std)}")
            lines.append("")

        if self.combined_rule is not None:
            lines.append("[combined]")
            lines.append(f"rule = {self.combined_rule}")
            lines.append("model_id,score,rank")
            for model, score, rank in sorted(self.combined_rows):
                lines.append(f"{model},{fmt(score)},{fmt(rank)}")
            lines.append("")

        if self.wsr_rows:
            lines.append("[wsr]")
            lines.append(
                "measure,model_a,model_b,n_used,w_plus,method,p,p_bonferroni"
            )
            for row in sorted(self.wsr_rows, key=lambda r: (r[0], r[1], r[2])):
                measure, a, b, n_used, w_plus, method, p, p_adj = row
                lines.append(
                    f"{measure},{a},{b},{n_used},{fmt(w_plus)},{method},"
                    f"{fmt(p)},{fmt(p_adj)}"
                )
            lines.append("")

        if self.generated_files:
            lines.append("[files]")
            lines.extend(sorted(self.generated_files))
            lines.append("")

        return "\n".join(lines)
