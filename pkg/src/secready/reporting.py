"""Turns an aggregation result into the three assessor-facing views.

Histogram: paired achievement/priority series per domain or per control (the
two quantities always sum to the scale maximum, so a strong bar in one view is
a short bar in the other). Summary: final score on the scale, as a percent,
as a verbal predicate, plus strongest/weakest domains and a templated advice
line. Export: deterministic JSON/CSV/fixed-width renderings of any of these.

All views require a strict-mode (complete) result; a provisional result would
put numbers in front of an assessor that part of the tree never backed.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Literal, Union

from .scoring import AggregateResult, NodeScore, predicate_of, to_percent
from .serialize import canonical_json, display_round, fmt_percent, fmt_score

HistogramLevel = Literal["domains", "controls"]
ExportFormat = Literal["json", "csv", "text-table"]


class ProvisionalResultError(Exception):
    """Reports are produced from complete (strict-mode) results only."""

    def __init__(self) -> None:
        super().__init__("result is provisional (incomplete); finish the assessment first")


@dataclass(frozen=True)
class HistogramBar:
    node_id: str
    label: str
    achievement: float
    priority: float


@dataclass(frozen=True)
class HistogramSeries:
    level: HistogramLevel
    bars: tuple[HistogramBar, ...]


@dataclass(frozen=True)
class SummaryReport:
    overall_achievement: float
    overall_percent: float
    predicate: str
    strongest_domains: tuple[str, ...]
    weakest_domains: tuple[str, ...]
    advice: str


def _require_strict(result: AggregateResult) -> None:
    if result.mode != "strict":
        raise ProvisionalResultError()


def _control_nodes(root: NodeScore) -> list[NodeScore]:
    # Controls are the deepest aggregate layer: children present, all of them leaves.
    return [
        node
        for node in root.walk()
        if node.children and all(not c.children for c in node.children)
    ]


def histogram(result: AggregateResult, level: HistogramLevel) -> HistogramSeries:
    """One bar per domain or per control, framework pre-order, values unrounded."""
    _require_strict(result)
    if level == "domains":
        nodes = list(result.domains)
    elif level == "controls":
        nodes = _control_nodes(result.root)
    else:
        raise ValueError(f"level must be 'domains' or 'controls', not {level!r}")

    bars = []
    for node in nodes:
        assert node.achievement is not None and node.priority is not None
        bars.append(HistogramBar(node.node_id, node.label, node.achievement, node.priority))
    return HistogramSeries(level=level, bars=tuple(bars))


def summarize(result: AggregateResult) -> SummaryReport:
    """Overall score / percent / predicate plus argmax-argmin domains and advice.

    Strongest and weakest are sets: ties are reported in full, never broken
    arbitrarily. The advice line names every weakest domain with its priority.
    """
    _require_strict(result)
    overall = result.overall_achievement

    domains = result.domains
    achievements = [d.achievement for d in domains]
    assert all(a is not None for a in achievements)
    best = max(achievements)  # type: ignore[arg-type]
    worst = min(achievements)  # type: ignore[arg-type]
    strongest = tuple(d.node_id for d in domains if d.achievement == best)
    weakest = tuple(d.node_id for d in domains if d.achievement == worst)

    labels = {d.node_id: d.label for d in domains}
    priorities = {d.node_id: d.priority for d in domains}
    strongest_text = ", ".join(labels[i] for i in strongest)
    weakest_text = ", ".join(f"{labels[i]} (priority {fmt_score(priorities[i])})" for i in weakest)
    advice = f"Strongest area(s): {strongest_text}. Improvement priority: {weakest_text}."

    return SummaryReport(
        overall_achievement=overall,
        overall_percent=to_percent(overall, result.scale),
        predicate=predicate_of(overall, result.scale),
        strongest_domains=strongest,
        weakest_domains=weakest,
        advice=advice,
    )


# ---------------------------------------------------------------------------
# Plain-document forms (shared by export and the HTTP service)
# ---------------------------------------------------------------------------

def node_score_to_doc(score: NodeScore) -> dict:
    return {
        "node_id": score.node_id,
        "label": score.label,
        "achievement": score.achievement,
        "priority": score.priority,
        "coverage": score.coverage,
        "children": [node_score_to_doc(c) for c in score.children],
    }


def result_to_doc(result: AggregateResult) -> dict:
    return {
        "framework_id": result.framework_id,
        "mode": result.mode,
        "answered_count": result.answered_count,
        "total_leaves": result.total_leaves,
        "root": node_score_to_doc(result.root),
    }


def histogram_to_doc(series: HistogramSeries) -> dict:
    return {
        "level": series.level,
        "bars": [
            {
                "node_id": b.node_id,
                "label": b.label,
                "achievement": b.achievement,
                "priority": b.priority,
            }
            for b in series.bars
        ],
    }


def summary_to_doc(report: SummaryReport) -> dict:
    return {
        "overall_achievement": report.overall_achievement,
        "overall_percent": report.overall_percent,
        "predicate": report.predicate,
        "strongest_domains": list(report.strongest_domains),
        "weakest_domains": list(report.weakest_domains),
        "advice": report.advice,
    }


# ---------------------------------------------------------------------------
# Export
# ---------------------------------------------------------------------------

Exportable = Union[AggregateResult, HistogramSeries, SummaryReport]


def export(obj: Exportable, format: ExportFormat = "json") -> str:
    """Deterministic document rendering: same input, same bytes.

    JSON mirrors the type fields verbatim (canonical float text); CSV and the
    fixed-width text table show display-rounded values and are lossy by
    design: re-importing display output will not reproduce the underlying
    doubles.
    """
    if format == "json":
        return canonical_json(_to_doc(obj))
    if format == "csv":
        return _to_csv(obj)
    if format == "text-table":
        return _to_text_table(obj)
    raise ValueError(f"format must be json, csv or text-table, not {format!r}")


def _to_doc(obj: Exportable) -> dict:
    if isinstance(obj, AggregateResult):
        return result_to_doc(obj)
    if isinstance(obj, HistogramSeries):
        return histogram_to_doc(obj)
    if isinstance(obj, SummaryReport):
        return summary_to_doc(obj)
    raise TypeError(f"cannot export {type(obj).__name__}")


def _score_rows(obj: Exportable) -> list[tuple[str, str, float, float]]:
    if isinstance(obj, HistogramSeries):
        return [(b.node_id, b.label, b.achievement, b.priority) for b in obj.bars]
    if isinstance(obj, AggregateResult):
        rows = []
        for node in obj.root.walk():
            if node.achievement is None or node.priority is None:
                continue
            rows.append((node.node_id, node.label, node.achievement, node.priority))
        return rows
    raise TypeError(f"no tabular form for {type(obj).__name__}")


def _to_csv(obj: Exportable) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    if isinstance(obj, SummaryReport):
        writer.writerow(["field", "value"])
        writer.writerow(["overall_achievement", fmt_score(obj.overall_achievement)])
        writer.writerow(["overall_percent", f"{display_round(obj.overall_percent):.2f}"])
        writer.writerow(["predicate", obj.predicate])
        writer.writerow(["strongest_domains", ";".join(obj.strongest_domains)])
        writer.writerow(["weakest_domains", ";".join(obj.weakest_domains)])
        writer.writerow(["advice", obj.advice])
    else:
        writer.writerow(["node_id", "label", "achievement", "priority"])
        for node_id, label, achievement, priority in _score_rows(obj):
            writer.writerow([node_id, label, fmt_score(achievement), fmt_score(priority)])
    return out.getvalue()


def _to_text_table(obj: Exportable) -> str:
    if isinstance(obj, SummaryReport):
        rows = [
            ("overall", fmt_score(obj.overall_achievement)),
            ("percent", fmt_percent(obj.overall_percent)),
            ("predicate", obj.predicate),
            ("strongest", ", ".join(obj.strongest_domains)),
            ("weakest", ", ".join(obj.weakest_domains)),
            ("advice", obj.advice),
        ]
        width = max(len(k) for k, _ in rows)
        return "\n".join(f"{k.ljust(width)}  {v}" for k, v in rows) + "\n"

    rows = _score_rows(obj)
    header = ("node_id", "label", "achievement", "priority")
    text_rows = [header] + [
        (node_id, label, fmt_score(a), fmt_score(p)) for node_id, label, a, p in rows
    ]
    widths = [max(len(r[i]) for r in text_rows) for i in range(4)]
    lines = []
    for i, row in enumerate(text_rows):
        lines.append("  ".join(cell.ljust(widths[j]) for j, cell in enumerate(row)).rstrip())
        if i == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def text_histogram(series: HistogramSeries) -> str:
    """ASCII bar fallback for terminals: one '#' per 0.1 achievement."""
    if not series.bars:
        return ""
    width = max(len(b.node_id) for b in series.bars)
    lines = []
    for bar in series.bars:
        blocks = "#" * int(round(bar.achievement * 10))
        lines.append(
            f"{bar.node_id.ljust(width)}  {fmt_score(bar.achievement)} "
            f"(priority {fmt_score(bar.priority)}) |{blocks}"
        )
    return "\n".join(lines) + "\n"
