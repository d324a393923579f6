"""Corpus evaluation: matching readings against ground truth.

One image's predictions (its reading's assignments) are matched greedily
against its ground-truth saint list; pooled true/false positive and false
negative counts across the corpus yield per-saint precision and recall.
Counts are pooled before dividing (micro-averaging); per-image rates are
never averaged.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import IdMismatchError, MissingTruthError
from .geometry import BoundingBox
from .reading import Reading


@dataclass(frozen=True)
class TruthEntry:
    """One annotated saint; the box, when given, bounds the saint's figure."""

    saint: str
    box: BoundingBox | None = None


@dataclass(frozen=True)
class GroundTruthRecord:
    image_id: str
    saints: tuple[TruthEntry, ...]

    def __post_init__(self) -> None:
        if not self.image_id:
            raise ValueError("ground truth needs a non-empty image_id")
        boxless = [e.saint for e in self.saints if e.box is None]
        duplicates = sorted({s for s in boxless if boxless.count(s) > 1})
        if duplicates:
            raise ValueError(
                f"ground truth for {self.image_id!r} repeats saints without boxes: {duplicates}"
            )


@dataclass(frozen=True)
class ConfusionCounts:
    true_positives: int = 0
    false_positives: int = 0
    false_negatives: int = 0

    def __post_init__(self) -> None:
        if min(self.true_positives, self.false_positives, self.false_negatives) < 0:
            raise ValueError("confusion counts must be non-negative")

    def __add__(self, other: "ConfusionCounts") -> "ConfusionCounts":
        return ConfusionCounts(
            self.true_positives + other.true_positives,
            self.false_positives + other.false_positives,
            self.false_negatives + other.false_negatives,
        )


def precision(counts: ConfusionCounts) -> float | None:
    """TP / (TP + FP); absent (None) when nothing was predicted."""
    denominator = counts.true_positives + counts.false_positives
    if denominator == 0:
        return None
    return counts.true_positives / denominator


def recall(counts: ConfusionCounts) -> float | None:
    """TP / (TP + FN); absent (None) when nothing was annotated."""
    denominator = counts.true_positives + counts.false_negatives
    if denominator == 0:
        return None
    return counts.true_positives / denominator


def match_reading(reading: Reading, truth: GroundTruthRecord) -> dict[str, ConfusionCounts]:
    """Greedy per-saint matching of one reading against one truth record.

    Predictions are visited by attribute confidence descending (ties:
    saint name, then figure id) and each claims the first still-unmatched
    truth entry naming the same saint.  A truth entry carrying a box only
    accepts a prediction whose figure centroid lies inside that box.
    Matched pairs are true positives; leftover predictions are false
    positives; leftover truth entries are false negatives.
    """
    if reading.image_id != truth.image_id:
        raise IdMismatchError(
            f"reading for {reading.image_id!r} matched against truth for {truth.image_id!r}"
        )
    predictions = sorted(
        reading.assignments,
        key=lambda a: (-a.attribute_confidence, a.saint, a.figure_id),
    )
    matched = [False] * len(truth.saints)
    counts: dict[str, ConfusionCounts] = {}

    def bump(saint: str, tp: int = 0, fp: int = 0, fn: int = 0) -> None:
        counts[saint] = counts.get(saint, ConfusionCounts()) + ConfusionCounts(tp, fp, fn)

    for pred in predictions:
        pred_centroid = reading.figure_by_id(pred.figure_id).centroid
        hit = None
        for i, entry in enumerate(truth.saints):
            if matched[i] or entry.saint != pred.saint:
                continue
            if entry.box is not None and not entry.box.contains(pred_centroid):
                continue
            hit = i
            break
        if hit is None:
            bump(pred.saint, fp=1)
        else:
            matched[hit] = True
            bump(pred.saint, tp=1)
    for i, entry in enumerate(truth.saints):
        if not matched[i]:
            bump(entry.saint, fn=1)
    return counts


@dataclass(frozen=True)
class SaintMetrics:
    saint: str
    counts: ConfusionCounts
    precision: float | None
    recall: float | None


@dataclass(frozen=True)
class MetricsReport:
    image_count: int
    per_saint: tuple[SaintMetrics, ...]
    micro_precision: float | None
    micro_recall: float | None

    def saint(self, name: str) -> SaintMetrics:
        for row in self.per_saint:
            if row.saint == name:
                return row
        raise KeyError(f"no metrics for saint {name!r}")


def evaluate_corpus(
    readings: list[Reading], truths: list[GroundTruthRecord]
) -> MetricsReport:
    """Pool matching counts across a corpus into one report.

    Each reading is paired with the truth record sharing its image id; a
    reading without one is an error.  Truth records without readings are
    ignored.  Saints are reported in name order, so the report does not
    depend on input order.
    """
    by_id: dict[str, GroundTruthRecord] = {}
    for truth in truths:
        if truth.image_id in by_id:
            raise ValueError(f"duplicate ground truth for image id {truth.image_id!r}")
        by_id[truth.image_id] = truth

    pooled: dict[str, ConfusionCounts] = {}
    for reading in readings:
        truth = by_id.get(reading.image_id)
        if truth is None:
            raise MissingTruthError(f"no ground truth for image id {reading.image_id!r}")
        for saint, counts in match_reading(reading, truth).items():
            pooled[saint] = pooled.get(saint, ConfusionCounts()) + counts

    per_saint = tuple(
        SaintMetrics(
            saint=name,
            counts=pooled[name],
            precision=precision(pooled[name]),
            recall=recall(pooled[name]),
        )
        for name in sorted(pooled)
    )
    total = ConfusionCounts()
    for counts in pooled.values():
        total = total + counts
    return MetricsReport(
        image_count=len(readings),
        per_saint=per_saint,
        micro_precision=precision(total),
        micro_recall=recall(total),
    )


def report_document(report: MetricsReport) -> dict:
    """JSON-ready form of a report; absent metrics serialize as null."""
    return {
        "image_count": report.image_count,
        "per_saint": {
            m.saint: {
                "true_positives": m.counts.true_positives,
                "false_positives": m.counts.false_positives,
                "false_negatives": m.counts.false_negatives,
                "precision": m.precision,
                "recall": m.recall,
            }
            for m in report.per_saint
        },
        "micro_precision": report.micro_precision,
        "micro_recall": report.micro_recall,
    }


def format_table(report: MetricsReport) -> str:
    """Render the report as a text table with whole-percent rates.

    Saints sit in name order with an overall row last; an absent rate
    renders as a dash.
    """

    def pct(value: float | None) -> str:
        return "-" if value is None else f"{round(value * 100):d}%"

    rows = [(m.saint, pct(m.precision), pct(m.recall)) for m in report.per_saint]
    rows.append(("overall", pct(report.micro_precision), pct(report.micro_recall)))
    name_width = max(len("saint"), max(len(r[0]) for r in rows))
    lines = [f"{'saint':<{name_width}}  {'precision':>9}  {'recall':>6}"]
    for name, p, r in rows:
        lines.append(f"{name:<{name_width}}  {p:>9}  {r:>6}")
    return "\n".join(lines) + "\n"
