"""Confusion matrices, macro F1, contradiction recall, and run summaries."""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Mapping, Sequence

from .annotation import Label3
from .errors import ConfigError, ValidationError
from .storage import write_json_atomic

LABEL_ORDER = (Label3.ENTAILMENT, Label3.NEUTRAL, Label3.CONTRADICTION)
_LABEL_INDEX = {label: i for i, label in enumerate(LABEL_ORDER)}


@dataclass(frozen=True)
class ClassMetrics:
    precision: float
    recall: float
    f1: float

    def __post_init__(self):
        for name in ("precision", "recall", "f1"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValidationError(f"{name} out of [0,1]: {value}")

    def to_dict(self) -> dict:
        return {"precision": self.precision, "recall": self.recall, "f1": self.f1}


@dataclass(frozen=True)
class EvalReport:
    """Gold rows x predicted columns, in (Entailment, Neutral, Contradiction) order."""

    confusion: tuple[tuple[int, int, int], ...]
    per_class: Mapping[str, ClassMetrics]
    macro_f1: float
    contradiction_recall: float
    n: int

    def __post_init__(self):
        matrix = tuple(tuple(int(x) for x in row) for row in self.confusion)
        if len(matrix) != 3 or any(len(row) != 3 for row in matrix):
            raise ValidationError("confusion matrix must be 3x3")
        if any(x < 0 for row in matrix for x in row):
            raise ValidationError("negative confusion count")
        if sum(x for row in matrix for x in row) != self.n:
            raise ValidationError("confusion counts do not sum to n")
        object.__setattr__(self, "confusion", matrix)
        object.__setattr__(self, "per_class", dict(self.per_class))
        for name in ("macro_f1", "contradiction_recall"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValidationError(f"{name} out of [0,1]: {value}")

    @property
    def accuracy(self) -> float:
        return sum(self.confusion[i][i] for i in range(3)) / self.n

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "labels": [label.value for label in LABEL_ORDER],
            "confusion": [list(row) for row in self.confusion],
            "per_class": {name: metrics.to_dict() for name, metrics in self.per_class.items()},
            "accuracy": self.accuracy,
            "macro_f1": self.macro_f1,
            "contradiction_recall": self.contradiction_recall,
        }

    def write(self, path: str | os.PathLike) -> None:
        write_json_atomic(path, self.to_dict())

    @classmethod
    def from_dict(cls, payload: dict) -> "EvalReport":
        per_class = {
            name: ClassMetrics(
                precision=float(m["precision"]), recall=float(m["recall"]), f1=float(m["f1"])
            )
            for name, m in payload["per_class"].items()
        }
        return cls(
            confusion=tuple(tuple(row) for row in payload["confusion"]),
            per_class=per_class,
            macro_f1=float(payload["macro_f1"]),
            contradiction_recall=float(payload["contradiction_recall"]),
            n=int(payload["n"]),
        )


def report_from_confusion(confusion: Sequence[Sequence[int]]) -> EvalReport:
    """Derive every metric from counts alone; zero denominators score 0."""
    matrix = tuple(tuple(int(x) for x in row) for row in confusion)
    n = sum(x for row in matrix for x in row)
    if n < 1:
        raise ValidationError("empty confusion matrix")
    per_class: dict[str, ClassMetrics] = {}
    f1s = []
    for i, label in enumerate(LABEL_ORDER):
        tp = matrix[i][i]
        predicted = sum(matrix[g][i] for g in range(3))
        gold = sum(matrix[i])
        precision = tp / predicted if predicted > 0 else 0.0
        recall = tp / gold if gold > 0 else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
        per_class[label.value] = ClassMetrics(precision=precision, recall=recall, f1=f1)
        f1s.append(f1)
    macro_f1 = sum(f1s) / 3.0
    contradiction_recall = per_class[Label3.CONTRADICTION.value].recall
    return EvalReport(
        confusion=matrix,
        per_class=per_class,
        macro_f1=macro_f1,
        contradiction_recall=contradiction_recall,
        n=n,
    )


def evaluate(preds: Sequence[Label3], golds: Sequence[Label3]) -> EvalReport:
    if len(preds) != len(golds):
        raise ValidationError(f"{len(preds)} predictions vs {len(golds)} gold labels")
    if not preds:
        raise ValidationError("nothing to evaluate")
    counts = [[0, 0, 0] for _ in range(3)]
    for pred, gold in zip(preds, golds):
        counts[_LABEL_INDEX[Label3(gold)]][_LABEL_INDEX[Label3(pred)]] += 1
    return report_from_confusion(counts)


# ---------------------------------------------------------------------------
# Run aggregation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SummaryRow:
    tag: str
    kind: str  # "run" or "group_mean"
    n: int
    macro_f1: float
    contradiction_recall: float


@dataclass(frozen=True)
class SummaryTable:
    rows: tuple[SummaryRow, ...]

    def to_csv(self) -> str:
        lines = ["tag,kind,n,macro_f1,contradiction_recall"]
        for row in self.rows:
            lines.append(
                f"{row.tag},{row.kind},{row.n},{row.macro_f1:.6f},{row.contradiction_recall:.6f}"
            )
        return "\n".join(lines) + "\n"

    def to_markdown(self) -> str:
        lines = [
            "| tag | kind | n | macro F1 | contradiction recall |",
            "| --- | --- | ---: | ---: | ---: |",
        ]
        for row in self.rows:
            lines.append(
                f"| {row.tag} | {row.kind} | {row.n} | {row.macro_f1:.4f} "
                f"| {row.contradiction_recall:.4f} |"
            )
        return "\n".join(lines) + "\n"


def aggregate_runs(
    reports: Sequence[tuple[str, EvalReport]],
    groups: Mapping[str, Sequence[str]] | None = None,
) -> SummaryTable:
    """One row per tagged report, plus a mean row per named group of tags."""
    if not reports:
        raise ValidationError("no reports to aggregate")
    by_tag = {}
    rows = []
    for tag, report in reports:
        if tag in by_tag:
            raise ValidationError(f"duplicate report tag {tag!r}")
        by_tag[tag] = report
        rows.append(
            SummaryRow(
                tag=tag,
                kind="run",
                n=report.n,
                macro_f1=report.macro_f1,
                contradiction_recall=report.contradiction_recall,
            )
        )
    for group_name in sorted(groups or {}):
        member_tags = list((groups or {})[group_name])
        if not member_tags:
            raise ConfigError(f"group {group_name!r} is empty")
        missing = [tag for tag in member_tags if tag not in by_tag]
        if missing:
            raise ConfigError(f"group {group_name!r} references unknown tags {missing}")
        members = [by_tag[tag] for tag in member_tags]
        rows.append(
            SummaryRow(
                tag=group_name,
                kind="group_mean",
                n=sum(m.n for m in members),
                macro_f1=sum(m.macro_f1 for m in members) / len(members),
                contradiction_recall=sum(m.contradiction_recall for m in members) / len(members),
            )
        )
    return SummaryTable(rows=tuple(rows))
