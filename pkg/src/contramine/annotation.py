"""Label taxonomy, label collapsing, the guideline rule engine, and
inter-annotator agreement.

Pairs are labeled on a six-way scale that collapses to the usual three-way
entailment/contradiction/neutral scale for training. The rule engine turns
per-claim feature annotations (drug sets, sentiment values, context tags,
uncertainty flags) into a six-way label by applying the guideline rows in
a fixed order with first match winning; every rule is symmetric in the two
claims.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from .errors import ValidationError


class Label6(str, Enum):
    STRICT_ENTAILMENT = "StrictEntailment"
    ENTAILMENT = "Entailment"
    POSSIBLE_ENTAILMENT = "PossibleEntailment"
    STRICT_CONTRADICTION = "StrictContradiction"
    CONTRADICTION = "Contradiction"
    NEUTRAL = "Neutral"


class Label3(str, Enum):
    ENTAILMENT = "Entailment"
    CONTRADICTION = "Contradiction"
    NEUTRAL = "Neutral"


_COLLAPSE = {
    Label6.STRICT_ENTAILMENT: Label3.ENTAILMENT,
    Label6.ENTAILMENT: Label3.ENTAILMENT,
    # PossibleEntailment sits in the entailment family; collapsing it to
    # Entailment is a deliberate choice, flagged in the docs.
    Label6.POSSIBLE_ENTAILMENT: Label3.ENTAILMENT,
    Label6.STRICT_CONTRADICTION: Label3.CONTRADICTION,
    Label6.CONTRADICTION: Label3.CONTRADICTION,
    Label6.NEUTRAL: Label3.NEUTRAL,
}


def collapse_label(label: Label6) -> Label3:
    """Collapse the six-way label onto {Entailment, Contradiction, Neutral}."""
    return _COLLAPSE[label]


# ---------------------------------------------------------------------------
# Span annotations and per-claim features
# ---------------------------------------------------------------------------

SPAN_KINDS = ("drug", "sentiment", "context", "uncertainty")
SENTIMENT_POSITIVE = "POSITIVE"
SENTIMENT_NEGATIVE = "NEGATIVE"


@dataclass(frozen=True)
class SpanAnnotation:
    """A character-offset annotation over one claim's text."""

    kind: str
    start: int
    end: int
    value: str

    def __post_init__(self):
        if self.kind not in SPAN_KINDS:
            raise ValidationError(f"unknown span kind {self.kind!r}")
        if not (0 <= self.start < self.end):
            raise ValidationError(f"invalid span offsets [{self.start}, {self.end})")

    def validate_against(self, text: str) -> None:
        if self.end > len(text):
            raise ValidationError(
                f"span [{self.start}, {self.end}) exceeds text length {len(text)}"
            )

    def to_record(self) -> dict:
        return {"kind": self.kind, "start": self.start, "end": self.end, "value": self.value}

    @classmethod
    def from_record(cls, record: dict) -> "SpanAnnotation":
        return cls(
            kind=record["kind"],
            start=int(record["start"]),
            end=int(record["end"]),
            value=str(record.get("value", "")),
        )


@dataclass(frozen=True)
class ClaimFeatures:
    """Derived features of one claim, as consumed by the rule engine."""

    drugs: frozenset[str]
    sentiments: frozenset[str]
    contexts: frozenset[str]
    uncertainty: bool = False

    @classmethod
    def from_spans(cls, spans: list[SpanAnnotation]) -> "ClaimFeatures":
        drugs = frozenset(s.value.lower() for s in spans if s.kind == "drug")
        sentiments = frozenset(s.value.upper() for s in spans if s.kind == "sentiment")
        contexts = frozenset(s.value.lower() for s in spans if s.kind == "context")
        uncertainty = any(s.kind == "uncertainty" for s in spans)
        bad = sentiments - {SENTIMENT_POSITIVE, SENTIMENT_NEGATIVE}
        if bad:
            raise ValidationError(f"sentiment spans must be POSITIVE/NEGATIVE, got {sorted(bad)}")
        return cls(drugs=drugs, sentiments=sentiments, contexts=contexts, uncertainty=uncertainty)


def _signed(f: ClaimFeatures) -> bool:
    # An uncertainty expression is not treated as a signed statement even if
    # sentiment spans are present.
    return bool(f.sentiments) and not f.uncertainty


def _opposing(a: frozenset[str], b: frozenset[str]) -> bool:
    return bool(a) and bool(b) and not (a & b)


def guideline_label(a: ClaimFeatures | None, b: ClaimFeatures | None) -> Label6:
    """Apply the annotation guideline rules to a fully annotated pair.

    Rules are evaluated in order, first match wins:

    1.  both signed, all drugs + context + sentiment match  -> StrictEntailment
    2.  both signed, >=1 drug match, same sentiment, similar context -> Entailment
    3.  both signed, all drugs + context match, opposing sentiment -> StrictContradiction
    4.  both signed, >=1 drug match, opposing sentiment, similar context -> Contradiction
    5.  sentiment or context cannot be compared -> Neutral
    6.  no drug mention, or no drug matches -> Neutral
    7.  one claim carries both POSITIVE and NEGATIVE, the other a signed
        statement -> Contradiction
    8.  one signed claim + one uncertainty expression -> Neutral
    9.  both uncertainty expressions -> Entailment

    "Match" means set equality over non-empty sets; "similar context" means a
    non-empty intersection of context tags; "opposing sentiment" means two
    non-empty, disjoint sentiment sets. Sentiment is incomparable when a claim
    is neither signed nor an uncertainty expression; context is incomparable
    when either signed claim carries no context tags. Nothing matching falls
    through to Neutral.
    """
    if a is None or b is None:
        raise ValidationError("unannotated pair")

    both_signed = _signed(a) and _signed(b)
    drugs_equal = bool(a.drugs) and a.drugs == b.drugs
    drugs_overlap = bool(a.drugs & b.drugs)
    contexts_equal = bool(a.contexts) and a.contexts == b.contexts
    contexts_overlap = bool(a.contexts & b.contexts)
    sentiments_equal = bool(a.sentiments) and a.sentiments == b.sentiments
    sentiments_opposing = _opposing(a.sentiments, b.sentiments)

    # 1-4: signed-statement comparisons.
    if both_signed and drugs_equal and contexts_equal and sentiments_equal:
        return Label6.STRICT_ENTAILMENT
    if both_signed and drugs_overlap and sentiments_equal and contexts_overlap:
        return Label6.ENTAILMENT
    if both_signed and drugs_equal and contexts_equal and sentiments_opposing:
        return Label6.STRICT_CONTRADICTION
    if both_signed and drugs_overlap and sentiments_opposing and contexts_overlap:
        return Label6.CONTRADICTION

    # 5: incomparable sentiment or context.
    sentiment_incomparable = any(not f.sentiments and not f.uncertainty for f in (a, b))
    context_incomparable = both_signed and (not a.contexts or not b.contexts)
    if sentiment_incomparable or context_incomparable:
        return Label6.NEUTRAL

    # 6: drugs missing or disjoint.
    if not drugs_overlap:
        return Label6.NEUTRAL

    # 7: a mixed-sentiment claim against any signed claim.
    mixed = frozenset({SENTIMENT_POSITIVE, SENTIMENT_NEGATIVE})
    if (a.sentiments == mixed and _signed(b)) or (b.sentiments == mixed and _signed(a)):
        return Label6.CONTRADICTION

    # 8-9: uncertainty expressions.
    if (_signed(a) and b.uncertainty) or (_signed(b) and a.uncertainty):
        return Label6.NEUTRAL
    if a.uncertainty and b.uncertainty:
        return Label6.ENTAILMENT

    return Label6.NEUTRAL


# ---------------------------------------------------------------------------
# Fleiss' kappa
# ---------------------------------------------------------------------------


class AgreementMatrix:
    """Per-item counts of rater assignments; every row sums to n_raters."""

    def __init__(self, counts: list[list[int]]):
        if not counts:
            raise ValidationError("agreement matrix needs >= 1 item")
        width = len(counts[0])
        if width < 1:
            raise ValidationError("agreement matrix needs >= 1 category")
        raters = sum(counts[0])
        for i, row in enumerate(counts):
            if len(row) != width:
                raise ValidationError(f"row {i} has {len(row)} categories, expected {width}")
            if any(c < 0 for c in row):
                raise ValidationError(f"row {i} has negative counts")
            if sum(row) != raters:
                raise ValidationError(
                    f"row {i} sums to {sum(row)}, expected {raters} raters per item"
                )
        if raters < 2:
            raise ValidationError("need >= 2 raters per item")
        self.counts = [list(row) for row in counts]
        self.n_items = len(counts)
        self.n_categories = width
        self.n_raters = raters

    @classmethod
    def from_csv(cls, path: str | os.PathLike) -> "AgreementMatrix":
        rows: list[list[int]] = []
        with Path(path).open("r", encoding="utf-8", newline="") as fh:
            for row in csv.reader(fh):
                if not row or row[0].startswith("#"):
                    continue
                rows.append([int(cell) for cell in row])
        return cls(rows)


def fleiss_kappa(matrix: AgreementMatrix) -> float:
    """Chance-corrected multi-rater agreement.

    kappa = (P_bar - Pe_bar) / (1 - Pe_bar), where P_bar is the mean per-item
    observed agreement and Pe_bar the expected chance agreement from the
    marginal category proportions. Raises when all mass sits in one category
    (Pe_bar = 1, kappa undefined).
    """
    n = matrix.n_raters
    total = matrix.n_items * n
    p_items = [
        (sum(c * c for c in row) - n) / (n * (n - 1)) for row in matrix.counts
    ]
    p_bar = sum(p_items) / matrix.n_items
    p_cats = [sum(row[j] for row in matrix.counts) / total for j in range(matrix.n_categories)]
    pe_bar = sum(p * p for p in p_cats)
    if pe_bar >= 1.0:
        raise ValidationError("undefined kappa: all assignments in a single category")
    return (p_bar - pe_bar) / (1.0 - pe_bar)
