"""Claim corpus ingestion, filtering, and drug/topic lexicons.

Claims are exchanged as JSONL, one object per line:
``{"id": str, "doc_id": str, "text": str, "meta": object?}``.
Lexicons are plain text files, one entry per line; lines starting with ``#``
are comments.

All term and drug matching in this module is case-insensitive raw substring
matching, with no tokenization. This deliberately lets one drug name match
inside another (``"chloroquine"`` occurs inside ``"hydroxychloroquine"``).
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

from .errors import ParseError, ValidationError
from .storage import read_jsonl, write_jsonl_atomic


@dataclass(frozen=True)
class Claim:
    """One extracted research claim with document provenance."""

    id: str
    doc_id: str
    text: str
    meta: dict | None = None

    def __post_init__(self):
        if not self.id:
            raise ValidationError("claim id must be non-empty")
        if not self.text.strip():
            raise ValidationError(f"claim {self.id!r} has empty text")

    def to_record(self) -> dict:
        record = {"id": self.id, "doc_id": self.doc_id, "text": self.text}
        if self.meta is not None:
            record["meta"] = self.meta
        return record


class ClaimSet:
    """An ordered, id-unique collection of claims.

    Immutable after construction; safe to share across concurrent readers.
    """

    def __init__(self, claims: Iterable[Claim]):
        self._claims = tuple(claims)
        self._by_id: dict[str, Claim] = {}
        for claim in self._claims:
            if claim.id in self._by_id:
                raise ValidationError(f"duplicate claim id {claim.id!r}")
            self._by_id[claim.id] = claim

    def __len__(self) -> int:
        return len(self._claims)

    def __iter__(self) -> Iterator[Claim]:
        return iter(self._claims)

    def __contains__(self, claim_id: str) -> bool:
        return claim_id in self._by_id

    def __eq__(self, other) -> bool:
        return isinstance(other, ClaimSet) and self._claims == other._claims

    def get(self, claim_id: str) -> Claim:
        try:
            return self._by_id[claim_id]
        except KeyError:
            raise ValidationError(f"unknown claim id {claim_id!r}") from None

    @property
    def claims(self) -> tuple[Claim, ...]:
        return self._claims

    def doc_ids(self) -> list[str]:
        """Distinct doc_ids in first-appearance order."""
        seen: dict[str, None] = {}
        for claim in self._claims:
            seen.setdefault(claim.doc_id, None)
        return list(seen)


def ingest_claims(path: str | os.PathLike, format: str = "jsonl") -> ClaimSet:
    """Parse a claim corpus file, preserving input order.

    Raises :class:`ParseError` on malformed lines (naming the line number)
    and :class:`ValidationError` on duplicate ids (citing both lines).
    """
    if format != "jsonl":
        raise ValidationError(f"unsupported claim format {format!r}")
    claims: list[Claim] = []
    first_line_of: dict[str, int] = {}
    for lineno, record in read_jsonl(path):
        for key in ("id", "doc_id", "text"):
            if key not in record:
                raise ParseError(f"missing required field {key!r}", path=str(path), line=lineno)
            if not isinstance(record[key], str):
                raise ParseError(f"field {key!r} must be a string", path=str(path), line=lineno)
        meta = record.get("meta")
        if meta is not None and not isinstance(meta, dict):
            raise ParseError("field 'meta' must be an object", path=str(path), line=lineno)
        claim_id = record["id"]
        if claim_id in first_line_of:
            raise ValidationError(
                f"duplicate claim id {claim_id!r} (lines {first_line_of[claim_id]} and {lineno})"
            )
        first_line_of[claim_id] = lineno
        try:
            claims.append(Claim(id=claim_id, doc_id=record["doc_id"], text=record["text"], meta=meta))
        except ValidationError as exc:
            raise ParseError(str(exc), path=str(path), line=lineno) from exc
    return ClaimSet(claims)


def write_claims(claims: ClaimSet, path: str | os.PathLike) -> None:
    write_jsonl_atomic(path, (claim.to_record() for claim in claims))


def filter_covid_claims(claims: ClaimSet, terms: list[str]) -> ClaimSet:
    """Keep exactly the claims whose lowercased text contains >=1 lowercased term."""
    if not terms:
        raise ValidationError("term list must be non-empty")
    lowered = [t.lower() for t in terms]
    kept = [c for c in claims if any(term in c.text.lower() for term in lowered)]
    return ClaimSet(kept)


def _load_lexicon_entries(path: str | os.PathLike) -> list[str]:
    entries = []
    with Path(path).open("r", encoding="utf-8") as fh:
        for line in fh:
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            entries.append(stripped)
    return entries


def _bundled_entries(filename: str) -> tuple[str, ...]:
    from importlib import resources

    with resources.files("contramine.data").joinpath(filename).open("r", encoding="utf-8") as fh:
        return tuple(
            line.strip() for line in fh if line.strip() and not line.strip().startswith("#")
        )


def bundled_covid_terms() -> tuple[str, ...]:
    """The built-in disease-term list used by the default corpus filter."""
    return _bundled_entries("covid_terms.txt")


@dataclass(frozen=True)
class DrugLexicon:
    """Ordered list of lowercase drug names used for substring mention search."""

    drugs: tuple[str, ...]

    def __post_init__(self):
        normalized = tuple(d.strip().lower() for d in self.drugs)
        if any(not d for d in normalized):
            raise ValidationError("drug lexicon entries must be non-empty")
        if len(set(normalized)) != len(normalized):
            raise ValidationError("drug lexicon contains duplicate entries")
        object.__setattr__(self, "drugs", normalized)

    def __iter__(self) -> Iterator[str]:
        return iter(self.drugs)

    def __len__(self) -> int:
        return len(self.drugs)

    @classmethod
    def from_file(cls, path: str | os.PathLike) -> "DrugLexicon":
        return cls(tuple(_load_lexicon_entries(path)))

    @classmethod
    def bundled(cls) -> "DrugLexicon":
        """The built-in treatment list studied by the reference experiments."""
        return cls(_bundled_entries("drugs.txt"))


@dataclass(frozen=True)
class TopicLexicon:
    """Ordered list of topic phrases used for relevance ranking."""

    topics: tuple[str, ...]

    def __post_init__(self):
        normalized = tuple(t.strip() for t in self.topics)
        if any(not t for t in normalized):
            raise ValidationError("topic lexicon entries must be non-empty")
        if len(set(normalized)) != len(normalized):
            raise ValidationError("topic lexicon contains duplicate entries")
        object.__setattr__(self, "topics", normalized)

    def __iter__(self) -> Iterator[str]:
        return iter(self.topics)

    def __len__(self) -> int:
        return len(self.topics)

    @classmethod
    def from_file(cls, path: str | os.PathLike) -> "TopicLexicon":
        return cls(tuple(_load_lexicon_entries(path)))

    @classmethod
    def bundled(cls) -> "TopicLexicon":
        """The built-in outcome topics used for relevance ranking."""
        return cls(_bundled_entries("topics.txt"))


def find_drug_mentions(claim: Claim, lexicon: DrugLexicon) -> list[str]:
    """Every lexicon drug that is a case-insensitive substring of the claim text.

    Results come back in lexicon order. Substring semantics are intentional:
    a claim mentioning hydroxychloroquine also mentions chloroquine.
    """
    text = claim.text.lower()
    return [drug for drug in lexicon if drug in text]
