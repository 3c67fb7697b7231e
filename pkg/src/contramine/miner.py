"""Contradiction mining over a live claim corpus.

Candidate filtering keeps unordered claim pairs where (1) both claims mention
at least one configured drug and (2) sentence-embedding cosine similarity is
strictly above the threshold. An optional seeded paper sample restricts the
corpus to a fixed number of distinct documents first. Scoring runs through
any scorer behind the common batch interface and checkpoints progress so a
backend failure never discards completed work.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path
import random
from typing import Sequence

from .classifiers import Scorer, ScoreDistribution
from .corpus import Claim, ClaimSet
from .errors import ConfigError, TransportError, ValidationError
from .pairgen import ClaimPair
from .storage import read_jsonl, write_jsonl_atomic, write_text_atomic, write_json_atomic
from .textrep import TextRepHandles, cosine

CHECKPOINT_EVERY = 500


@dataclass(frozen=True)
class MinerConfig:
    drugs_of_interest: tuple[str, ...]
    sim_threshold: float = 0.5
    max_papers: int | None = None
    contradiction_threshold: float | None = None
    scorer_ref: str = ""

    def __post_init__(self):
        drugs = tuple(d.strip().lower() for d in self.drugs_of_interest)
        if not drugs or any(not d for d in drugs):
            raise ConfigError("drugs_of_interest must be non-empty strings")
        object.__setattr__(self, "drugs_of_interest", drugs)
        if not 0.0 <= self.sim_threshold <= 1.0:
            raise ConfigError(f"sim_threshold must be in [0,1], got {self.sim_threshold}")
        if self.max_papers is not None and self.max_papers < 1:
            raise ConfigError("max_papers must be >= 1 when set")
        if self.contradiction_threshold is not None and not 0.0 <= self.contradiction_threshold <= 1.0:
            raise ConfigError("contradiction_threshold must be in [0,1] when set")


def _mentioned_drugs(claim: Claim, drugs: tuple[str, ...]) -> list[str]:
    text = claim.text.lower()
    return [drug for drug in drugs if drug in text]


def mine_candidates(
    claims: ClaimSet,
    cfg: MinerConfig,
    handles: TextRepHandles,
    seed: int = 0,
) -> list[ClaimPair]:
    """All unordered pairs passing both the drug-mention and similarity filters."""
    pool = list(claims)
    if cfg.max_papers is not None:
        docs = sorted({c.doc_id for c in pool})
        if cfg.max_papers < len(docs):
            kept = set(random.Random(seed).sample(docs, cfg.max_papers))
            pool = [c for c in pool if c.doc_id in kept]

    mentioning = [(c, _mentioned_drugs(c, cfg.drugs_of_interest)) for c in pool]
    mentioning = [(c, drugs) for c, drugs in mentioning if drugs]
    vectors = {c.id: handles.embed(c.text).vector for c, _ in mentioning}
    polarities = {c.id: handles.polarity(c.text).value for c, _ in mentioning}

    pairs = []
    for (first, first_drugs), (second, second_drugs) in combinations(mentioning, 2):
        if cosine(vectors[first.id], vectors[second.id]) <= cfg.sim_threshold:
            continue
        shared = [d for d in cfg.drugs_of_interest if d in first_drugs and d in second_drugs]
        pairs.append(
            ClaimPair(
                a_id=first.id,
                b_id=second.id,
                drug=shared[0] if shared else "",
                topic="",
                a_pol=polarities[first.id],
                b_pol=polarities[second.id],
            )
        )
    return sorted(pairs, key=lambda p: (p.a_id, p.b_id))


# ---------------------------------------------------------------------------
# Scoring with checkpoints
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScoredPair:
    pair: ClaimPair
    scores: ScoreDistribution

    def to_record(self) -> dict:
        record = self.pair.to_record()
        record["scores"] = self.scores.to_wire()
        return record

    @classmethod
    def from_record(cls, record: dict) -> "ScoredPair":
        scores = ScoreDistribution.from_wire(record["scores"])
        pair = ClaimPair.from_record(record)
        return cls(pair=pair, scores=scores)


def _read_checkpoint(path: Path) -> list[ScoredPair]:
    if not path.exists():
        return []
    return [ScoredPair.from_record(record) for _, record in read_jsonl(path)]


def score_pairs(
    pairs: Sequence[ClaimPair],
    claims: ClaimSet,
    scorer: Scorer,
    checkpoint_path: str | os.PathLike | None = None,
    checkpoint_every: int = CHECKPOINT_EVERY,
) -> list[ScoredPair]:
    """Score (a.text, b.text) for every pair, in order, resuming from checkpoint.

    The checkpoint holds fully scored pairs in input order; on a transport
    failure the progress so far is flushed before the error propagates, and a
    rerun with the same arguments continues where it stopped.
    """
    if checkpoint_every < 1:
        raise ConfigError("checkpoint_every must be >= 1")
    for pair in pairs:
        if claims.get(pair.a_id) is None or claims.get(pair.b_id) is None:
            raise ValidationError(f"pair {pair.key} references a claim not in the corpus")

    scored: list[ScoredPair] = []
    if checkpoint_path is not None:
        previous = _read_checkpoint(Path(checkpoint_path))
        if len(previous) > len(pairs):
            raise ValidationError("checkpoint holds more pairs than the current input")
        for done, pair in zip(previous, pairs):
            if (done.pair.a_id, done.pair.b_id) != (pair.a_id, pair.b_id):
                raise ValidationError(
                    f"checkpoint pair {done.pair.key} does not match input pair {pair.key}"
                )
        scored = previous

    def flush():
        if checkpoint_path is not None:
            write_jsonl_atomic(checkpoint_path, (s.to_record() for s in scored))

    position = len(scored)
    while position < len(pairs):
        chunk = pairs[position : position + checkpoint_every]
        texts = [(claims.get(p.a_id).text, claims.get(p.b_id).text) for p in chunk]
        try:
            distributions = scorer.score_batch(texts)
        except TransportError:
            flush()
            raise
        scored.extend(ScoredPair(pair=p, scores=d) for p, d in zip(chunk, distributions))
        position += len(chunk)
        flush()
    return scored


def rank_contradictions(scored: Sequence[ScoredPair], cfg: MinerConfig) -> list[ScoredPair]:
    """Keep predicted contradictions and sort them by confidence.

    Default filter is argmax = Contradiction; when cfg.contradiction_threshold
    is set, p_contradiction >= threshold is used instead.
    """
    if cfg.contradiction_threshold is not None:
        kept = [s for s in scored if s.scores.p_contradiction >= cfg.contradiction_threshold]
    else:
        kept = [s for s in scored if s.scores.argmax_label().value == "Contradiction"]
    return sorted(kept, key=lambda s: (-s.scores.p_contradiction, s.pair.a_id, s.pair.b_id))


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Hit:
    claim_id: str
    doc_id: str
    text: str
    p_contradiction: float

    def to_record(self) -> dict:
        return {
            "claim_id": self.claim_id,
            "doc_id": self.doc_id,
            "text": self.text,
            "p_contradiction": self.p_contradiction,
        }


@dataclass(frozen=True)
class ContradictionReport:
    query_claim: Claim
    hits: tuple[Hit, ...]
    unique_docs: int

    def to_record(self) -> dict:
        return {
            "query_claim": self.query_claim.to_record(),
            "unique_docs": self.unique_docs,
            "hits": [hit.to_record() for hit in self.hits],
        }


def build_reports(ranked: Sequence[ScoredPair], claims: ClaimSet) -> list[ContradictionReport]:
    """Group surviving pairs per member claim; each pair hits both its members."""
    hits_by_claim: dict[str, list[Hit]] = {}
    for scored in ranked:
        a = claims.get(scored.pair.a_id)
        b = claims.get(scored.pair.b_id)
        if a is None or b is None:
            raise ValidationError(f"pair {scored.pair.key} references a claim not in the corpus")
        p = scored.scores.p_contradiction
        hits_by_claim.setdefault(a.id, []).append(
            Hit(claim_id=b.id, doc_id=b.doc_id, text=b.text, p_contradiction=p)
        )
        hits_by_claim.setdefault(b.id, []).append(
            Hit(claim_id=a.id, doc_id=a.doc_id, text=a.text, p_contradiction=p)
        )

    reports = []
    for query_id in sorted(hits_by_claim):
        hits = sorted(hits_by_claim[query_id], key=lambda h: (-h.p_contradiction, h.claim_id))
        unique_docs = len({hit.doc_id for hit in hits})
        reports.append(
            ContradictionReport(
                query_claim=claims.get(query_id), hits=tuple(hits), unique_docs=unique_docs
            )
        )
    reports.sort(key=lambda r: (-r.unique_docs, r.query_claim.id))
    return reports


def render_report(reports: Sequence[ContradictionReport], format: str = "markdown") -> str:
    if format == "json":
        return json.dumps([r.to_record() for r in reports], ensure_ascii=False, indent=2) + "\n"
    if format != "markdown":
        raise ConfigError(f"unknown report format {format!r}")
    lines = ["# Contradiction mining report", ""]
    if not reports:
        lines.extend(["No contradictions found.", ""])
        return "\n".join(lines)
    for report in reports:
        lines.append(f"## Query claim `{report.query_claim.id}` ({report.query_claim.doc_id})")
        lines.append("")
        lines.append(f"> {report.query_claim.text}")
        lines.append("")
        lines.append(f"Contradicted by claims from {report.unique_docs} unique document(s).")
        lines.append("")
        lines.append("| rank | p(contradiction) | claim | doc |")
        lines.append("| ---: | ---: | --- | --- |")
        for rank, hit in enumerate(report.hits, start=1):
            text = hit.text.replace("|", "\\|")
            lines.append(f"| {rank} | {hit.p_contradiction:.4f} | {text} ({hit.claim_id}) | {hit.doc_id} |")
        lines.append("")
    return "\n".join(lines)


def write_reports(
    reports: Sequence[ContradictionReport],
    out_dir: str | os.PathLike,
    stem: str = "contradictions",
) -> tuple[Path, Path]:
    out = Path(out_dir)
    md_path = out / f"{stem}.md"
    json_path = out / f"{stem}.json"
    write_text_atomic(md_path, render_report(reports, "markdown"))
    write_json_atomic(json_path, [r.to_record() for r in reports])
    return md_path, json_path
