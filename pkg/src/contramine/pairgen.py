"""Heuristic candidate-pair sampling and leakage-free graph splits.

The sampler walks every (drug, topic) combination: it restricts the corpus to
claims mentioning the drug, ranks them by topic relevance, keeps the top-k
positive-polarity and top-k negative-polarity claims, enumerates all unordered
pairs of that union, drops copy pairs (identical text after whitespace
normalization), unions across combinations, and finally draws a seeded uniform
subsample of at most N pairs.

Splitting builds the claim co-occurrence graph (claims are nodes, pairs are
edges) and assigns whole connected components to train/val/test so no claim
ever appears in two splits.
"""

from __future__ import annotations

import itertools
import os
import random
from dataclasses import dataclass

from .corpus import Claim, ClaimSet, DrugLexicon, TopicLexicon
from .errors import ConfigError, ValidationError
from .storage import read_jsonl, write_json_atomic, write_jsonl_atomic
from .textrep import TextRepHandles, cosine


@dataclass(frozen=True)
class ClaimPair:
    """An unordered pair of claims; stored with a_id < b_id."""

    a_id: str
    b_id: str
    drug: str
    topic: str
    a_pol: float
    b_pol: float

    def __post_init__(self):
        if self.a_id == self.b_id:
            raise ValidationError(f"pair references claim {self.a_id!r} twice")
        if self.a_id > self.b_id:
            object.__setattr__(self, "a_id", self.b_id)
            object.__setattr__(self, "b_id", self.a_id)
            a_pol, b_pol = self.b_pol, self.a_pol
            object.__setattr__(self, "a_pol", a_pol)
            object.__setattr__(self, "b_pol", b_pol)

    @property
    def key(self) -> str:
        return f"{self.a_id}::{self.b_id}"

    def to_record(self) -> dict:
        return {
            "a_id": self.a_id,
            "b_id": self.b_id,
            "drug": self.drug,
            "topic": self.topic,
            "a_pol": self.a_pol,
            "b_pol": self.b_pol,
        }

    @classmethod
    def from_record(cls, record: dict) -> "ClaimPair":
        return cls(
            a_id=record["a_id"],
            b_id=record["b_id"],
            drug=record.get("drug", ""),
            topic=record.get("topic", ""),
            a_pol=float(record.get("a_pol", 0.0)),
            b_pol=float(record.get("b_pol", 0.0)),
        )


def read_pairs(path: str | os.PathLike) -> list[ClaimPair]:
    return [ClaimPair.from_record(record) for _, record in read_jsonl(path)]


def write_pairs(pairs: list[ClaimPair], path: str | os.PathLike) -> None:
    write_jsonl_atomic(path, (p.to_record() for p in pairs))


@dataclass(frozen=True)
class SamplerConfig:
    """k: per-(drug, topic) per-polarity-sign sample size; N: final subsample."""

    k: int = 7
    n: int = 1000
    seed: int = 0

    def __post_init__(self):
        if self.k < 1:
            raise ConfigError("k must be >= 1")
        if self.n < 1:
            raise ConfigError("N must be >= 1")


def _normalized(text: str) -> str:
    return " ".join(text.split())


def sample_candidate_pairs(
    claims: ClaimSet,
    drugs: DrugLexicon,
    topics: TopicLexicon,
    handles: TextRepHandles,
    cfg: SamplerConfig,
) -> list[ClaimPair]:
    """Generate candidate non-trivial pairs.

    Ranking ties break by claim id; a pair generated under several
    (drug, topic) combinations keeps the metadata of the first one in lexicon
    order. The final subsample sorts candidates canonically and samples
    without replacement with ``cfg.seed``, so output is independent of corpus
    iteration order. Returned pairs are sorted by (a_id, b_id).
    """
    if len(drugs) == 0 or len(topics) == 0:
        raise ConfigError("drug and topic lexicons must be non-empty")

    pol_cache = {c.id: handles.polarity(c.text).value for c in claims}
    emb_cache = {c.id: handles.embed(c.text).vector for c in claims}

    pool: dict[tuple[str, str], ClaimPair] = {}
    for drug in drugs:
        candidates = [c for c in claims if drug in c.text.lower()]
        if not candidates:
            continue
        for topic in topics:
            topic_vec = handles.embed(topic).vector
            relevance = {c.id: cosine(emb_cache[c.id], topic_vec) for c in candidates}
            ranked = sorted(candidates, key=lambda c: (-relevance[c.id], c.id))
            positive = [c for c in ranked if pol_cache[c.id] > 0][: cfg.k]
            negative = [c for c in ranked if pol_cache[c.id] < 0][: cfg.k]
            union = sorted(positive + negative, key=lambda c: c.id)
            for first, second in itertools.combinations(union, 2):
                if _normalized(first.text) == _normalized(second.text):
                    continue
                pair = ClaimPair(
                    a_id=first.id,
                    b_id=second.id,
                    drug=drug,
                    topic=topic,
                    a_pol=pol_cache[first.id],
                    b_pol=pol_cache[second.id],
                )
                pool.setdefault((pair.a_id, pair.b_id), pair)

    candidates_sorted = [pool[key] for key in sorted(pool)]
    if len(candidates_sorted) > cfg.n:
        rng = random.Random(cfg.seed)
        candidates_sorted = rng.sample(candidates_sorted, cfg.n)
    return sorted(candidates_sorted, key=lambda p: (p.a_id, p.b_id))


# ---------------------------------------------------------------------------
# Claim co-occurrence graph and component splits
# ---------------------------------------------------------------------------


class ClaimGraph:
    """Undirected graph: claims are nodes, pair co-occurrences are edges."""

    def __init__(self, nodes: set[str], edges: set[tuple[str, str]]):
        for a, b in edges:
            if a == b:
                raise ValidationError(f"self-loop on {a!r}")
            if a not in nodes or b not in nodes:
                raise ValidationError(f"edge ({a!r}, {b!r}) references unknown node")
        self.nodes = frozenset(nodes)
        self.edges = frozenset(tuple(sorted(e)) for e in edges)

    def connected_components(self) -> list[frozenset[str]]:
        """Components sorted by (size desc, smallest member) for determinism."""
        adjacency: dict[str, set[str]] = {n: set() for n in self.nodes}
        for a, b in self.edges:
            adjacency[a].add(b)
            adjacency[b].add(a)
        seen: set[str] = set()
        components: list[frozenset[str]] = []
        for node in sorted(self.nodes):
            if node in seen:
                continue
            stack = [node]
            component = set()
            while stack:
                current = stack.pop()
                if current in component:
                    continue
                component.add(current)
                stack.extend(adjacency[current] - component)
            seen |= component
            components.append(frozenset(component))
        return sorted(components, key=lambda c: (-len(c), min(c)))


def build_claim_graph(pairs: list[ClaimPair]) -> ClaimGraph:
    """One node per distinct claim id, one edge per pair; parallel edges collapse."""
    nodes = {p.a_id for p in pairs} | {p.b_id for p in pairs}
    edges = {(p.a_id, p.b_id) for p in pairs}
    return ClaimGraph(nodes, edges)


@dataclass(frozen=True)
class SplitAssignment:
    train: tuple[str, ...]
    val: tuple[str, ...]
    test: tuple[str, ...]

    def claim_ids(self, pairs_by_key: dict[str, ClaimPair]) -> dict[str, set[str]]:
        out: dict[str, set[str]] = {}
        for name in ("train", "val", "test"):
            ids: set[str] = set()
            for key in getattr(self, name):
                pair = pairs_by_key[key]
                ids.add(pair.a_id)
                ids.add(pair.b_id)
            out[name] = ids
        return out

    def to_dict(self) -> dict:
        return {"train": list(self.train), "val": list(self.val), "test": list(self.test)}

    def write(self, path: str | os.PathLike) -> None:
        write_json_atomic(path, self.to_dict())


def split_by_components(
    graph: ClaimGraph,
    pairs: list[ClaimPair],
    ratios: tuple[float, float, float] = (0.7, 0.15, 0.15),
    seed: int = 0,
) -> SplitAssignment:
    """Assign whole connected components to train/val/test.

    Components are processed largest-first (pair count); each goes to the
    split with the largest remaining pair-count deficit against its target
    ratio, ties broken in train > val > test order. The seed shuffles
    equal-sized components before the stable size sort, so tie-breaking among
    interchangeable components is randomized but reproducible.
    """
    if any(r <= 0 for r in ratios):
        raise ConfigError("ratios must be positive")
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise ConfigError(f"ratios must sum to 1, got {sum(ratios)}")
    for pair in pairs:
        if pair.a_id not in graph.nodes or pair.b_id not in graph.nodes:
            raise ValidationError(f"pair {pair.key} references a claim missing from the graph")

    components = graph.connected_components()
    if len(components) < 3:
        raise ConfigError(
            f"insufficient components for disjoint split: found {len(components)}, need >= 3"
        )

    claim_to_component: dict[str, int] = {}
    for idx, component in enumerate(components):
        for claim_id in component:
            claim_to_component[claim_id] = idx
    pairs_per_component: dict[int, list[ClaimPair]] = {i: [] for i in range(len(components))}
    for pair in pairs:
        ca = claim_to_component[pair.a_id]
        cb = claim_to_component[pair.b_id]
        if ca != cb:
            raise ValidationError(f"pair {pair.key} spans two components")
        pairs_per_component[ca].append(pair)

    order = list(range(len(components)))
    random.Random(seed).shuffle(order)
    order.sort(key=lambda i: -len(pairs_per_component[i]))  # stable: seeded tie order

    total_pairs = len(pairs)
    targets = [r * total_pairs for r in ratios]
    assigned_counts = [0.0, 0.0, 0.0]
    buckets: tuple[list[str], list[str], list[str]] = ([], [], [])
    for comp_idx in order:
        comp_pairs = pairs_per_component[comp_idx]
        deficits = [targets[s] - assigned_counts[s] for s in range(3)]
        split = max(range(3), key=lambda s: (deficits[s], -s))
        buckets[split].extend(sorted(p.key for p in comp_pairs))
        assigned_counts[split] += len(comp_pairs)

    return SplitAssignment(train=tuple(buckets[0]), val=tuple(buckets[1]), test=tuple(buckets[2]))
