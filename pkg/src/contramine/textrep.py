"""Word vectors, smoothed-inverse-frequency sentence embeddings, cosine
similarity, and lexicon-based polarity scoring.

The sentence embedding is a frequency-weighted average of word vectors with
weight ``a / (a + freq(w))``, where ``a`` is derived from the vocabulary size
and an assumed average sentence length (see :func:`sif_weight_param`), plus
optional removal of the top principal directions fitted over a corpus of
embeddings. Polarity is a rule-based lexicon score: token valences are
adjusted by intensifiers and negators in a three-token lookback window, summed,
and squashed into [-1, 1] by ``s / sqrt(s^2 + 15)``.

Everything here is a pure function over immutable inputs; the objects are
safe to share between threads.
"""

from __future__ import annotations

import json
import math
import os
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import ConfigError, ParseError, ValidationError

_TOKEN_RE = re.compile(r"[a-z0-9]+")

# Empirically derived modifier constants from the rule-based sentiment method
# this module follows.
NEGATION_SCALAR = -0.74
BOOST_INCR = 0.293
BOOST_DECR = -0.293
_BOOST_DAMPING = {1: 1.0, 2: 0.95, 3: 0.9}

NEGATORS = frozenset(
    ["no", "not", "none", "never", "neither", "nor", "nothing", "cannot", "without"]
)

BOOSTERS: dict[str, float] = {
    "significantly": BOOST_INCR,
    "substantially": BOOST_INCR,
    "markedly": BOOST_INCR,
    "dramatically": BOOST_INCR,
    "strongly": BOOST_INCR,
    "highly": BOOST_INCR,
    "very": BOOST_INCR,
    "extremely": BOOST_INCR,
    "greatly": BOOST_INCR,
    "considerably": BOOST_INCR,
    "remarkably": BOOST_INCR,
    "notably": BOOST_INCR,
    "profoundly": BOOST_INCR,
    "severely": BOOST_INCR,
    "slightly": BOOST_DECR,
    "marginally": BOOST_DECR,
    "somewhat": BOOST_DECR,
    "mildly": BOOST_DECR,
    "modestly": BOOST_DECR,
    "partially": BOOST_DECR,
    "barely": BOOST_DECR,
    "hardly": BOOST_DECR,
}


def tokenize(text: str) -> list[str]:
    """Lowercase and split on non-alphanumerics, keeping tokens of length >= 1."""
    return _TOKEN_RE.findall(text.lower())


# ---------------------------------------------------------------------------
# Word vectors
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WordVectors:
    """A vocabulary, its embedding matrix, and relative word frequencies."""

    dim: int
    vocab: dict[str, int]
    matrix: np.ndarray
    freq: dict[str, float]

    def __post_init__(self):
        if self.dim < 1:
            raise ValidationError("word vector dimension must be >= 1")
        if self.matrix.shape != (len(self.vocab), self.dim):
            raise ValidationError(
                f"matrix shape {self.matrix.shape} does not match "
                f"({len(self.vocab)}, {self.dim})"
            )
        total = sum(self.freq.get(w, 0.0) for w in self.vocab)
        if total > 1.0 + 1e-6:
            raise ValidationError(f"vocabulary frequencies sum to {total:.6f} > 1")

    def vector(self, word: str) -> np.ndarray | None:
        idx = self.vocab.get(word)
        return None if idx is None else self.matrix[idx]


def load_word_vectors(path: str | os.PathLike, freq_path: str | os.PathLike | None = None) -> WordVectors:
    """Load text-format word vectors: a ``"N dim"`` header then one
    ``"word v1 ... vdim"`` line per word.

    Word frequencies come from a sidecar file (``<path>.freq`` by default)
    with ``"word count"`` lines; counts are normalized to relative
    frequencies. Without a sidecar every word gets frequency 1/|vocab|.
    """
    path = Path(path)
    with path.open("r", encoding="utf-8") as fh:
        header = fh.readline().strip().split()
        if len(header) != 2:
            raise ParseError("expected header 'N dim'", path=str(path), line=1)
        try:
            count, dim = int(header[0]), int(header[1])
        except ValueError:
            raise ParseError("expected integer header 'N dim'", path=str(path), line=1) from None
        vocab: dict[str, int] = {}
        rows: list[list[float]] = []
        for lineno, line in enumerate(fh, start=2):
            parts = line.rstrip("\n").split()
            if not parts:
                continue
            word, values = parts[0], parts[1:]
            if len(values) != dim:
                raise ParseError(
                    f"expected {dim} vector components, found {len(values)}",
                    path=str(path),
                    line=lineno,
                )
            if word in vocab:
                raise ParseError(f"duplicate word {word!r}", path=str(path), line=lineno)
            try:
                rows.append([float(v) for v in values])
            except ValueError:
                raise ParseError("non-numeric vector component", path=str(path), line=lineno) from None
            vocab[word] = len(vocab)
    if len(vocab) != count:
        raise ParseError(f"header promised {count} words, file has {len(vocab)}", path=str(path))
    matrix = np.asarray(rows, dtype=np.float64)

    if freq_path is None:
        candidate = Path(str(path) + ".freq")
        freq_path = candidate if candidate.exists() else None
    if freq_path is None:
        uniform = 1.0 / len(vocab) if vocab else 0.0
        freq = {w: uniform for w in vocab}
    else:
        freq = _load_frequencies(freq_path, vocab)
    return WordVectors(dim=dim, vocab=vocab, matrix=matrix, freq=freq)


def _load_frequencies(freq_path: str | os.PathLike, vocab: dict[str, int]) -> dict[str, float]:
    counts: dict[str, float] = {}
    total = 0.0
    with Path(freq_path).open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.split()
            if not parts or parts[0].startswith("#"):
                continue
            if len(parts) != 2:
                raise ParseError("expected 'word count' lines", path=str(freq_path), line=lineno)
            try:
                value = float(parts[1])
            except ValueError:
                raise ParseError("non-numeric count", path=str(freq_path), line=lineno) from None
            if value < 0:
                raise ParseError("negative count", path=str(freq_path), line=lineno)
            counts[parts[0]] = counts.get(parts[0], 0.0) + value
            total += value
    if total <= 0:
        raise ParseError("frequency file has no positive counts", path=str(freq_path))
    return {w: counts.get(w, 0.0) / total for w in vocab}


# ---------------------------------------------------------------------------
# Sentence embeddings
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class UsifParams:
    """Embedding hyperparameters: principal directions to strip and the
    assumed average sentence length used to derive the frequency weight."""

    n_components: int = 5
    avg_sentence_len: int = 11

    def __post_init__(self):
        if self.n_components < 0:
            raise ConfigError("n_components must be >= 0")
        if self.avg_sentence_len < 1:
            raise ConfigError("avg_sentence_len must be >= 1")


@dataclass(frozen=True)
class SentenceEmbedding:
    vector: np.ndarray
    oov_fraction: float

    def __post_init__(self):
        if not np.all(np.isfinite(self.vector)):
            raise ValidationError("sentence embedding has non-finite entries")
        if not 0.0 <= self.oov_fraction <= 1.0:
            raise ValidationError("oov_fraction must be in [0, 1]")


def sif_weight_param(wv: WordVectors, avg_sentence_len: int) -> float:
    """Derive the smoothing constant ``a`` for weights ``a / (a + freq(w))``.

    A word is "common" when its relative frequency exceeds the chance of
    appearing in a random sentence of the given length; ``a`` shrinks as the
    common fraction alpha grows. Alpha is clamped away from 0 and 1 so tiny
    or uniform vocabularies stay well-defined.
    """
    vocab_size = len(wv.vocab)
    if vocab_size == 0:
        return 1e-3
    threshold = 1.0 - (1.0 - 1.0 / vocab_size) ** avg_sentence_len
    common = sum(1 for w in wv.vocab if wv.freq.get(w, 0.0) > threshold)
    alpha = common / vocab_size
    alpha = min(max(alpha, 1.0 / vocab_size), max(1.0 / vocab_size, 1.0 - 1.0 / vocab_size))
    a = (1.0 - alpha) / (alpha * vocab_size)
    return a if a > 0 else 1e-3


def usif_embed(text: str, wv: WordVectors, params: UsifParams = UsifParams()) -> SentenceEmbedding:
    """Frequency-weighted average of word vectors.

    Out-of-vocabulary tokens are dropped and reported via ``oov_fraction``;
    an empty or all-OOV input yields the zero vector with oov_fraction 1.0.
    """
    tokens = tokenize(text)
    a = sif_weight_param(wv, params.avg_sentence_len)
    in_vocab = [t for t in tokens if t in wv.vocab]
    if not tokens or not in_vocab:
        return SentenceEmbedding(vector=np.zeros(wv.dim), oov_fraction=1.0)
    acc = np.zeros(wv.dim)
    for token in in_vocab:
        weight = a / (a + wv.freq.get(token, 0.0))
        acc += weight * wv.matrix[wv.vocab[token]]
    acc /= len(in_vocab)
    oov = 1.0 - len(in_vocab) / len(tokens)
    return SentenceEmbedding(vector=acc, oov_fraction=oov)


@dataclass(frozen=True)
class ComponentBasis:
    """Principal directions (orthonormal rows) with their removal weights."""

    components: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        if self.components.ndim != 2 or len(self.weights) != self.components.shape[0]:
            raise ValidationError("components and weights disagree in shape")

    def to_payload(self) -> dict:
        return {"components": self.components.tolist(), "weights": self.weights.tolist()}

    @classmethod
    def from_payload(cls, data: dict) -> "ComponentBasis":
        return cls(
            components=np.asarray(data["components"], dtype=np.float64),
            weights=np.asarray(data["weights"], dtype=np.float64),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_payload(), indent=2)

    @classmethod
    def from_json(cls, payload: str) -> "ComponentBasis":
        return cls.from_payload(json.loads(payload))


def fit_common_components(embeddings: list[SentenceEmbedding], m: int) -> ComponentBasis:
    """Top-m principal directions of the embedding matrix, weighted by their
    share of explained variance among the m."""
    if m < 0:
        raise ConfigError("m must be >= 0")
    if m > len(embeddings):
        raise ConfigError(f"cannot fit {m} components from {len(embeddings)} embeddings")
    if m == 0:
        dim = embeddings[0].vector.shape[0] if embeddings else 0
        return ComponentBasis(components=np.zeros((0, dim)), weights=np.zeros(0))
    matrix = np.stack([e.vector for e in embeddings])
    if m > matrix.shape[1]:
        raise ConfigError(f"m={m} exceeds embedding dimension {matrix.shape[1]}")
    _, singular, vt = np.linalg.svd(matrix, full_matrices=False)
    top = singular[:m] ** 2
    total = top.sum()
    weights = top / total if total > 0 else np.zeros(m)
    return ComponentBasis(components=vt[:m], weights=weights)


def remove_components(emb: SentenceEmbedding, basis: ComponentBasis) -> SentenceEmbedding:
    """Strip each basis direction from the embedding, scaled by its weight."""
    vector = emb.vector.copy()
    for direction, weight in zip(basis.components, basis.weights):
        vector = vector - weight * np.dot(vector, direction) * direction
    return SentenceEmbedding(vector=vector, oov_fraction=emb.oov_fraction)


def usif_embed_corpus(
    texts: list[str], wv: WordVectors, params: UsifParams = UsifParams()
) -> list[SentenceEmbedding]:
    """Embed a corpus: weighted averages, then common-component removal when
    ``params.n_components > 0``. With ``n_components = 0`` this is exactly the
    per-sentence weighted mean."""
    embeddings = [usif_embed(t, wv, params) for t in texts]
    m = min(params.n_components, len(embeddings), wv.dim)
    if m == 0:
        return embeddings
    basis = fit_common_components(embeddings, m)
    return [remove_components(e, basis) for e in embeddings]


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    """Cosine similarity; either zero vector maps to 0.0 by convention."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise ValidationError(f"dimension mismatch: {u.shape} vs {v.shape}")
    norm_u = np.linalg.norm(u)
    norm_v = np.linalg.norm(v)
    if norm_u == 0.0 or norm_v == 0.0:
        return 0.0
    value = float(np.dot(u, v) / (norm_u * norm_v))
    return max(-1.0, min(1.0, value))


# ---------------------------------------------------------------------------
# Polarity
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PolarityScore:
    value: float

    def __post_init__(self):
        if not -1.0 <= self.value <= 1.0:
            raise ValidationError(f"polarity {self.value} outside [-1, 1]")

    @property
    def sign(self) -> int:
        return (self.value > 0) - (self.value < 0)


class PolarityLexicon:
    """token -> valence map loaded from TSV (``token<TAB>valence``)."""

    def __init__(self, valences: dict[str, float]):
        self._valences = {k.lower(): float(v) for k, v in valences.items()}

    def __contains__(self, token: str) -> bool:
        return token in self._valences

    def __len__(self) -> int:
        return len(self._valences)

    def get(self, token: str) -> float | None:
        return self._valences.get(token)

    @classmethod
    def from_file(cls, path: str | os.PathLike) -> "PolarityLexicon":
        valences: dict[str, float] = {}
        with Path(path).open("r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                stripped = line.strip()
                if not stripped or stripped.startswith("#"):
                    continue
                parts = stripped.split("\t")
                if len(parts) != 2:
                    raise ParseError("expected 'token<TAB>valence'", path=str(path), line=lineno)
                try:
                    valences[parts[0].lower()] = float(parts[1])
                except ValueError:
                    raise ParseError("non-numeric valence", path=str(path), line=lineno) from None
        return cls(valences)

    @classmethod
    def bundled(cls) -> "PolarityLexicon":
        """The small built-in valence lexicon of efficacy/safety terms."""
        with resources.files("contramine.data").joinpath("polarity_lexicon.tsv").open(
            "r", encoding="utf-8"
        ) as fh:
            valences: dict[str, float] = {}
            for line in fh:
                stripped = line.strip()
                if not stripped or stripped.startswith("#"):
                    continue
                token, valence = stripped.split("\t")
                valences[token.lower()] = float(valence)
        return cls(valences)


def _normalize_score(score: float, alpha: float = 15.0) -> float:
    norm = score / math.sqrt(score * score + alpha)
    return max(-1.0, min(1.0, norm))


def polarity(text: str, lexicon: PolarityLexicon) -> PolarityScore:
    """Rule-based compound polarity in [-1, 1].

    For each valence-bearing token, the three preceding tokens (nearest
    first) adjust it: intensifiers add a distance-damped boost aligned with
    the valence sign, and negators multiply by :data:`NEGATION_SCALAR`.
    Tokens that carry valence themselves never act as modifiers. The summed
    score is squashed by ``s / sqrt(s^2 + 15)``; empty input scores 0.0.
    """
    tokens = tokenize(text)
    total = 0.0
    for i, token in enumerate(tokens):
        valence = lexicon.get(token)
        if valence is None:
            continue
        for distance in (1, 2, 3):
            j = i - distance
            if j < 0:
                break
            prev = tokens[j]
            if prev in lexicon:
                continue
            boost = BOOSTERS.get(prev)
            if boost is not None:
                scaled = boost * _BOOST_DAMPING[distance]
                valence += scaled if valence >= 0 else -scaled
            if prev in NEGATORS:
                valence *= NEGATION_SCALAR
        total += valence
    if total == 0.0:
        return PolarityScore(0.0)
    return PolarityScore(_normalize_score(total))


# ---------------------------------------------------------------------------
# Bundled handles
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TextRepHandles:
    """The embedding + polarity bundle threaded through the sampler and miner."""

    wv: WordVectors
    params: UsifParams = UsifParams()
    lexicon: PolarityLexicon = field(default_factory=PolarityLexicon.bundled)
    basis: ComponentBasis | None = None

    def embed(self, text: str) -> SentenceEmbedding:
        emb = usif_embed(text, self.wv, self.params)
        if self.basis is not None:
            emb = remove_components(emb, self.basis)
        return emb

    def polarity(self, text: str) -> PolarityScore:
        return polarity(text, self.lexicon)

    def similarity(self, text_a: str, text_b: str) -> float:
        return cosine(self.embed(text_a).vector, self.embed(text_b).vector)


def topic_relevance(claim_text: str, topic: str, handles: TextRepHandles) -> float:
    """Cosine similarity between the claim embedding and the topic embedding."""
    if not topic:
        raise ValidationError("topic must be non-empty")
    return handles.similarity(claim_text, topic)


def handles_for_corpus(
    texts: list[str],
    wv: WordVectors,
    params: UsifParams = UsifParams(),
    lexicon: PolarityLexicon | None = None,
) -> TextRepHandles:
    """Handles whose common-component basis is fitted on the given corpus.

    The requested component count is clamped to what the corpus and vector
    dimensionality can support; with no texts or zero components the handles
    embed without removal.
    """
    basis = None
    m = min(params.n_components, len(texts), wv.dim)
    if m > 0:
        embeddings = [usif_embed(t, wv, params) for t in texts]
        basis = fit_common_components(embeddings, m)
    return TextRepHandles(
        wv=wv,
        params=params,
        lexicon=lexicon if lexicon is not None else PolarityLexicon.bundled(),
        basis=basis,
    )
