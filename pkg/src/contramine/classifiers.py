"""Claim-pair scorers: sparse softmax baselines and a remote-backend client.

Four featurizers feed a multinomial logistic (softmax) trainer:
hypothesis-only unigram counts, premise/hypothesis unigram overlap, ordered
token cross-product counts, and a dense (similarity, polarity, polarity)
triple. Vocabularies are always fitted on the training split alone, so a
transform can never index a token first seen in validation or test data.

Everything that scores exposes ``score_batch(pairs) -> [ScoreDistribution]``;
``RemoteScorer`` speaks the HTTP wire protocol (POST /v1/score, GET
/v1/health) and validates every response before returning it.
"""

from __future__ import annotations

import json
import os
import time
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Protocol, Sequence

import numpy as np
import requests
from scipy import sparse

from .annotation import Label3
from .errors import ConfigError, DivergenceError, ProtocolError, TransportError, ValidationError
from .storage import write_json_atomic
from .textrep import ComponentBasis, TextRepHandles, UsifParams, tokenize

BACKEND_URL_ENV = "CONTRAMINE_BACKEND_URL"
MODEL_SCHEMA_VERSION = 1
CROSS_PRODUCT_CAP = 50_000

_LABEL_ORDER = (Label3.ENTAILMENT, Label3.NEUTRAL, Label3.CONTRADICTION)
_LABEL_INDEX = {label: i for i, label in enumerate(_LABEL_ORDER)}


@dataclass(frozen=True)
class ScoreDistribution:
    """Class probabilities over (entailment, neutral, contradiction)."""

    p_entailment: float
    p_neutral: float
    p_contradiction: float

    def __post_init__(self):
        probs = (self.p_entailment, self.p_neutral, self.p_contradiction)
        if any(not np.isfinite(p) for p in probs):
            raise ValidationError(f"non-finite probabilities {probs}")
        if any(p < 0 for p in probs):
            raise ValidationError(f"negative probability in {probs}")
        if abs(sum(probs) - 1.0) > 1e-9:
            raise ValidationError(f"probabilities sum to {sum(probs)!r}, expected 1")

    def argmax_label(self) -> Label3:
        probs = (self.p_entailment, self.p_neutral, self.p_contradiction)
        return _LABEL_ORDER[int(np.argmax(probs))]

    def to_wire(self) -> dict:
        return {
            "entailment": self.p_entailment,
            "neutral": self.p_neutral,
            "contradiction": self.p_contradiction,
        }

    @classmethod
    def from_wire(cls, payload: dict) -> "ScoreDistribution":
        return cls(
            p_entailment=float(payload["entailment"]),
            p_neutral=float(payload["neutral"]),
            p_contradiction=float(payload["contradiction"]),
        )


class Scorer(Protocol):
    def score_batch(self, pairs: Sequence[tuple[str, str]]) -> list[ScoreDistribution]: ...


def score_pair(scorer: "Scorer", premise: str, hypothesis: str) -> ScoreDistribution:
    return scorer.score_batch([(premise, hypothesis)])[0]


# ---------------------------------------------------------------------------
# Feature vectors and featurizers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FeatureVector:
    dim: int
    indices: tuple[int, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        if len(self.indices) != len(self.values):
            raise ValidationError("indices/values length mismatch")
        if any(not (0 <= i < self.dim) for i in self.indices):
            raise ValidationError("feature index out of range")
        if any(not np.isfinite(v) for v in self.values):
            raise ValidationError("non-finite feature value")

    def to_dict(self) -> dict[int, float]:
        return dict(zip(self.indices, self.values))


def stack_features(vectors: Sequence[FeatureVector]) -> sparse.csr_matrix:
    """Assemble feature vectors into one CSR matrix (rows in input order)."""
    if not vectors:
        raise ValidationError("no feature vectors to stack")
    dim = vectors[0].dim
    if any(v.dim != dim for v in vectors):
        raise ValidationError("inconsistent feature dimensions")
    data, rows, cols = [], [], []
    for row, vec in enumerate(vectors):
        rows.extend([row] * len(vec.indices))
        cols.extend(vec.indices)
        data.extend(vec.values)
    return sparse.csr_matrix((data, (rows, cols)), shape=(len(vectors), dim), dtype=np.float64)


def _sorted_vector(dim: int, counts: dict[int, float]) -> FeatureVector:
    items = sorted(counts.items())
    return FeatureVector(
        dim=dim,
        indices=tuple(i for i, _ in items),
        values=tuple(float(v) for _, v in items),
    )


class HypothesisUnigramFeaturizer:
    """Unigram counts of the hypothesis; the premise never enters the vector."""

    kind = "hypothesis_unigrams"

    def __init__(self, vocab: Sequence[str] | None = None):
        self._index = {token: i for i, token in enumerate(vocab)} if vocab is not None else None

    @property
    def fitted(self) -> bool:
        return self._index is not None

    @property
    def dim(self) -> int:
        self._require_fitted()
        return len(self._index)

    def _require_fitted(self):
        if not self.fitted:
            raise ValidationError("featurizer not fitted; call fit on the training split first")

    def fit(self, pairs: Sequence[tuple[str, str]]) -> "HypothesisUnigramFeaturizer":
        vocab = sorted({token for _, hypothesis in pairs for token in tokenize(hypothesis)})
        self._index = {token: i for i, token in enumerate(vocab)}
        return self

    def transform(self, premise: str, hypothesis: str) -> FeatureVector:
        self._require_fitted()
        counts: dict[int, float] = {}
        for token in tokenize(hypothesis):
            idx = self._index.get(token)
            if idx is not None:
                counts[idx] = counts.get(idx, 0.0) + 1.0
        return _sorted_vector(len(self._index), counts)

    def to_config(self) -> dict:
        self._require_fitted()
        return {"kind": self.kind, "vocab": sorted(self._index, key=self._index.get)}

    @classmethod
    def from_config(cls, config: dict) -> "HypothesisUnigramFeaturizer":
        return cls(vocab=config["vocab"])


class OverlapFeaturizer:
    """Per-vocabulary-token min(premise count, hypothesis count)."""

    kind = "overlap"

    def __init__(self, vocab: Sequence[str] | None = None):
        self._index = {token: i for i, token in enumerate(vocab)} if vocab is not None else None

    @property
    def fitted(self) -> bool:
        return self._index is not None

    @property
    def dim(self) -> int:
        self._require_fitted()
        return len(self._index)

    def _require_fitted(self):
        if not self.fitted:
            raise ValidationError("featurizer not fitted; call fit on the training split first")

    def fit(self, pairs: Sequence[tuple[str, str]]) -> "OverlapFeaturizer":
        vocab = sorted(
            {token for premise, hypothesis in pairs for token in tokenize(premise) + tokenize(hypothesis)}
        )
        self._index = {token: i for i, token in enumerate(vocab)}
        return self

    def transform(self, premise: str, hypothesis: str) -> FeatureVector:
        self._require_fitted()
        premise_counts = Counter(tokenize(premise))
        hypothesis_counts = Counter(tokenize(hypothesis))
        counts: dict[int, float] = {}
        for token in premise_counts.keys() & hypothesis_counts.keys():
            idx = self._index.get(token)
            if idx is not None:
                counts[idx] = float(min(premise_counts[token], hypothesis_counts[token]))
        return _sorted_vector(len(self._index), counts)

    def to_config(self) -> dict:
        self._require_fitted()
        return {"kind": self.kind, "vocab": sorted(self._index, key=self._index.get)}

    @classmethod
    def from_config(cls, config: dict) -> "OverlapFeaturizer":
        return cls(vocab=config["vocab"])


class CrossProductFeaturizer:
    """Counts of ordered (premise token, hypothesis token) pairs.

    The pair vocabulary is capped at the top max_pairs by training frequency
    (ties broken lexicographically) to bound memory.
    """

    kind = "cross_product"

    def __init__(self, pair_vocab: Sequence[tuple[str, str]] | None = None, max_pairs: int = CROSS_PRODUCT_CAP):
        if max_pairs < 1:
            raise ConfigError("max_pairs must be >= 1")
        self.max_pairs = max_pairs
        self._index = (
            {(p, h): i for i, (p, h) in enumerate(pair_vocab)} if pair_vocab is not None else None
        )

    @property
    def fitted(self) -> bool:
        return self._index is not None

    @property
    def dim(self) -> int:
        self._require_fitted()
        return len(self._index)

    def _require_fitted(self):
        if not self.fitted:
            raise ValidationError("featurizer not fitted; call fit on the training split first")

    def fit(self, pairs: Sequence[tuple[str, str]]) -> "CrossProductFeaturizer":
        frequency: Counter = Counter()
        for premise, hypothesis in pairs:
            p_tokens = tokenize(premise)
            h_tokens = tokenize(hypothesis)
            for p_tok in p_tokens:
                for h_tok in h_tokens:
                    frequency[(p_tok, h_tok)] += 1
        kept = sorted(frequency.items(), key=lambda kv: (-kv[1], kv[0]))[: self.max_pairs]
        vocab = sorted(pair for pair, _ in kept)
        self._index = {pair: i for i, pair in enumerate(vocab)}
        return self

    def transform(self, premise: str, hypothesis: str) -> FeatureVector:
        self._require_fitted()
        counts: dict[int, float] = {}
        p_tokens = tokenize(premise)
        h_tokens = tokenize(hypothesis)
        for p_tok in p_tokens:
            for h_tok in h_tokens:
                idx = self._index.get((p_tok, h_tok))
                if idx is not None:
                    counts[idx] = counts.get(idx, 0.0) + 1.0
        return _sorted_vector(len(self._index), counts)

    def to_config(self) -> dict:
        self._require_fitted()
        ordered = sorted(self._index, key=self._index.get)
        return {
            "kind": self.kind,
            "max_pairs": self.max_pairs,
            "pair_vocab": [[p, h] for p, h in ordered],
        }

    @classmethod
    def from_config(cls, config: dict) -> "CrossProductFeaturizer":
        pair_vocab = [tuple(pair) for pair in config["pair_vocab"]]
        return cls(pair_vocab=pair_vocab, max_pairs=config.get("max_pairs", CROSS_PRODUCT_CAP))


class SimPolarityFeaturizer:
    """Dense triple: embedding cosine, premise polarity, hypothesis polarity."""

    kind = "sim_polarity"

    def __init__(self, handles: TextRepHandles):
        self.handles = handles

    fitted = True
    dim = 3

    def fit(self, pairs: Sequence[tuple[str, str]]) -> "SimPolarityFeaturizer":
        return self  # stateless: nothing is estimated from training data

    def transform(self, premise: str, hypothesis: str) -> FeatureVector:
        similarity = self.handles.similarity(premise, hypothesis)
        return FeatureVector(
            dim=3,
            indices=(0, 1, 2),
            values=(
                float(similarity),
                self.handles.polarity(premise).value,
                self.handles.polarity(hypothesis).value,
            ),
        )

    def to_config(self) -> dict:
        # The basis and uSIF params ride along so reloading scores identically;
        # word vectors are referenced by dimension only and re-supplied at load.
        basis = self.handles.basis
        return {
            "kind": self.kind,
            "dim": self.handles.wv.dim,
            "params": {
                "n_components": self.handles.params.n_components,
                "avg_sentence_len": self.handles.params.avg_sentence_len,
            },
            "basis": basis.to_payload() if basis is not None else None,
        }

    @classmethod
    def from_config(cls, config: dict, handles: TextRepHandles | None = None) -> "SimPolarityFeaturizer":
        if handles is None:
            raise ConfigError("sim_polarity featurizer needs word vectors and a polarity lexicon")
        if "dim" in config and handles.wv.dim != config["dim"]:
            raise ValidationError(
                f"word vectors have dimension {handles.wv.dim}, model expects {config['dim']}"
            )
        params = handles.params
        if "params" in config:
            params = UsifParams(
                n_components=int(config["params"]["n_components"]),
                avg_sentence_len=int(config["params"]["avg_sentence_len"]),
            )
        basis = handles.basis
        if config.get("basis") is not None:
            basis = ComponentBasis.from_payload(config["basis"])
        return cls(
            TextRepHandles(wv=handles.wv, params=params, lexicon=handles.lexicon, basis=basis)
        )


FEATURIZER_KINDS = ("hypothesis_unigrams", "overlap", "cross_product", "sim_polarity")


def build_featurizer(kind: str, handles: TextRepHandles | None = None, max_pairs: int = CROSS_PRODUCT_CAP):
    if kind == "hypothesis_unigrams":
        return HypothesisUnigramFeaturizer()
    if kind == "overlap":
        return OverlapFeaturizer()
    if kind == "cross_product":
        return CrossProductFeaturizer(max_pairs=max_pairs)
    if kind == "sim_polarity":
        if handles is None:
            raise ConfigError("sim_polarity featurizer needs word vectors and a polarity lexicon")
        return SimPolarityFeaturizer(handles)
    raise ConfigError(f"unknown featurizer {kind!r}; expected one of {FEATURIZER_KINDS}")


def featurizer_from_config(config: dict, handles: TextRepHandles | None = None):
    kind = config.get("kind")
    if kind == "hypothesis_unigrams":
        return HypothesisUnigramFeaturizer.from_config(config)
    if kind == "overlap":
        return OverlapFeaturizer.from_config(config)
    if kind == "cross_product":
        return CrossProductFeaturizer.from_config(config)
    if kind == "sim_polarity":
        return SimPolarityFeaturizer.from_config(config, handles)
    raise ConfigError(f"unknown featurizer {kind!r}; expected one of {FEATURIZER_KINDS}")


# ---------------------------------------------------------------------------
# Softmax training
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TrainHyperparams:
    epochs: int = 1000
    lr: float = 0.1
    l2: float = 1e-4
    seed: int = 0

    def __post_init__(self):
        if self.epochs < 0:
            raise ConfigError("epochs must be >= 0")
        if self.lr <= 0:
            raise ConfigError("lr must be positive")
        if self.l2 < 0:
            raise ConfigError("l2 must be >= 0")


@dataclass(frozen=True)
class SoftmaxModel:
    weights: np.ndarray  # 3 x dim
    bias: np.ndarray  # 3
    feature_space: dict
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        weights = np.asarray(self.weights, dtype=np.float64)
        bias = np.asarray(self.bias, dtype=np.float64)
        if weights.ndim != 2 or weights.shape[0] != 3:
            raise ValidationError(f"weights must be 3 x dim, got {weights.shape}")
        if bias.shape != (3,):
            raise ValidationError(f"bias must have shape (3,), got {bias.shape}")
        if not (np.isfinite(weights).all() and np.isfinite(bias).all()):
            raise ValidationError("non-finite model parameters")
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "bias", bias)

    @property
    def dim(self) -> int:
        return self.weights.shape[1]


def _softmax_rows(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=1, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=1, keepdims=True)


def softmax_loss_and_grad(
    weights: np.ndarray,
    bias: np.ndarray,
    X: sparse.csr_matrix,
    Y: np.ndarray,
    l2: float,
) -> tuple[float, np.ndarray, np.ndarray]:
    """Mean cross-entropy + (l2/2)*||W||^2 and its gradients; bias unregularized."""
    n = X.shape[0]
    logits = X @ weights.T + bias
    probs = _softmax_rows(logits)
    picked = np.clip((probs * Y).sum(axis=1), 1e-300, None)
    loss = float(-np.log(picked).mean() + 0.5 * l2 * float((weights**2).sum()))
    delta = (probs - Y) / n
    grad_w = delta.T @ X + l2 * weights
    grad_w = np.asarray(grad_w)
    grad_b = delta.sum(axis=0)
    return loss, grad_w, grad_b


def _one_hot(labels: Sequence[Label3]) -> np.ndarray:
    Y = np.zeros((len(labels), 3), dtype=np.float64)
    for row, label in enumerate(labels):
        Y[row, _LABEL_INDEX[label]] = 1.0
    return Y


def train_softmax(
    features: Sequence[FeatureVector],
    labels: Sequence[Label3],
    hp: TrainHyperparams = TrainHyperparams(),
    feature_space: dict | None = None,
) -> SoftmaxModel:
    """Full-batch gradient descent from zero-initialized parameters."""
    if len(features) != len(labels):
        raise ValidationError(f"{len(features)} feature vectors vs {len(labels)} labels")
    if not features:
        raise ValidationError("empty training set")
    X = stack_features(features)
    Y = _one_hot(labels)
    weights = np.zeros((3, X.shape[1]), dtype=np.float64)
    bias = np.zeros(3, dtype=np.float64)
    loss = float("nan")
    for _ in range(hp.epochs):
        loss, grad_w, grad_b = softmax_loss_and_grad(weights, bias, X, Y, hp.l2)
        if not np.isfinite(loss):
            raise DivergenceError(f"training loss became {loss}; try a smaller lr than {hp.lr}")
        weights -= hp.lr * grad_w
        bias -= hp.lr * grad_b
    final_loss, _, _ = softmax_loss_and_grad(weights, bias, X, Y, hp.l2)
    if not np.isfinite(final_loss):
        raise DivergenceError(f"training loss became {final_loss}; try a smaller lr than {hp.lr}")
    metadata = {
        "seed": hp.seed,
        "epochs": hp.epochs,
        "lr": hp.lr,
        "l2": hp.l2,
        "final_loss": final_loss,
        "n_train": len(features),
    }
    return SoftmaxModel(
        weights=weights,
        bias=bias,
        feature_space=feature_space or {"kind": "raw", "dim": X.shape[1]},
        metadata=metadata,
    )


def predict_proba(model: SoftmaxModel, X: sparse.csr_matrix) -> np.ndarray:
    if X.shape[1] != model.dim:
        raise ValidationError(f"feature dim {X.shape[1]} does not match model dim {model.dim}")
    return _softmax_rows(np.asarray(X @ model.weights.T + model.bias))


@dataclass(frozen=True)
class BaselineScorer:
    """A fitted featurizer plus a trained softmax model."""

    featurizer: object
    model: SoftmaxModel

    def score_batch(self, pairs: Sequence[tuple[str, str]]) -> list[ScoreDistribution]:
        if not pairs:
            return []
        vectors = [self.featurizer.transform(premise, hypothesis) for premise, hypothesis in pairs]
        probs = predict_proba(self.model, stack_features(vectors))
        return [
            ScoreDistribution(
                p_entailment=float(row[0]), p_neutral=float(row[1]), p_contradiction=float(row[2])
            )
            for row in probs
        ]

    def save(self, path: str | os.PathLike) -> None:
        payload = {
            "schema_version": MODEL_SCHEMA_VERSION,
            "featurizer": self.featurizer.to_config(),
            "weights": self.model.weights.tolist(),
            "bias": self.model.bias.tolist(),
            "metadata": self.model.metadata,
        }
        write_json_atomic(path, payload)

    @classmethod
    def load(cls, path: str | os.PathLike, handles: TextRepHandles | None = None) -> "BaselineScorer":
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
        version = payload.get("schema_version")
        if version != MODEL_SCHEMA_VERSION:
            raise ValidationError(f"unsupported model schema version {version!r}")
        featurizer = featurizer_from_config(payload["featurizer"], handles)
        model = SoftmaxModel(
            weights=np.asarray(payload["weights"], dtype=np.float64),
            bias=np.asarray(payload["bias"], dtype=np.float64),
            feature_space=payload["featurizer"],
            metadata=payload.get("metadata", {}),
        )
        return cls(featurizer=featurizer, model=model)


def train_baseline(
    kind: str,
    train_pairs: Sequence[tuple[str, str]],
    train_labels: Sequence[Label3],
    hp: TrainHyperparams = TrainHyperparams(),
    handles: TextRepHandles | None = None,
    max_pairs: int = CROSS_PRODUCT_CAP,
) -> BaselineScorer:
    featurizer = build_featurizer(kind, handles=handles, max_pairs=max_pairs)
    featurizer.fit(train_pairs)
    vectors = [featurizer.transform(premise, hypothesis) for premise, hypothesis in train_pairs]
    model = train_softmax(vectors, train_labels, hp, feature_space=featurizer.to_config())
    return BaselineScorer(featurizer=featurizer, model=model)


# ---------------------------------------------------------------------------
# Remote backend
# ---------------------------------------------------------------------------


def _validate_wire_scores(payload: object, expected: int, base_index: int) -> list[ScoreDistribution]:
    if not isinstance(payload, dict) or "scores" not in payload:
        raise ProtocolError("response missing 'scores'", index=base_index)
    scores = payload["scores"]
    if not isinstance(scores, list) or len(scores) != expected:
        got = len(scores) if isinstance(scores, list) else type(scores).__name__
        raise ProtocolError(f"expected {expected} scores, got {got}", index=base_index)
    out = []
    for offset, entry in enumerate(scores):
        index = base_index + offset
        if not isinstance(entry, dict):
            raise ProtocolError("score entry is not an object", index=index)
        try:
            values = {key: float(entry[key]) for key in ("entailment", "neutral", "contradiction")}
        except (KeyError, TypeError, ValueError) as exc:
            raise ProtocolError(f"malformed score entry: {exc}", index=index)
        try:
            out.append(
                ScoreDistribution(
                    p_entailment=values["entailment"],
                    p_neutral=values["neutral"],
                    p_contradiction=values["contradiction"],
                )
            )
        except ValidationError as exc:
            raise ValidationError(f"score at index {index}: {exc}")
    return out


def _post_score_chunk(
    endpoint: str,
    chunk: Sequence[tuple[str, str]],
    base_index: int,
    timeout: float,
    retries: int,
    backoff: float,
) -> list[ScoreDistribution]:
    body = {"pairs": [{"premise": premise, "hypothesis": hypothesis} for premise, hypothesis in chunk]}
    url = endpoint.rstrip("/") + "/v1/score"
    attempts = retries + 1
    for attempt in range(attempts):
        try:
            response = requests.post(url, json=body, timeout=timeout)
            if response.status_code != 200:
                raise TransportError(
                    f"backend returned HTTP {response.status_code}", retries=attempt
                )
            try:
                payload = response.json()
            except ValueError:
                raise ProtocolError("response is not JSON", index=base_index)
            return _validate_wire_scores(payload, len(chunk), base_index)
        except (requests.RequestException, TransportError) as exc:
            if attempt + 1 >= attempts:
                if isinstance(exc, TransportError):
                    raise TransportError(str(exc), retries=attempt)
                raise TransportError(f"backend unreachable: {exc}", retries=attempt)
            time.sleep(backoff * (2**attempt))
    raise TransportError("unreachable", retries=retries)  # not reached


def remote_score_batch(
    endpoint: str,
    pairs: Sequence[tuple[str, str]],
    batch_size: int = 32,
    timeout: float = 30.0,
    retries: int = 2,
    backoff: float = 0.2,
    max_workers: int = 4,
) -> list[ScoreDistribution]:
    """Score pairs against a wire-protocol backend, preserving input order.

    Chunks are posted concurrently (bounded by max_workers) and reassembled
    by position, so the result is order-identical to sequential calls.
    """
    if batch_size < 1:
        raise ConfigError("batch_size must be >= 1")
    if max_workers < 1:
        raise ConfigError("max_workers must be >= 1")
    if not pairs:
        return []
    chunks = [
        (start, list(pairs[start : start + batch_size])) for start in range(0, len(pairs), batch_size)
    ]
    results: list[list[ScoreDistribution] | None] = [None] * len(chunks)
    if max_workers == 1 or len(chunks) == 1:
        for slot, (start, chunk) in enumerate(chunks):
            results[slot] = _post_score_chunk(endpoint, chunk, start, timeout, retries, backoff)
    else:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            futures = {
                pool.submit(
                    _post_score_chunk, endpoint, chunk, start, timeout, retries, backoff
                ): slot
                for slot, (start, chunk) in enumerate(chunks)
            }
            for future, slot in futures.items():
                results[slot] = future.result()
    flat: list[ScoreDistribution] = []
    for part in results:
        flat.extend(part)
    return flat


@dataclass(frozen=True)
class RemoteScorer:
    """Scorer backed by an HTTP service speaking the wire protocol."""

    endpoint: str
    batch_size: int = 32
    timeout: float = 30.0
    retries: int = 2
    max_workers: int = 4

    @classmethod
    def from_env(cls, **kwargs) -> "RemoteScorer":
        endpoint = os.environ.get(BACKEND_URL_ENV)
        if not endpoint:
            raise ConfigError(f"{BACKEND_URL_ENV} is not set and no --backend was given")
        return cls(endpoint=endpoint, **kwargs)

    def score_batch(self, pairs: Sequence[tuple[str, str]]) -> list[ScoreDistribution]:
        return remote_score_batch(
            self.endpoint,
            pairs,
            batch_size=self.batch_size,
            timeout=self.timeout,
            retries=self.retries,
            max_workers=self.max_workers,
        )

    def health(self) -> dict:
        url = self.endpoint.rstrip("/") + "/v1/health"
        try:
            response = requests.get(url, timeout=self.timeout)
        except requests.RequestException as exc:
            raise TransportError(f"health check failed: {exc}")
        if response.status_code != 200:
            raise TransportError(f"health check returned HTTP {response.status_code}")
        try:
            payload = response.json()
        except ValueError:
            raise ProtocolError("health response is not JSON")
        if payload.get("status") != "ok" or not isinstance(payload.get("model_id"), str):
            raise ProtocolError(f"unexpected health payload: {payload!r}")
        return payload
