"""Curriculum planning for staged NLI fine-tuning.

Covers four concerns: loading/adapting NLI datasets to a common shape,
enumerating curriculum orders (forward, reverse, shuffled, combined, and
contiguous forward subsequences), sizing each step with the data-ratio rule
size_i = min(r^(k-i) * d, |D_i|), and emitting training manifests as JSON with
a fixed key order so identical plans serialize byte-identically.

A manifest is the entire contract with a trainer: it never embeds dataset
contents, only names, splits, sample sizes, and seeds. Combined curricula
collapse to a single step whose dataset field uses the composite grammar
"name:size+name:size+..."; trainers subsample each component with the step
seed, concatenate in the listed order, and shuffle with the same seed.
"""

from __future__ import annotations

import itertools
import math
import os
import random
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .annotation import Label3, Label6, collapse_label
from .errors import ConfigError, ParseError, ValidationError
from .storage import read_jsonl, write_json_atomic, write_jsonl_atomic

DATASET_NAMES = ("multinli", "mednli", "mancon", "covid", "custom")
DEFAULT_FORWARD_ORDER = ("multinli", "mednli", "mancon", "covid")
DEFAULT_BASE_SIZE = 500

# Sweep values and the winning setting from the reference experiments.
SWEEP_LEARNING_RATES = (5e-6, 1e-5, 3e-5, 5e-5, 1e-4, 3e-4)
SWEEP_BATCH_SIZES = (4, 8, 16, 32)
BEST_LEARNING_RATE = 3e-5
BEST_BATCH_SIZE = 4

CURRICULUM_KINDS = ("forward", "reverse", "shuffled", "combined", "subsequence")


# ---------------------------------------------------------------------------
# NLI datasets and adapters
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NLIItem:
    premise: str
    hypothesis: str
    label: Label3

    def to_record(self) -> dict:
        return {"premise": self.premise, "hypothesis": self.hypothesis, "label": self.label.value}


@dataclass(frozen=True)
class NLIDataset:
    name: str
    split: str
    items: tuple[NLIItem, ...]

    def __post_init__(self):
        if self.name not in DATASET_NAMES:
            raise ValidationError(f"unknown dataset name {self.name!r}; expected one of {DATASET_NAMES}")
        if self.split not in ("train", "val", "test"):
            raise ValidationError(f"unknown split {self.split!r}")
        object.__setattr__(self, "items", tuple(self.items))

    def __len__(self) -> int:
        return len(self.items)

    def class_counts(self) -> dict[str, int]:
        counts = {label.value: 0 for label in Label3}
        for item in self.items:
            counts[item.label.value] += 1
        return counts


@dataclass(frozen=True)
class FieldMap:
    """How to read one JSONL distribution into (premise, hypothesis, label)."""

    premise_field: str = "sentence1"
    hypothesis_field: str = "sentence2"
    label_field: str = "gold_label"
    label_values: Mapping[str, Label3] = None
    skip_labels: frozenset[str] = frozenset({"-"})

    def __post_init__(self):
        if self.label_values is None:
            object.__setattr__(
                self,
                "label_values",
                {
                    "entailment": Label3.ENTAILMENT,
                    "neutral": Label3.NEUTRAL,
                    "contradiction": Label3.CONTRADICTION,
                },
            )

    @classmethod
    def from_dict(cls, config: dict) -> "FieldMap":
        label_values = None
        if "label_values" in config:
            label_values = {raw: Label3(value) for raw, value in config["label_values"].items()}
        return cls(
            premise_field=config.get("premise_field", "sentence1"),
            hypothesis_field=config.get("hypothesis_field", "sentence2"),
            label_field=config.get("label_field", "gold_label"),
            label_values=label_values,
            skip_labels=frozenset(config.get("skip_labels", ("-",))),
        )


def load_nli_jsonl(
    path: str | os.PathLike, name: str, split: str, field_map: FieldMap | None = None
) -> NLIDataset:
    """Read a JSONL NLI distribution; records with skip-listed labels are dropped."""
    field_map = field_map or FieldMap()
    items = []
    for lineno, record in read_jsonl(path):
        for field in (field_map.premise_field, field_map.hypothesis_field, field_map.label_field):
            if field not in record:
                raise ParseError(f"missing field {field!r}", path=str(path), line=lineno)
        raw_label = record[field_map.label_field]
        if raw_label in field_map.skip_labels:
            continue
        if raw_label not in field_map.label_values:
            raise ParseError(f"unknown label {raw_label!r}", path=str(path), line=lineno)
        items.append(
            NLIItem(
                premise=str(record[field_map.premise_field]),
                hypothesis=str(record[field_map.hypothesis_field]),
                label=field_map.label_values[raw_label],
            )
        )
    return NLIDataset(name=name, split=split, items=tuple(items))


def load_labeled_pairs_jsonl(path: str | os.PathLike, split: str, name: str = "covid") -> NLIDataset:
    """Adapter for this pipeline's own labeled pairs: 6-way labels collapse to 3."""
    items = []
    for lineno, record in read_jsonl(path):
        for field in ("premise", "hypothesis", "label"):
            if field not in record:
                raise ParseError(f"missing field {field!r}", path=str(path), line=lineno)
        try:
            label6 = Label6(record["label"])
        except ValueError:
            raise ParseError(f"unknown label {record['label']!r}", path=str(path), line=lineno)
        items.append(
            NLIItem(
                premise=str(record["premise"]),
                hypothesis=str(record["hypothesis"]),
                label=collapse_label(label6),
            )
        )
    return NLIDataset(name=name, split=split, items=tuple(items))


def write_nli_jsonl(dataset: NLIDataset, path: str | os.PathLike) -> None:
    write_jsonl_atomic(path, (item.to_record() for item in dataset.items))


def subsample_items(items: Sequence[NLIItem], n: int, seed: int) -> list[NLIItem]:
    """Seeded uniform sample without replacement; n >= |items| returns everything."""
    if n < 0:
        raise ConfigError("sample size must be >= 0")
    if n >= len(items):
        return list(items)
    return random.Random(seed).sample(list(items), n)


# ---------------------------------------------------------------------------
# Stance-labeled review claims -> NLI pairs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PicoReviewClaim:
    """A claim answering a binary clinical question with an explicit stance."""

    question_id: str
    stance: str
    text: str

    def __post_init__(self):
        if self.stance not in ("yes", "no"):
            raise ValidationError(f"stance must be 'yes' or 'no', got {self.stance!r}")
        if not self.question_id:
            raise ValidationError("empty question_id")

    def to_record(self) -> dict:
        return {"question_id": self.question_id, "stance": self.stance, "text": self.text}

    @classmethod
    def from_record(cls, record: dict) -> "PicoReviewClaim":
        return cls(
            question_id=str(record["question_id"]),
            stance=str(record["stance"]),
            text=str(record["text"]),
        )


def read_stance_claims(path: str | os.PathLike) -> list[PicoReviewClaim]:
    claims = []
    for lineno, record in read_jsonl(path):
        try:
            claims.append(PicoReviewClaim.from_record(record))
        except KeyError as exc:
            raise ParseError(f"missing field {exc.args[0]!r}", path=str(path), line=lineno)
        except ValidationError as exc:
            raise ParseError(str(exc), path=str(path), line=lineno)
    return claims


def assign_question_splits(
    question_ids: Iterable[str],
    sizes: tuple[int, int, int] = (12, 4, 4),
    seed: int = 0,
) -> dict[str, str]:
    """Assign each distinct question to exactly one of train/val/test.

    Val and test receive exactly sizes[1] and sizes[2] questions; train
    absorbs every remaining question. sizes[0] is the nominal train count:
    the reference corpus reports 16 questions alongside a 12/4/4 split, which
    cannot be disjoint, so train taking the remainder (8 of 16, 12 of 20) is
    the reconciliation used here.
    """
    n_train, n_val, n_test = sizes
    if min(sizes) < 1:
        raise ConfigError("split sizes must be >= 1")
    questions = sorted(set(question_ids))
    minimum = 16 if sizes == (12, 4, 4) else n_val + n_test + 1
    if len(questions) < minimum:
        raise ConfigError(
            f"need >= {minimum} distinct questions for split sizes {sizes}, got {len(questions)}"
        )
    rng = random.Random(seed)
    rng.shuffle(questions)
    assignment: dict[str, str] = {}
    for qid in questions[:n_val]:
        assignment[qid] = "val"
    for qid in questions[n_val : n_val + n_test]:
        assignment[qid] = "test"
    for qid in questions[n_val + n_test :]:
        assignment[qid] = "train"
    return assignment


def build_mancon_nli(
    claims: Sequence[PicoReviewClaim],
    question_split: Mapping[str, str] | tuple[int, int, int] = (12, 4, 4),
    seed: int = 0,
) -> tuple[NLIDataset, NLIDataset, NLIDataset]:
    """Pair stance-labeled claims into train/val/test NLI datasets.

    Within a split: same question + same stance -> Entailment, same question +
    opposite stance -> Contradiction, different questions -> Neutral. The
    neutral class is downsampled (seeded) to the size of the next largest
    class. Pairs never cross splits, so questions never leak.
    """
    if not claims:
        raise ValidationError("no stance claims given")
    if isinstance(question_split, tuple):
        assignment = assign_question_splits((c.question_id for c in claims), question_split, seed)
    else:
        assignment = dict(question_split)
    missing = sorted({c.question_id for c in claims} - set(assignment))
    if missing:
        raise ConfigError(f"questions missing a split assignment: {missing[:5]}")

    datasets = []
    for split in ("train", "val", "test"):
        members = sorted(
            (c for c in claims if assignment[c.question_id] == split),
            key=lambda c: (c.question_id, c.stance, c.text),
        )
        entailing: list[NLIItem] = []
        contradicting: list[NLIItem] = []
        neutral: list[NLIItem] = []
        for first, second in itertools.combinations(members, 2):
            if first.question_id == second.question_id:
                label = Label3.ENTAILMENT if first.stance == second.stance else Label3.CONTRADICTION
                bucket = entailing if label is Label3.ENTAILMENT else contradicting
            else:
                label = Label3.NEUTRAL
                bucket = neutral
            bucket.append(NLIItem(premise=first.text, hypothesis=second.text, label=label))
        cap = max(len(entailing), len(contradicting))
        if len(neutral) > cap:
            neutral = random.Random(seed).sample(neutral, cap)
        items = tuple(entailing + contradicting + neutral)
        datasets.append(NLIDataset(name="mancon", split=split, items=items))
    return datasets[0], datasets[1], datasets[2]


def split_validation_half(dataset: NLIDataset, seed: int = 0) -> tuple[NLIDataset, NLIDataset]:
    """Seeded half split; the first half (larger when odd) becomes the val set."""
    n = len(dataset.items)
    if n < 2:
        raise ValidationError("need at least 2 items to split")
    indices = list(range(n))
    random.Random(seed).shuffle(indices)
    half = (n + 1) // 2
    val_items = tuple(dataset.items[i] for i in indices[:half])
    test_items = tuple(dataset.items[i] for i in indices[half:])
    return (
        NLIDataset(name=dataset.name, split="val", items=val_items),
        NLIDataset(name=dataset.name, split="test", items=test_items),
    )


# ---------------------------------------------------------------------------
# Order enumeration
# ---------------------------------------------------------------------------


def enumerate_orders(
    names: Sequence[str],
    kind: str,
    n: int | None = None,
    seed: int = 0,
) -> list[tuple[str, ...]]:
    """Enumerate dataset orders for a curriculum kind.

    Shuffled orders are sampled without replacement from the len!-2
    permutations that are neither the forward nor the reverse order.
    """
    if len(names) < 2:
        raise ConfigError("need at least 2 dataset names")
    if len(set(names)) != len(names):
        raise ConfigError("dataset names must be distinct")
    forward = tuple(names)
    reverse = tuple(reversed(names))
    if kind == "forward":
        return [forward]
    if kind == "reverse":
        return [reverse]
    if kind == "combined":
        return [forward]
    if kind == "shuffled":
        if n is None or n < 1:
            raise ConfigError("shuffled kind needs n >= 1")
        eligible_count = math.factorial(len(names)) - 2
        if n > eligible_count:
            raise ConfigError(
                f"asked for {n} shuffled orders but only {eligible_count} exist"
            )
        eligible = [
            perm for perm in itertools.permutations(names) if perm not in (forward, reverse)
        ]
        return random.Random(seed).sample(eligible, n)
    raise ConfigError(f"unknown curriculum kind {kind!r}")


def forward_subsequences(forward: Sequence[str]) -> list[tuple[str, ...]]:
    """All contiguous subsequences of a 4-dataset forward order, longest first."""
    if len(forward) != 4:
        raise ConfigError(f"expected a 4-dataset order, got {len(forward)}")
    out: list[tuple[str, ...]] = []
    for length in range(4, 0, -1):
        for start in range(0, 4 - length + 1):
            out.append(tuple(forward[start : start + length]))
    return out


# ---------------------------------------------------------------------------
# Manifests
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TrainParams:
    epochs: int = 4
    learning_rate: float = 1e-5
    batch_size: int = 8

    def __post_init__(self):
        if self.epochs < 1:
            raise ConfigError("epochs must be >= 1")
        if self.learning_rate <= 0:
            raise ConfigError("learning rate must be positive")
        if self.batch_size < 1:
            raise ConfigError("batch size must be >= 1")

    def to_dict(self) -> dict:
        return {
            "epochs": self.epochs,
            "learning_rate": self.learning_rate,
            "batch_size": self.batch_size,
        }


@dataclass(frozen=True)
class CurriculumStep:
    dataset: str
    split: str
    sample_size: int
    seed: int

    def __post_init__(self):
        if self.sample_size < 1:
            raise ValidationError("step sample_size must be >= 1")

    def to_dict(self) -> dict:
        return {
            "dataset": self.dataset,
            "split": self.split,
            "sample_size": self.sample_size,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class CurriculumManifest:
    curriculum_kind: str
    steps: tuple[CurriculumStep, ...]
    train_params: TrainParams

    def __post_init__(self):
        if self.curriculum_kind not in CURRICULUM_KINDS:
            raise ValidationError(f"unknown curriculum kind {self.curriculum_kind!r}")
        object.__setattr__(self, "steps", tuple(self.steps))
        if not self.steps:
            raise ValidationError("manifest needs at least one step")
        if self.curriculum_kind == "combined" and len(self.steps) != 1:
            raise ValidationError("combined curricula have exactly one concatenated step")

    def to_dict(self) -> dict:
        return {
            "curriculum_kind": self.curriculum_kind,
            "steps": [step.to_dict() for step in self.steps],
            "train_params": self.train_params.to_dict(),
        }

    def write(self, path: str | os.PathLike) -> None:
        write_json_atomic(path, self.to_dict())

    @classmethod
    def from_dict(cls, payload: dict) -> "CurriculumManifest":
        try:
            steps = tuple(
                CurriculumStep(
                    dataset=str(s["dataset"]),
                    split=str(s["split"]),
                    sample_size=int(s["sample_size"]),
                    seed=int(s["seed"]),
                )
                for s in payload["steps"]
            )
            params = payload["train_params"]
            train_params = TrainParams(
                epochs=int(params["epochs"]),
                learning_rate=float(params["learning_rate"]),
                batch_size=int(params["batch_size"]),
            )
            kind = str(payload["curriculum_kind"])
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed manifest: {exc}")
        return cls(curriculum_kind=kind, steps=steps, train_params=train_params)


def read_manifest(path: str | os.PathLike) -> CurriculumManifest:
    import json

    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", path=str(path), line=exc.lineno)
    if not isinstance(payload, dict):
        raise ParseError("manifest must be a JSON object", path=str(path), line=1)
    return CurriculumManifest.from_dict(payload)


def parse_combined_dataset(spec: str) -> list[tuple[str, int]]:
    """Parse the combined-step grammar "name:size+name:size+..."."""
    parts = []
    for chunk in spec.split("+"):
        name, sep, size = chunk.partition(":")
        if not sep or not name or not size.isdigit() or int(size) < 1:
            raise ValidationError(f"bad combined dataset component {chunk!r}")
        parts.append((name, int(size)))
    if not parts:
        raise ValidationError("empty combined dataset")
    return parts


def step_sizes(sizes: Sequence[int], r: float, d: int) -> list[int]:
    """size_i = min(r^(k-i) * d, |D_i|) with 1-indexed i over k datasets."""
    if r < 1:
        raise ConfigError("data ratio r must be >= 1")
    if d < 1:
        raise ConfigError("base size d must be >= 1")
    k = len(sizes)
    out = []
    for i, cap in enumerate(sizes, start=1):
        if float(r).is_integer():
            raw = int(r) ** (k - i) * d  # exact integers for integral r
        else:
            raw = round(r ** (k - i) * d)
        out.append(min(raw, cap))
    return out


def plan_curriculum(
    sizes: Mapping[str, int],
    order: Sequence[str],
    r: float = 1.0,
    d: int = DEFAULT_BASE_SIZE,
    train_params: TrainParams | None = None,
    seed: int = 0,
    kind: str = "forward",
) -> CurriculumManifest:
    """Build a manifest for one curriculum over datasets with known train sizes."""
    train_params = train_params or TrainParams()
    if not order:
        raise ConfigError("empty curriculum order")
    unknown = [name for name in order if name not in sizes]
    if unknown:
        raise ConfigError(f"unknown dataset name(s): {unknown}")
    for name in order:
        if sizes[name] < 1:
            raise ConfigError(f"dataset {name!r} has no training items")

    planned = step_sizes([sizes[name] for name in order], r, d)
    if kind == "combined":
        composite = "+".join(f"{name}:{size}" for name, size in zip(order, planned))
        steps = (
            CurriculumStep(dataset=composite, split="train", sample_size=sum(planned), seed=seed),
        )
    else:
        steps = tuple(
            CurriculumStep(dataset=name, split="train", sample_size=size, seed=seed)
            for name, size in zip(order, planned)
        )
    return CurriculumManifest(curriculum_kind=kind, steps=steps, train_params=train_params)


def plan_hyperparameter_grid(
    lrs: Sequence[float],
    batch_sizes: Sequence[int],
    base: CurriculumManifest,
) -> list[CurriculumManifest]:
    """One manifest per (learning rate, batch size); everything else unchanged."""
    if not lrs or not batch_sizes:
        raise ConfigError("learning rates and batch sizes must be non-empty")
    grid = []
    for lr in lrs:
        for batch in batch_sizes:
            params = replace(base.train_params, learning_rate=lr, batch_size=batch)
            grid.append(replace(base, train_params=params))
    return grid
