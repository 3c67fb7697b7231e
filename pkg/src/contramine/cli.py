"""Command-line entry point binding the pipeline into reproducible commands.

Every command takes --out and writes its artifacts there atomically, plus a
``<command>_config.json`` recording the fully resolved flags, so a finished
directory documents how it was produced. Exit codes: 0 success, 1 usage
error, 2 data/validation error, 3 backend/transport error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .annotation import (
    AgreementMatrix,
    ClaimFeatures,
    SpanAnnotation,
    fleiss_kappa,
    guideline_label,
)
from .classifiers import (
    BACKEND_URL_ENV,
    CROSS_PRODUCT_CAP,
    FEATURIZER_KINDS,
    BaselineScorer,
    RemoteScorer,
    TrainHyperparams,
    train_baseline,
)
from .corpus import (
    ClaimSet,
    DrugLexicon,
    TopicLexicon,
    bundled_covid_terms,
    filter_covid_claims,
    ingest_claims,
    write_claims,
)
from .curriculum import (
    SWEEP_BATCH_SIZES,
    SWEEP_LEARNING_RATES,
    CurriculumManifest,
    Label3,
    TrainParams,
    build_mancon_nli,
    enumerate_orders,
    forward_subsequences,
    load_labeled_pairs_jsonl,
    plan_curriculum,
    plan_hyperparameter_grid,
    read_manifest,
    read_stance_claims,
    write_nli_jsonl,
)
from .errors import (
    ConfigError,
    ContramineError,
    DataError,
    ParseError,
    TransportError,
    ValidationError,
)
from .evaluation import evaluate
from .miner import (
    MinerConfig,
    build_reports,
    mine_candidates,
    rank_contradictions,
    score_pairs,
    write_reports,
)
from .pairgen import (
    SamplerConfig,
    build_claim_graph,
    read_pairs,
    sample_candidate_pairs,
    split_by_components,
    write_pairs,
)
from .storage import read_jsonl, write_json_atomic, write_jsonl_atomic
from .textrep import PolarityLexicon, UsifParams, handles_for_corpus, load_word_vectors

LOG = logging.getLogger("contramine")


class UsageError(Exception):
    """Bad command line; exits 1 instead of argparse's default 2."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# ---------------------------------------------------------------------------
# Flag value parsers (argparse types raise ArgumentTypeError -> usage error)
# ---------------------------------------------------------------------------


def _comma_floats(text: str) -> tuple[float, ...]:
    try:
        values = tuple(float(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def _comma_ints(text: str) -> tuple[int, ...]:
    try:
        values = tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def _comma_strings(text: str) -> tuple[str, ...]:
    values = tuple(part.strip() for part in text.split(",") if part.strip())
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def _three_ratios(text: str) -> tuple[float, float, float]:
    values = _comma_floats(text)
    if len(values) != 3:
        raise argparse.ArgumentTypeError(f"expected three ratios, got {len(values)}")
    return values  # type: ignore[return-value]


def _three_sizes(text: str) -> tuple[int, int, int]:
    values = _comma_ints(text)
    if len(values) != 3:
        raise argparse.ArgumentTypeError(f"expected three sizes, got {len(values)}")
    return values  # type: ignore[return-value]


# ---------------------------------------------------------------------------
# Shared helpers
# ---------------------------------------------------------------------------


def _prepare_out(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    resolved = {}
    for key, value in sorted(vars(args).items()):
        if key == "func" or callable(value):
            continue
        if isinstance(value, Path):
            value = str(value)
        if isinstance(value, tuple):
            value = list(value)
        resolved[key] = value
    write_json_atomic(out / f"{args.command.replace('-', '_')}_config.json", resolved)
    return out


def _read_json_file(path: str) -> dict:
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", path=path, line=exc.lineno)
    if not isinstance(payload, dict):
        raise ParseError("expected a JSON object", path=path, line=1)
    return payload


def _load_handles(args, corpus_texts: list[str]):
    if not getattr(args, "vectors", None):
        raise ConfigError("this command needs word vectors; pass --vectors")
    wv = load_word_vectors(args.vectors, getattr(args, "freq", None))
    params = UsifParams(n_components=args.components)
    lexicon = (
        PolarityLexicon.from_file(args.polarity_lexicon)
        if getattr(args, "polarity_lexicon", None)
        else PolarityLexicon.bundled()
    )
    return handles_for_corpus(corpus_texts, wv, params, lexicon)


def _resolve_scorer(args, handles_factory):
    """Pick the scorer: --model wins, then --backend, then the env variable."""
    if getattr(args, "model", None):
        handles = None
        payload = _read_json_file(args.model)
        if payload.get("featurizer", {}).get("kind") == "sim_polarity":
            handles = handles_factory()
        return BaselineScorer.load(args.model, handles=handles)
    endpoint = getattr(args, "backend", None)
    if endpoint:
        return RemoteScorer(
            endpoint=endpoint,
            batch_size=args.batch_size,
            timeout=args.timeout,
            retries=args.retries,
            max_workers=args.max_workers,
        )
    import os

    endpoint = os.environ.get(BACKEND_URL_ENV)
    if endpoint:
        return RemoteScorer(
            endpoint=endpoint,
            batch_size=args.batch_size,
            timeout=args.timeout,
            retries=args.retries,
            max_workers=args.max_workers,
        )
    raise ConfigError(f"no scorer: pass --model or --backend, or set {BACKEND_URL_ENV}")


def _load_span_annotations(path: str, claims: ClaimSet) -> dict[str, ClaimFeatures]:
    features: dict[str, ClaimFeatures] = {}
    for lineno, record in read_jsonl(path):
        claim_id = record.get("claim_id")
        if not isinstance(claim_id, str) or not claim_id:
            raise ParseError("missing claim_id", path=path, line=lineno)
        if claim_id in features:
            raise ParseError(f"duplicate annotations for claim {claim_id!r}", path=path, line=lineno)
        claim = claims.get(claim_id)
        if claim is None:
            raise ParseError(f"unknown claim {claim_id!r}", path=path, line=lineno)
        spans = [SpanAnnotation.from_record(s) for s in record.get("spans", [])]
        for span in spans:
            span.validate_against(claim.text)
        features[claim_id] = ClaimFeatures.from_spans(spans)
    return features


def _labels_from_file(path: str, allow_scores: bool) -> list[Label3]:
    from .annotation import Label6, collapse_label
    from .classifiers import ScoreDistribution

    labels = []
    for lineno, record in read_jsonl(path):
        if "label" in record:
            try:
                labels.append(collapse_label(Label6(record["label"])))
            except ValueError:
                raise ParseError(f"unknown label {record['label']!r}", path=path, line=lineno)
        elif allow_scores and "scores" in record:
            labels.append(ScoreDistribution.from_wire(record["scores"]).argmax_label())
        else:
            raise ParseError("record has neither 'label' nor 'scores'", path=path, line=lineno)
    if not labels:
        raise ValidationError(f"{path}: no labels found")
    return labels


# ---------------------------------------------------------------------------
# Command implementations
# ---------------------------------------------------------------------------


def _cmd_ingest(args):
    out = _prepare_out(args)
    claims = ingest_claims(args.input, format=args.format)
    target = out / "claims.jsonl"
    write_claims(claims, target)
    print(f"ingested {len(claims)} claims -> {target}")


def _cmd_filter(args):
    out = _prepare_out(args)
    claims = ingest_claims(args.input)
    if args.terms:
        from .corpus import _load_lexicon_entries

        terms = _load_lexicon_entries(args.terms)
    else:
        terms = list(bundled_covid_terms())
    kept = filter_covid_claims(claims, terms)
    target = out / "claims.jsonl"
    write_claims(kept, target)
    print(f"kept {len(kept)} of {len(claims)} claims -> {target}")


def _cmd_sample_pairs(args):
    out = _prepare_out(args)
    claims = ingest_claims(args.input)
    drugs = DrugLexicon.from_file(args.drugs) if args.drugs else DrugLexicon.bundled()
    topics = TopicLexicon.from_file(args.topics) if args.topics else TopicLexicon.bundled()
    handles = _load_handles(args, [c.text for c in claims])
    cfg = SamplerConfig(k=args.k, n=args.n, seed=args.seed)
    pairs = sample_candidate_pairs(claims, drugs, topics, handles, cfg)
    target = out / "pairs.jsonl"
    write_pairs(pairs, target)
    print(f"sampled {len(pairs)} candidate pairs -> {target}")


def _cmd_split(args):
    out = _prepare_out(args)
    pairs = read_pairs(args.pairs)
    graph = build_claim_graph(pairs)
    assignment = split_by_components(graph, pairs, ratios=args.ratios, seed=args.seed)
    target = out / "splits.json"
    assignment.write(target)
    sizes = {name: len(getattr(assignment, name)) for name in ("train", "val", "test")}
    print(f"split {len(pairs)} pairs into {sizes} -> {target}")


def _cmd_guideline_label(args):
    out = _prepare_out(args)
    claims = ingest_claims(args.claims)
    pairs = read_pairs(args.pairs)
    features = _load_span_annotations(args.annotations, claims)
    records = []
    counts: dict[str, int] = {}
    for pair in pairs:
        a = claims.get(pair.a_id)
        b = claims.get(pair.b_id)
        if a is None or b is None:
            raise ValidationError(f"pair {pair.key} references a claim not in the corpus")
        label = guideline_label(features.get(pair.a_id), features.get(pair.b_id))
        counts[label.value] = counts.get(label.value, 0) + 1
        records.append(
            {
                "a_id": pair.a_id,
                "b_id": pair.b_id,
                "premise": a.text,
                "hypothesis": b.text,
                "label": label.value,
            }
        )
    target = out / "labels.jsonl"
    write_jsonl_atomic(target, records)
    summary = ", ".join(f"{k}={v}" for k, v in sorted(counts.items()))
    print(f"labeled {len(records)} pairs ({summary}) -> {target}")


def _cmd_kappa(args):
    out = _prepare_out(args)
    matrix = AgreementMatrix.from_csv(args.matrix)
    kappa = fleiss_kappa(matrix)
    target = out / "kappa.json"
    write_json_atomic(
        target,
        {
            "kappa": kappa,
            "n_items": matrix.n_items,
            "n_raters": matrix.n_raters,
            "n_categories": matrix.n_categories,
        },
    )
    print(f"fleiss_kappa={kappa:.6f} items={matrix.n_items} raters={matrix.n_raters}")


def _cmd_build_mancon(args):
    out = _prepare_out(args)
    claims = read_stance_claims(args.claims)
    train, val, test = build_mancon_nli(claims, question_split=args.sizes, seed=args.seed)
    summary = {}
    for dataset in (train, val, test):
        target = out / f"mancon.{dataset.split}.jsonl"
        write_nli_jsonl(dataset, target)
        summary[dataset.split] = {"n": len(dataset), **dataset.class_counts()}
    write_json_atomic(out / "mancon_summary.json", summary)
    print(
        "built mancon NLI splits: "
        + ", ".join(f"{split}={summary[split]['n']}" for split in ("train", "val", "test"))
    )


def _cmd_plan_curriculum(args):
    out = _prepare_out(args)
    sizes_raw = _read_json_file(args.sizes)
    try:
        sizes = {str(name): int(count) for name, count in sizes_raw.items()}
    except (TypeError, ValueError):
        raise ParseError("sizes file must map dataset names to integers", path=args.sizes, line=1)
    train_params = TrainParams(epochs=args.epochs, learning_rate=args.lr, batch_size=args.batch_size)

    if args.kind == "subsequence":
        orders = forward_subsequences(args.order)
    elif args.kind == "shuffled":
        orders = enumerate_orders(args.order, "shuffled", n=args.count, seed=args.seed)
    else:
        orders = enumerate_orders(args.order, args.kind)

    index = []
    for position, order in enumerate(orders):
        manifest = plan_curriculum(
            sizes,
            order,
            r=args.ratio,
            d=args.base_size,
            train_params=train_params,
            seed=args.seed,
            kind=args.kind,
        )
        if len(orders) == 1:
            filename = f"manifest_{args.kind}.json"
        else:
            filename = f"manifest_{args.kind}_{position:02d}.json"
        manifest.write(out / filename)
        index.append({"file": filename, "kind": args.kind, "order": list(order)})
    write_json_atomic(out / "curriculum_index.json", index)
    print(f"planned {len(index)} manifest(s) -> {out}")


def _cmd_hp_grid(args):
    out = _prepare_out(args)
    base = read_manifest(args.manifest)
    grid = plan_hyperparameter_grid(args.lrs, args.batch_sizes, base)
    index = []
    for position, manifest in enumerate(grid):
        filename = f"grid_{position:03d}.json"
        manifest.write(out / filename)
        index.append(
            {
                "file": filename,
                "learning_rate": manifest.train_params.learning_rate,
                "batch_size": manifest.train_params.batch_size,
            }
        )
    write_json_atomic(out / "grid_index.json", index)
    print(f"planned {len(grid)} manifests -> {out}")


def _cmd_train_baseline(args):
    out = _prepare_out(args)
    dataset = load_labeled_pairs_jsonl(args.train, split="train")
    if not dataset.items:
        raise ValidationError(f"{args.train}: empty training set")
    pairs = [(item.premise, item.hypothesis) for item in dataset.items]
    labels = [item.label for item in dataset.items]
    handles = None
    if args.featurizer == "sim_polarity":
        texts = [t for pair in pairs for t in pair]
        handles = _load_handles(args, texts)
    hp = TrainHyperparams(epochs=args.epochs, lr=args.lr, l2=args.l2, seed=args.seed)
    scorer = train_baseline(
        args.featurizer, pairs, labels, hp, handles=handles, max_pairs=args.max_pairs
    )
    target = out / "model.json"
    scorer.save(target)
    final_loss = scorer.model.metadata["final_loss"]
    print(f"trained {args.featurizer} on {len(pairs)} pairs, final loss {final_loss:.6f} -> {target}")


def _cmd_score(args):
    out = _prepare_out(args)
    records = []
    pairs = []
    for lineno, record in read_jsonl(args.pairs):
        for field in ("premise", "hypothesis"):
            if field not in record:
                raise ParseError(f"missing field {field!r}", path=args.pairs, line=lineno)
        pairs.append((str(record["premise"]), str(record["hypothesis"])))
        records.append(record)

    def handles_factory():
        texts = [t for pair in pairs for t in pair]
        return _load_handles(args, texts)

    scorer = _resolve_scorer(args, handles_factory)
    distributions = scorer.score_batch(pairs)
    target = out / "scores.jsonl"
    write_jsonl_atomic(
        target,
        (
            {"premise": premise, "hypothesis": hypothesis, "scores": dist.to_wire()}
            for (premise, hypothesis), dist in zip(pairs, distributions)
        ),
    )
    print(f"scored {len(pairs)} pairs -> {target}")


def _cmd_evaluate(args):
    out = _prepare_out(args)
    preds = _labels_from_file(args.pred, allow_scores=True)
    golds = _labels_from_file(args.gold, allow_scores=False)
    report = evaluate(preds, golds)
    target = out / "eval.json"
    report.write(target)
    print(
        f"n={report.n} macro_f1={report.macro_f1:.6f} "
        f"contradiction_recall={report.contradiction_recall:.6f} -> {target}"
    )


def _cmd_mine(args):
    out = _prepare_out(args)
    claims = ingest_claims(args.claims)
    cfg = MinerConfig(
        drugs_of_interest=args.drugs,
        sim_threshold=args.sim_threshold,
        max_papers=args.max_papers,
        contradiction_threshold=args.contradiction_threshold,
        scorer_ref=args.model or args.backend or "",
    )
    handles = _load_handles(args, [c.text for c in claims])
    candidates = mine_candidates(claims, cfg, handles, seed=args.seed)
    write_pairs(candidates, out / "candidates.jsonl")

    def handles_factory():
        return handles

    scorer = _resolve_scorer(args, handles_factory)
    checkpoint = args.checkpoint or str(out / "scored_checkpoint.jsonl")
    scored = score_pairs(
        candidates, claims, scorer, checkpoint_path=checkpoint, checkpoint_every=args.checkpoint_every
    )
    ranked = rank_contradictions(scored, cfg)
    write_jsonl_atomic(out / "ranked.jsonl", (s.to_record() for s in ranked))
    reports = build_reports(ranked, claims)
    md_path, json_path = write_reports(reports, out)
    write_json_atomic(
        out / "mine_summary.json",
        {
            "n_claims": len(claims),
            "n_candidates": len(candidates),
            "n_contradictions": len(ranked),
            "n_reports": len(reports),
        },
    )
    print(
        f"mined {len(candidates)} candidates, {len(ranked)} predicted contradictions, "
        f"{len(reports)} reports -> {md_path} / {json_path}"
    )


def _cmd_report(args):
    out = _prepare_out(args)
    from .miner import ScoredPair

    claims = ingest_claims(args.claims)
    scored = [ScoredPair.from_record(record) for _, record in read_jsonl(args.scored)]
    cfg = MinerConfig(
        drugs_of_interest=("placeholder",),  # filters already ran during mining
        contradiction_threshold=args.contradiction_threshold,
    )
    ranked = rank_contradictions(scored, cfg)
    reports = build_reports(ranked, claims)
    md_path, json_path = write_reports(reports, out)
    print(f"rendered {len(reports)} reports from {len(ranked)} pairs -> {md_path} / {json_path}")


# ---------------------------------------------------------------------------
# Parser construction
# ---------------------------------------------------------------------------


def _add_common(parser: argparse.ArgumentParser):
    parser.add_argument("--out", default="out", help="output directory (default: ./out)")
    parser.add_argument("--seed", type=int, default=0, help="seed for stochastic steps")
    parser.add_argument("--config", default=None, help="JSON file of flag defaults")
    parser.add_argument(
        "--log-level",
        default="warning",
        choices=("debug", "info", "warning", "error"),
        help="stderr log level",
    )
    parser.add_argument(
        "--json-errors", action="store_true", help="emit machine-readable errors on stderr"
    )


def _add_textrep_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--vectors", default=None, help="word vectors file (text format)")
    parser.add_argument("--freq", default=None, help="word frequency sidecar file")
    parser.add_argument("--components", type=int, default=5, help="common components to remove")
    parser.add_argument("--polarity-lexicon", default=None, help="token<TAB>valence TSV")


def _add_scorer_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--model", default=None, help="baseline model JSON file")
    parser.add_argument("--backend", default=None, help=f"scorer URL (or ${BACKEND_URL_ENV})")
    parser.add_argument("--batch-size", type=int, default=32, help="remote scoring batch size")
    parser.add_argument("--timeout", type=float, default=30.0, help="request timeout seconds")
    parser.add_argument("--retries", type=int, default=2, help="transport retries per batch")
    parser.add_argument("--max-workers", type=int, default=4, help="concurrent batches in flight")


def build_parser() -> _Parser:
    parser = _Parser(prog="contramine", description=__doc__)
    subparsers = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def command(name, func, help_text):
        sub = subparsers.add_parser(name, help=help_text)
        sub.set_defaults(func=func)
        _add_common(sub)
        return sub

    sub = command("ingest", _cmd_ingest, "validate and normalize a claim corpus")
    sub.add_argument("--input", required=True, help="claims JSONL file")
    sub.add_argument("--format", default="jsonl", choices=("jsonl",), help="input format")

    sub = command("filter", _cmd_filter, "keep claims mentioning configured disease terms")
    sub.add_argument("--input", required=True, help="claims JSONL file")
    sub.add_argument("--terms", default=None, help="term list file (default: built-in)")

    sub = command("sample-pairs", _cmd_sample_pairs, "heuristically sample candidate claim pairs")
    sub.add_argument("--input", required=True, help="claims JSONL file")
    sub.add_argument("--drugs", default=None, help="drug list file (default: built-in)")
    sub.add_argument("--topics", default=None, help="topic list file (default: built-in)")
    sub.add_argument("--k", type=int, default=7, help="top-k claims per polarity sign")
    sub.add_argument("--n", type=int, default=1000, help="final subsample size")
    _add_textrep_flags(sub)

    sub = command("split", _cmd_split, "component-wise train/val/test split of pairs")
    sub.add_argument("--pairs", required=True, help="pairs JSONL file")
    sub.add_argument(
        "--ratios", type=_three_ratios, default=(0.7, 0.15, 0.15), help="train,val,test ratios"
    )

    sub = command("guideline-label", _cmd_guideline_label, "label pairs from span annotations")
    sub.add_argument("--pairs", required=True, help="pairs JSONL file")
    sub.add_argument("--claims", required=True, help="claims JSONL file")
    sub.add_argument("--annotations", required=True, help="span annotations JSONL file")

    sub = command("kappa", _cmd_kappa, "Fleiss' kappa from an item-category count CSV")
    sub.add_argument("--matrix", required=True, help="CSV of per-item category counts")

    sub = command("build-mancon", _cmd_build_mancon, "pair stance claims into NLI splits")
    sub.add_argument("--claims", required=True, help="stance claims JSONL file")
    sub.add_argument(
        "--sizes", type=_three_sizes, default=(12, 4, 4), help="train,val,test question counts"
    )

    sub = command("plan-curriculum", _cmd_plan_curriculum, "emit curriculum manifests")
    sub.add_argument("--sizes", required=True, help="JSON file mapping dataset -> train size")
    sub.add_argument(
        "--order",
        type=_comma_strings,
        default=("multinli", "mednli", "mancon", "covid"),
        help="forward dataset order, most general first",
    )
    sub.add_argument(
        "--kind",
        default="forward",
        choices=("forward", "reverse", "shuffled", "combined", "subsequence"),
    )
    sub.add_argument("--count", type=int, default=1, help="number of shuffled orders")
    sub.add_argument("--ratio", type=float, default=1.0, help="data ratio r")
    sub.add_argument("--base-size", type=int, default=500, help="base size d")
    sub.add_argument("--epochs", type=int, default=4)
    sub.add_argument("--lr", type=float, default=1e-5)
    sub.add_argument("--batch-size", type=int, default=8)

    sub = command("hp-grid", _cmd_hp_grid, "expand a manifest over a hyperparameter grid")
    sub.add_argument("--manifest", required=True, help="base manifest JSON")
    sub.add_argument("--lrs", type=_comma_floats, default=SWEEP_LEARNING_RATES)
    sub.add_argument("--batch-sizes", type=_comma_ints, default=SWEEP_BATCH_SIZES)

    sub = command("train-baseline", _cmd_train_baseline, "train a sparse softmax baseline")
    sub.add_argument("--train", required=True, help="labeled pairs JSONL file")
    sub.add_argument("--featurizer", required=True, choices=FEATURIZER_KINDS)
    sub.add_argument("--epochs", type=int, default=1000)
    sub.add_argument("--lr", type=float, default=0.1)
    sub.add_argument("--l2", type=float, default=1e-4)
    sub.add_argument("--max-pairs", type=int, default=CROSS_PRODUCT_CAP)
    _add_textrep_flags(sub)

    sub = command("score", _cmd_score, "score premise/hypothesis pairs")
    sub.add_argument("--pairs", required=True, help="JSONL with premise/hypothesis fields")
    _add_scorer_flags(sub)
    _add_textrep_flags(sub)

    sub = command("evaluate", _cmd_evaluate, "confusion matrix and macro F1 for predictions")
    sub.add_argument("--pred", required=True, help="JSONL with label or scores per line")
    sub.add_argument("--gold", required=True, help="JSONL with gold label per line")

    sub = command("mine", _cmd_mine, "mine and rank contradictions from a corpus")
    sub.add_argument("--claims", required=True, help="claims JSONL file")
    sub.add_argument(
        "--drugs",
        type=_comma_strings,
        default=("remdesivir", "hydroxychloroquine"),
        help="comma-separated drugs of interest",
    )
    sub.add_argument("--sim-threshold", type=float, default=0.5)
    sub.add_argument("--max-papers", type=int, default=None)
    sub.add_argument("--contradiction-threshold", type=float, default=None)
    sub.add_argument("--checkpoint", default=None, help="scored-pair checkpoint JSONL")
    sub.add_argument("--checkpoint-every", type=int, default=500)
    _add_scorer_flags(sub)
    _add_textrep_flags(sub)

    sub = command("report", _cmd_report, "render reports from checkpointed scored pairs")
    sub.add_argument("--scored", required=True, help="scored pairs JSONL (checkpoint or ranked)")
    sub.add_argument("--claims", required=True, help="claims JSONL file")
    sub.add_argument("--contradiction-threshold", type=float, default=None)

    return parser


def _emit_error(exc: BaseException, code: int, json_errors: bool):
    if json_errors:
        payload = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
        print(json.dumps(payload, ensure_ascii=False), file=sys.stderr)
    else:
        print(f"error: {exc}", file=sys.stderr)


def main(argv=None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    json_errors = "--json-errors" in argv
    parser = build_parser()
    try:
        pre = _Parser(add_help=False)
        pre.add_argument("--config", default=None)
        known, _ = pre.parse_known_args(argv)
        if known.config:
            payload = _read_json_file(known.config)
            parser.set_defaults(**payload)
        args = parser.parse_args(argv)
        if known.config:
            unknown = sorted(set(payload) - set(vars(args)))
            if unknown:
                raise ConfigError(f"config file has unknown keys: {unknown}")
    except UsageError as exc:
        _emit_error(exc, 1, json_errors)
        return 1
    except (DataError, OSError) as exc:
        _emit_error(exc, 2, json_errors)
        return 2

    logging.basicConfig(
        level=getattr(logging, args.log_level.upper()),
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        args.func(args)
        return 0
    except TransportError as exc:
        _emit_error(exc, 3, args.json_errors)
        return 3
    except (DataError, OSError) as exc:
        _emit_error(exc, 2, args.json_errors)
        return 2
    except ContramineError as exc:
        _emit_error(exc, 2, args.json_errors)
        return 2


if __name__ == "__main__":
    sys.exit(main())
