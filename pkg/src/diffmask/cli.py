"""``diffmask`` command line: seeds, plan, apply, stats, pipeline.

Exit status: 0 ok, 1 invalid configuration, 2 I/O failure, 3 bad data.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path
from typing import Optional

from diffmask import __version__
from diffmask.analysis import (
    chosen_seed_histogram,
    masked_group_label_fraction,
    masked_word_histogram,
    seed_embedding_variance,
)
from diffmask.background import load_background
from diffmask.config import RunConfig, resolve_config
from diffmask.corpus_io import load_corpus
from diffmask.embeddings import load_embeddings
from diffmask.errors import ConfigError, DataError, DiffmaskError, IoError, NotNearestNeighbor
from diffmask.formats import (
    corpus_vocabulary,
    read_attention,
    read_meta,
    read_plans,
    read_seeds,
    read_spans,
    read_vocab,
    write_json,
    write_masked,
    write_plans,
    write_seeds,
)
from diffmask.masker import (
    Replacement,
    Strategy,
    StrategyConfig,
    apply_plan,
    plan_document,
)
from diffmask.tficf import count_corpus, load_stopwords, select_seeds, tficf_scores

logger = logging.getLogger("diffmask")

EXIT_OK, EXIT_CONFIG, EXIT_IO, EXIT_DATA = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def default_workers() -> int:
    env = os.environ.get("DIFFMASK_WORKERS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            logger.warning("ignoring non-integer DIFFMASK_WORKERS=%r", env)
    return os.cpu_count() or 1


def _meta(stage: str, cfg: RunConfig) -> dict:
    return {"tool": "diffmask", "version": __version__, "stage": stage, "config": cfg.provenance()}


def _require(cfg: RunConfig, *names):
    missing = [n for n in names if getattr(cfg, n) is None]
    if missing:
        raise ConfigError([f"missing required setting --{n.replace('_', '-')}" for n in missing])


class Reporter:
    def __init__(self, quiet: bool):
        self.quiet = quiet

    def __call__(self, stage: str, message: str):
        if not self.quiet:
            print(f"[{stage}] {message}", flush=True)


# stages

def stage_seeds(cfg: RunConfig, out_path, report, documents=None):
    _require(cfg, "background", "embeddings")
    if documents is None:
        _require(cfg, "corpus")
        documents = load_corpus(cfg.corpus)
    background = load_background(cfg.background, cfg.floor_count)
    store = load_embeddings(cfg.embeddings)
    stopwords = load_stopwords(cfg.stopwords) if cfg.stopwords else None
    scores = tficf_scores(count_corpus(documents), background)
    diffset = select_seeds(scores, cfg.k, store, stopwords, cfg.min_count)
    write_seeds(out_path, scores, diffset, _meta("seeds", cfg))
    report("seeds", f"{len(scores)} words scored, k={diffset.k}: {' '.join(diffset.words)}")
    return diffset, store


# worker state for the plan stage; set once per process by the initializer
_WORKER = {}


def _init_worker(state):
    _WORKER.clear()
    _WORKER.update(state)


def _plan_one(doc):
    s = _WORKER
    return plan_document(
        doc,
        s["config"],
        s["diffset"],
        s["store"],
        s["attention"].get(doc.id) if s["attention"] is not None else None,
        s["spans"].get(doc.id, ()) if s["spans"] is not None else None,
    )


def plan_documents(documents, state, workers: int):
    """Plan every document; output order follows input order for any worker count."""
    if workers <= 1 or len(documents) < 2:
        _init_worker(state)
        return [_plan_one(d) for d in documents]
    chunk = max(1, len(documents) // (workers * 4))
    with ProcessPoolExecutor(workers, initializer=_init_worker, initargs=(state,)) as ex:
        return list(ex.map(_plan_one, documents, chunksize=chunk))


def stage_plan(cfg: RunConfig, out_path, report, workers, documents=None, diffset=None, store=None):
    if documents is None:
        _require(cfg, "corpus")
        documents = load_corpus(cfg.corpus)
    strategy = cfg.strategy
    if strategy in (Strategy.DIFFERENCE_NN, Strategy.DIFFERENCE_CENTROID):
        if diffset is None:
            _require(cfg, "seeds")
            diffset = read_seeds(cfg.seeds)
        if store is None and cfg.embeddings is not None:
            store = load_embeddings(cfg.embeddings)
        if store is None and not all(d.has_vectors for d in documents):
            raise ConfigError("--embeddings is required for documents without inline vectors")
    attention = spans = None
    if strategy is Strategy.ATTENTION:
        _require(cfg, "attention")
        attention = read_attention(cfg.attention)
        missing = [d.id for d in documents if d.id not in attention]
        if missing:
            raise DataError(f"no attention scores for document(s) {missing[:5]}")
    if strategy is Strategy.ENTITY:
        spans = read_spans(cfg.spans) if cfg.spans else {}
    scfg = StrategyConfig(
        strategy, cfg.ratio, cfg.clamp_epsilon, cfg.rng_seed, cfg.group_aggregation, cfg.replacement
    )
    state = {
        "config": scfg,
        "diffset": diffset,
        "store": store,
        "attention": attention,
        "spans": spans,
    }
    results = plan_documents(documents, state, workers)
    meta = _meta("plan", cfg)
    if diffset is not None:
        meta["seeds"] = diffset.words
    write_plans(out_path, results, meta)
    n_tok = sum(len(p.masked_token_indices) for _, p in results)
    n_all = sum(len(d) for d in documents)
    report("plan", f"{len(results)} documents, {n_tok}/{n_all} tokens masked ({strategy.value})")
    return results, diffset


def stage_apply(cfg: RunConfig, out_path, report, documents=None, plans=None):
    if documents is None:
        _require(cfg, "corpus")
        documents = load_corpus(cfg.corpus)
    if plans is None:
        _require(cfg, "plans")
        plans = [p for _, p in read_plans(cfg.plans)]
    by_id = {d.id: d for d in documents}
    vocab = ()
    if cfg.replacement is Replacement.RANDOM_TOKEN:
        vocab = read_vocab(cfg.vocab) if cfg.vocab else corpus_vocabulary(documents)
    rows = []
    for plan in plans:
        doc = by_id.get(plan.doc_id)
        if doc is None:
            raise DataError(f"plan references unknown document {plan.doc_id!r}")
        plan = replace(plan, replacement=cfg.replacement)
        rows.append((doc.id, apply_plan(doc, plan, vocab), plan.masked_token_indices))
    write_masked(out_path, rows, _meta("apply", cfg))
    report("apply", f"{len(rows)} documents written ({cfg.replacement.value})")
    return rows


def _format_table(title, entries, top):
    lines = [title]
    width = max([len(w) for w, _ in entries[:top]] + [4])
    for rank, (w, c) in enumerate(entries[:top], 1):
        lines.append(f"{rank:>4}  {w:<{width}}  {c}")
    if not entries:
        lines.append("   (none)")
    return lines


def stage_stats(
    cfg: RunConfig, out_dir, report, documents=None, results=None, diffset=None, seed_words=None
):
    if documents is None:
        _require(cfg, "corpus")
        documents = load_corpus(cfg.corpus)
    if results is None:
        _require(cfg, "plans")
        results = read_plans(cfg.plans)
        seed_words = read_meta(cfg.plans).get("seeds")
    plans = [p for _, p in results]
    dists = [d for d, _ in results]
    if cfg.dists is not None:
        dists = [d for d, _ in read_plans(cfg.dists)]
    if diffset is None and cfg.seeds is not None:
        diffset = read_seeds(cfg.seeds)
    if diffset is not None:
        seed_words = diffset.words

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    meta = _meta("stats", cfg)
    lines = [f"# diffmask {__version__} stats"]

    hist = masked_word_histogram(plans, documents)
    write_json(
        out_dir / "masked_words.json",
        {
            "meta": meta,
            "total_masked": hist.total,
            "entries": [{"word": w, "count": c} for w, c in hist.entries],
        },
    )
    lines += _format_table(f"most frequently masked words (total {hist.total})", hist.entries, cfg.top)
    summary = [f"{hist.total} masked tokens"]

    usage = None
    if seed_words:
        try:
            usage = chosen_seed_histogram(dists, plans, seed_words)
        except NotNearestNeighbor:
            usage = None
    if usage is not None:
        write_json(
            out_dir / "seed_usage.json",
            {
                "meta": meta,
                "total": usage.total,
                "entries": [{"seed": w, "times_chosen": c} for w, c in usage.entries],
            },
        )
        lines.append("")
        lines += _format_table("seeds chosen as nearest neighbour of a masked token", usage.entries, cfg.top)
        summary.append(f"{len(usage.entries)} seeds used")

    if diffset is not None:
        var = seed_embedding_variance(diffset)
        write_json(out_dir / "variance.json", {"meta": meta, "k": var.k, "variance": var.variance})
        lines += ["", f"seed embedding variance (k={var.k}): {var.variance!r}"]
        summary.append(f"variance {var.variance:.6g}")

    if cfg.label is not None:
        frac = masked_group_label_fraction(plans, documents, cfg.label)
        write_json(
            out_dir / "label_fraction.json", {"meta": meta, "label": cfg.label, "fraction": frac}
        )
        lines += ["", f"fraction of masked tokens in groups labeled {cfg.label!r}: {frac!r}"]
        summary.append(f"label {cfg.label!r} fraction {frac:.4f}")

    (out_dir / "report.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
    report("stats", ", ".join(summary))


def run_pipeline(cfg: RunConfig, workers: int = 1, quiet: bool = False) -> int:
    """seeds -> plan -> apply -> stats, all artifacts under ``cfg.out``."""
    _require(cfg, "corpus", "out")
    report = Reporter(quiet)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    documents = load_corpus(cfg.corpus)
    report("load", f"{len(documents)} documents, {sum(len(d) for d in documents)} tokens")
    diffset = store = None
    if cfg.strategy in (Strategy.DIFFERENCE_NN, Strategy.DIFFERENCE_CENTROID):
        diffset, store = stage_seeds(cfg, out / "seeds.json", report, documents)
    results, diffset = stage_plan(cfg, out / "plans.jsonl", report, workers, documents, diffset, store)
    stage_apply(cfg, out / "masked.jsonl", report, documents, [p for _, p in results])
    stage_stats(cfg, out / "stats", report, documents, results, diffset)
    return EXIT_OK


# argument parsing

def _global_flags(p, suppress):
    d = argparse.SUPPRESS if suppress else None
    p.add_argument("--config", default=d, help="key=value configuration file")
    p.add_argument("--quiet", action="store_true", default=argparse.SUPPRESS if suppress else False)
    p.add_argument(
        "--workers", type=int, default=d, help="worker processes (default: $DIFFMASK_WORKERS or all cores)"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="diffmask", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"diffmask {__version__}")
    _global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def flag(p, name, **kw):
        p.add_argument(f"--{name}", dest=name.replace("-", "_"), default=None, **kw)

    seeds = sub.add_parser("seeds", help="score words with TF-ICF and pick the seed words")
    plan = sub.add_parser("plan", help="compute mask distributions and sample mask plans")
    apply_ = sub.add_parser("apply", help="write masked token sequences for a plan file")
    stats = sub.add_parser("stats", help="masked-word, seed-usage, variance and label reports")
    pipe = sub.add_parser("pipeline", help="run seeds, plan, apply and stats in order")
    for p in (seeds, plan, apply_, stats, pipe):
        _global_flags(p, suppress=True)
        flag(p, "corpus", help="plaintext (one doc per line) or .jsonl pretokenized corpus")
        flag(p, "out", help="output file (seeds, plan, apply) or directory (stats, pipeline)")
    for p in (seeds, pipe):
        flag(p, "background", help="word<TAB>count background table")
        flag(p, "k", type=int, help="number of seed words (default 20)")
        flag(p, "min-count", type=int, help="minimum corpus count for a seed (default 5)")
        flag(p, "stopwords", help="stopword list, one per line")
        flag(p, "floor-count", type=int, help="count assumed for words absent from the background (default 1)")
    for p in (seeds, plan, pipe):
        flag(p, "embeddings", help="word vectors in text format")
    for p in (plan, stats):
        flag(p, "seeds", help="seeds JSON written by 'diffmask seeds'")
    for p in (plan, pipe):
        flag(p, "strategy", help="difference_nn | difference_centroid | random | attention | entity")
        flag(p, "ratio", type=float, help="masking ratio (default 0.25)")
        flag(p, "rng-seed", type=int, help="global random seed (default 0)")
        flag(p, "clamp-epsilon", type=float, help="floor for raw similarity scores (default 1e-6)")
        flag(p, "attention", help="JSONL of per-document attention scores")
        flag(p, "spans", help="JSONL of per-document entity spans")
        flag(p, "group-aggregation", help="max | mean over group members (default max)")
    for p in (apply_, pipe):
        flag(p, "replacement", help="sentinel | random-token (default sentinel)")
        flag(p, "vocab", help="replacement vocabulary, one word per line")
    flag(apply_, "plan", help="plan JSONL written by 'diffmask plan'")
    flag(stats, "plans", help="plan JSONL written by 'diffmask plan'")
    flag(stats, "dists", help="JSONL with distributions (defaults to the plan file)")
    for p in (stats, pipe):
        flag(p, "label", help="group label for the masked-fraction report")
        flag(p, "top", type=int, help="rows per report table (default 40)")
    return parser


_NON_CONFIG = {"command", "config", "quiet", "workers"}


def main(argv: Optional[list] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    quiet = bool(getattr(args, "quiet", False))
    logging.basicConfig(
        level=logging.ERROR if quiet else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    flags = {k: v for k, v in vars(args).items() if k not in _NON_CONFIG}
    if "plan" in flags:
        flags["plans"] = flags.pop("plan")
    workers = args.workers if getattr(args, "workers", None) else default_workers()
    report = Reporter(quiet)
    try:
        cfg = resolve_config(getattr(args, "config", None), flags)
        if args.command == "pipeline":
            return run_pipeline(cfg, workers, quiet)
        _require(cfg, "out")
        if args.command == "seeds":
            stage_seeds(cfg, cfg.out, report)
        elif args.command == "plan":
            stage_plan(cfg, cfg.out, report, workers)
        elif args.command == "apply":
            stage_apply(cfg, cfg.out, report)
        elif args.command == "stats":
            stage_stats(cfg, cfg.out, report)
        return EXIT_OK
    except ConfigError as exc:
        print(f"diffmask: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (IoError, OSError) as exc:
        print(f"diffmask: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (DiffmaskError, ValueError) as exc:
        print(f"diffmask: data error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
