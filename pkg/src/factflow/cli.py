"""Command-line entry point.

Subcommands: build-sim (materialize the similarity cache), similar (inspect
nearest relations), check (score one claim), evaluate (AUROC over a labeled
dataset), patterns (mine discriminative path shapes). Standard output
carries only data; diagnostics and the echoed configuration go to stderr.
Exit codes: 0 success, 1 internal error, 2 bad input.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .errors import (
    FactflowError,
    GraphFormatError,
    InternalInvariantError,
    UnknownEntityError,
)
from .evaluate import (
    METHOD_NAMES,
    EvalOptions,
    evaluate_dataset,
    load_dataset,
    mine_patterns,
    render_path,
    render_signature,
    results_csv,
    score_claim,
)
from .export import evidence_document, to_dot, to_json, to_tsv
from .flow import StreamConfig, knowledge_stream
from .graph import KnowledgeGraph, load_graph_files
from .relsim import SimilarityModel, build_model, load_model, save_model

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_BAD_INPUT = 2


@dataclass
class RunConfig:
    """Resolved settings for one invocation; echoed to stderr for
    reproducibility."""

    graphs: list[str]
    format: str = "tsv"
    cache: str | None = None
    mode: str = "ks"
    emit: str = "json"
    k: int | None = None
    max_paths: int | None = None
    max_hops: int | None = None
    time_budget_s: float | None = None
    decompose: bool = False
    katz_beta: float = 0.05
    katz_max_len: int = 3
    folds: int = 5
    seed: int = 0
    workers: int = 1
    timing: bool = False

    def stream_config(self) -> StreamConfig:
        return StreamConfig(
            max_paths=self.max_paths,
            max_hops=self.max_hops,
            time_budget_s=self.time_budget_s,
            decompose=self.decompose,
        )

    def eval_options(self) -> EvalOptions:
        return EvalOptions(
            stream=self.stream_config(),
            ks_avg_k=self.k if self.k is not None else 2,
            folds=self.folds,
            katz_beta=self.katz_beta,
            katz_max_len=self.katz_max_len,
            seed=self.seed,
            workers=self.workers,
            timing=self.timing,
        )


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--graph",
        action="append",
        required=True,
        metavar="PATH",
        help="triple file; repeat to merge several files",
    )
    parser.add_argument(
        "--format", choices=("tsv", "nt"), default="tsv", help="triple file format"
    )
    parser.add_argument(
        "--cache", metavar="PATH", help="similarity cache file (built when missing)"
    )
    parser.add_argument("--seed", type=int, default=0, help="rng seed")
    parser.add_argument(
        "--workers", type=int, default=1, help="parallel claim-scoring processes"
    )


def _add_stream_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--max-paths", type=int, help="stop after this many paths")
    parser.add_argument("--max-hops", type=int, help="stop at paths longer than this")
    parser.add_argument(
        "--time-budget", type=float, dest="time_budget", help="seconds per claim"
    )
    parser.add_argument(
        "--decompose",
        action="store_true",
        help="always derive evidence by decomposing the terminal flow",
    )
    parser.add_argument("--katz-beta", type=float, default=0.05)
    parser.add_argument("--katz-maxlen", type=int, default=3)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="factflow",
        description="Score (subject, predicate, object) claims against a knowledge graph.",
    )
    parser.add_argument("--version", action="version", version=f"factflow {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build-sim", help="build and cache the relational similarity model")
    _add_common(p)

    p = sub.add_parser("similar", help="print the most similar relations")
    _add_common(p)
    p.add_argument("--relation", required=True, help="relation label to query")
    p.add_argument("--top-k", type=int, default=20, dest="top_k")

    p = sub.add_parser("check", help="score a single claim")
    _add_common(p)
    _add_stream_flags(p)
    p.add_argument(
        "--claim",
        required=True,
        help="claim as subject<TAB>predicate<TAB>object (literal tab or \\t)",
    )
    p.add_argument(
        "--mode",
        choices=("ks", "ks-avg", "kl", "kl-rel", "katz", "aa", "jaccard", "dp"),
        default="ks",
    )
    p.add_argument("--k", type=int, help="paths summed by ks-avg (default 2)")
    p.add_argument("--emit", choices=("json", "dot", "tsv"), default="json")

    p = sub.add_parser("evaluate", help="AUROC per method over a labeled dataset")
    _add_common(p)
    _add_stream_flags(p)
    p.add_argument("--dataset", required=True, help="s/p/o/label TSV")
    p.add_argument(
        "--methods",
        default="all",
        help=f"comma list from {','.join(METHOD_NAMES)} or 'all'",
    )
    p.add_argument("--folds", type=int, default=5, help="folds for ks-cv")
    p.add_argument("--out", help="write CSV here instead of stdout")
    p.add_argument(
        "--timing", action="store_true", help="fill runtime_ms (breaks byte determinism)"
    )

    p = sub.add_parser("patterns", help="mine discriminative path patterns")
    _add_common(p)
    _add_stream_flags(p)
    p.add_argument("--dataset", required=True)
    p.add_argument("--relation", required=True, help="relation label to mine")
    p.add_argument("--out", help="write TSV here instead of stdout")
    return parser


def _config_from_args(args) -> RunConfig:
    cfg = RunConfig(graphs=list(args.graph), format=args.format, cache=args.cache)
    cfg.seed = args.seed
    cfg.workers = args.workers
    for name, attr in (
        ("mode", "mode"),
        ("emit", "emit"),
        ("k", "k"),
        ("max_paths", "max_paths"),
        ("max_hops", "max_hops"),
        ("time_budget", "time_budget_s"),
        ("decompose", "decompose"),
        ("katz_beta", "katz_beta"),
        ("katz_maxlen", "katz_max_len"),
        ("folds", "folds"),
        ("timing", "timing"),
    ):
        if hasattr(args, name):
            setattr(cfg, attr, getattr(args, name))
    return cfg


def _load_graph(cfg: RunConfig) -> KnowledgeGraph:
    return load_graph_files(cfg.graphs, cfg.format)


def _ensure_model(cfg: RunConfig, graph: KnowledgeGraph) -> SimilarityModel:
    path = cfg.cache
    if path is None:
        return build_model(graph)
    if Path(path).exists():
        model = load_model(path, graph)
        if model is not None:
            return model
        print(f"cache {path} does not match the graph; rebuilding", file=sys.stderr)
    model = build_model(graph)
    save_model(model, path, graph)
    return model


def _parse_claim_text(text: str) -> tuple[str, str, str]:
    parts = text.split("\t")
    if len(parts) != 3:
        parts = text.split("\\t")
    if len(parts) != 3:
        raise FactflowError("claim must have three tab-separated fields")
    return parts[0], parts[1], parts[2]


def cmd_build_sim(cfg: RunConfig) -> int:
    graph = _load_graph(cfg)
    model = build_model(graph)
    cache = cfg.cache or (cfg.graphs[0] + ".relsim.bin")
    save_model(model, cache, graph)
    print(f"relations={model.num_relations}\tnonzero_pairs={model.nonzero_pairs()}\tcache={cache}")
    return EXIT_OK


def cmd_similar(cfg: RunConfig, relation: str, top_k: int) -> int:
    graph = _load_graph(cfg)
    model = _ensure_model(cfg, graph)
    rid = graph.relation_id(relation)
    for rank, (other, value) in enumerate(model.top_k_similar(rid, top_k), start=1):
        print(f"{rank}\t{graph.relation_labels[other]}\t{value:.6f}")
    return EXIT_OK


def cmd_check(cfg: RunConfig, claim_text: str) -> int:
    graph = _load_graph(cfg)
    s, p, o = _parse_claim_text(claim_text)
    claim = graph.claim(s, p, o)
    opts = cfg.eval_options()
    model = None
    if cfg.mode in ("ks", "ks-avg", "kl-rel"):
        model = _ensure_model(cfg, graph)
    result = score_claim(graph, model, claim, cfg.mode, opts)
    if cfg.emit == "tsv":
        sys.stdout.write(to_tsv(graph, claim, cfg.mode, result.score))
    elif cfg.emit == "dot":
        paths = result.stream.paths if result.stream else (
            [result.path] if result.path else []
        )
        sys.stdout.write(to_dot(graph, claim, paths))
    else:
        doc = evidence_document(
            graph, claim, cfg.mode, result.score, result.stream, result.path
        )
        sys.stdout.write(to_json(doc) + "\n")
    return EXIT_OK


def cmd_evaluate(cfg: RunConfig, dataset_path: str, methods_text: str, out: str | None) -> int:
    graph = _load_graph(cfg)
    methods = (
        list(METHOD_NAMES) if methods_text == "all" else methods_text.split(",")
    )
    model = None
    if any(m in ("ks", "ks-avg", "ks-cv", "kl-rel") for m in methods):
        model = _ensure_model(cfg, graph)
    claims, skipped = load_dataset(dataset_path, graph)
    if skipped:
        print(f"skipped {skipped} claims not resolvable in the graph", file=sys.stderr)
    results = evaluate_dataset(graph, model, claims, methods, cfg.eval_options())
    text = results_csv(results, Path(dataset_path).stem)
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_patterns(cfg: RunConfig, dataset_path: str, relation: str, out: str | None) -> int:
    graph = _load_graph(cfg)
    model = _ensure_model(cfg, graph)
    rid = graph.relation_id(relation)
    claims, skipped = load_dataset(dataset_path, graph)
    if skipped:
        print(f"skipped {skipped} claims not resolvable in the graph", file=sys.stderr)
    subset = [lc for lc in claims if lc.claim.predicate == rid]
    stream_cfg = cfg.stream_config()
    streams = [knowledge_stream(graph, model, lc.claim, stream_cfg) for lc in subset]
    report = mine_patterns(
        [lc.claim for lc in subset], streams, [lc.label for lc in subset], rid
    )
    lines = []
    for rank, entry in enumerate(report.entries, start=1):
        lines.append(
            f"{rank}\t{render_signature(graph, entry.signature)}"
            f"\t{entry.frequency}\t{render_path(graph, entry.example)}"
        )
    text = "\n".join(lines) + ("\n" if lines else "")
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    cfg = _config_from_args(args)
    print(f"config: {cfg}", file=sys.stderr)
    try:
        if args.command == "build-sim":
            return cmd_build_sim(cfg)
        if args.command == "similar":
            return cmd_similar(cfg, args.relation, args.top_k)
        if args.command == "check":
            return cmd_check(cfg, args.claim)
        if args.command == "evaluate":
            return cmd_evaluate(cfg, args.dataset, args.methods, args.out)
        if args.command == "patterns":
            return cmd_patterns(cfg, args.dataset, args.relation, args.out)
        parser.error(f"unknown command {args.command}")
    except InternalInvariantError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except (UnknownEntityError, GraphFormatError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except FactflowError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
