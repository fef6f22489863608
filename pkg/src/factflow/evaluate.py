"""Dataset handling, negative sampling, ranking metrics, and pattern mining.

Labeled claims are scored by any registered method; AUROC summarizes how
reliably true claims outrank false ones. Negatives can be sampled under a
local closed-world assumption: objects seen with a predicate elsewhere in
the dataset are presumed false for subjects not known to hold them.
"""

from __future__ import annotations

import logging
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from time import perf_counter

import numpy as np

from . import baselines
from .errors import FactflowError, GraphFormatError
from .flow import EvidencePath, Stream, StreamConfig, knowledge_stream, truth_score_topk
from .graph import ClaimTriple, KnowledgeGraph
from .linker import kl_rel_score, kl_score
from .relsim import SimilarityModel

log = logging.getLogger(__name__)

METHOD_NAMES = ("ks", "ks-avg", "ks-cv", "kl", "kl-rel", "katz", "aa", "jaccard", "dp")

_TRUE_LABELS = {"1", "true"}
_FALSE_LABELS = {"0", "false"}


@dataclass(frozen=True)
class LabeledClaim:
    claim: ClaimTriple
    label: bool
    source_tag: str = ""


@dataclass
class EvalOptions:
    """Scoring knobs shared by the CLI and the evaluation driver."""

    stream: StreamConfig = field(default_factory=StreamConfig)
    ks_avg_k: int = 2
    cv_k_grid: tuple[int, ...] = (1, 2, 3, 4, 5, 6, 7, 8)
    folds: int = 5
    katz_beta: float = 0.05
    katz_max_len: int = 3
    seed: int = 0
    workers: int = 1
    timing: bool = False


# -- dataset io --------------------------------------------------------


def load_dataset(path, graph: KnowledgeGraph) -> tuple[list[LabeledClaim], int]:
    """Read `s<TAB>p<TAB>o<TAB>label` rows; labels are 0/1/true/false.

    Claims that do not resolve in the graph are reported and skipped; the
    skip count is returned alongside the parsed list. Malformed rows raise
    with their line number; a file with no rows at all is an error.
    """
    claims: list[LabeledClaim] = []
    skipped = 0
    rows = 0
    tag = Path(path).stem if isinstance(path, (str, Path)) else ""
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n").rstrip("\r")
            if not line.strip() or line.startswith("#"):
                continue
            rows += 1
            fields = line.split("\t")
            if len(fields) != 4:
                raise GraphFormatError(
                    line_no, f"expected 4 tab-separated fields, got {len(fields)}"
                )
            s, p, o, label_text = (f.strip() for f in fields)
            lowered = label_text.lower()
            if lowered in _TRUE_LABELS:
                label = True
            elif lowered in _FALSE_LABELS:
                label = False
            else:
                raise GraphFormatError(line_no, f"bad label {label_text!r}")
            if not (graph.has_node(s) and graph.has_node(o)):
                log.warning("line %d: skipping claim with unknown entity", line_no)
                skipped += 1
                continue
            try:
                graph.relation_id(p)
            except FactflowError:
                log.warning("line %d: skipping claim with unknown relation", line_no)
                skipped += 1
                continue
            claims.append(LabeledClaim(graph.claim(s, p, o), label, tag))
    if rows == 0:
        raise FactflowError(f"dataset {path} contains no claims")
    return claims, skipped


def write_dataset(claims, path, graph: KnowledgeGraph) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for lc in claims:
            s, p, o = graph.claim_labels(lc.claim)
            fh.write(f"{s}\t{p}\t{o}\t{1 if lc.label else 0}\n")


# -- negative sampling -------------------------------------------------


def generate_lcwa_negatives(
    true_claims,
    n_per_positive: int,
    rng_seed: int,
    graph: KnowledgeGraph | None = None,
    pool: str = "dataset",
) -> list[LabeledClaim]:
    """Sample false claims by swapping objects the subject is not known to hold.

    For each true (s, p, o) the candidate objects are those appearing with p
    across the dataset (pool="dataset", default) or as the object of any
    p-labeled edge in the graph (pool="graph"), minus the objects already
    true for (s, p) and s itself. Deterministic under rng_seed; claims with
    an empty pool are skipped with a warning.
    """
    if pool not in ("dataset", "graph"):
        raise ValueError("pool must be 'dataset' or 'graph'")
    if pool == "graph" and graph is None:
        raise ValueError("pool='graph' requires the graph")
    objects_by_pred: dict[int, set[int]] = {}
    true_objects: dict[tuple[int, int], set[int]] = {}
    for lc in true_claims:
        c = lc.claim
        objects_by_pred.setdefault(c.predicate, set()).add(c.object)
        true_objects.setdefault((c.subject, c.predicate), set()).add(c.object)
    if pool == "graph":
        objects_by_pred = {}
        for a, b, r in graph.edges:
            objects_by_pred.setdefault(r, set()).add(b)
    rng = random.Random(rng_seed)
    out: list[LabeledClaim] = []
    if n_per_positive == 0:
        return out
    for lc in true_claims:
        c = lc.claim
        candidates = sorted(
            objects_by_pred.get(c.predicate, set())
            - true_objects[(c.subject, c.predicate)]
            - {c.subject}
        )
        if not candidates:
            log.warning(
                "no closed-world alternatives for claim subject %d; skipped",
                c.subject,
            )
            continue
        take = min(n_per_positive, len(candidates))
        for obj in rng.sample(candidates, take):
            out.append(
                LabeledClaim(
                    ClaimTriple(c.subject, c.predicate, obj), False, "lcwa"
                )
            )
    return out


# -- ranking metric ----------------------------------------------------


def auroc(scores, labels) -> float:
    """Probability that a true claim outscores a false one, ties at half.

    Computed from midranks (equivalent to the normalized Mann-Whitney U
    statistic). Raises when only one class is present.
    """
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels, dtype=bool)
    if scores.shape != labels.shape:
        raise ValueError("scores and labels must have equal length")
    n_pos = int(labels.sum())
    n_neg = labels.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("AUROC needs both classes present")
    order = np.argsort(scores, kind="mergesort")
    ranks = np.empty(scores.size, dtype=np.float64)
    sorted_scores = scores[order]
    i = 0
    while i < scores.size:
        j = i
        while j + 1 < scores.size and sorted_scores[j + 1] == sorted_scores[i]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    u = float(ranks[labels].sum()) - n_pos * (n_pos + 1) / 2.0
    return u / (n_pos * n_neg)


# -- relational pattern mining ------------------------------------------

Signature = tuple[tuple[int, bool], ...]


def path_signature(path: EvidencePath) -> Signature:
    """Abstract a path to its relation sequence with inverse-orientation flags."""
    return tuple((rel, direction == "inverse") for _eid, rel, direction in path.edges)


def render_signature(graph: KnowledgeGraph, sig: Signature) -> str:
    parts = []
    for rel, inverse in sig:
        label = graph.relation_labels[rel]
        parts.append(f"{label}^-1" if inverse else label)
    return ",".join(parts)


def render_path(graph: KnowledgeGraph, path: EvidencePath) -> str:
    text = graph.node_labels[path.nodes[0]]
    for (eid, rel, direction), node in zip(path.edges, path.nodes[1:]):
        label = graph.relation_labels[rel]
        arrow = f" -[{label}]-> " if direction == "forward" else f" <-[{label}]- "
        text += arrow + graph.node_labels[node]
    return text


@dataclass
class PatternEntry:
    signature: Signature
    frequency: int
    example: EvidencePath


@dataclass
class PatternReport:
    relation: int
    entries: list[PatternEntry]


def mine_patterns(claims, streams, labels, relation: int, graph=None) -> PatternReport:
    """Rank path signatures that appear in true-claim evidence but never in
    false-claim evidence, by frequency (ties: signature text order).

    Claims with a different predicate are ignored; an input with no true
    claims yields an empty report.
    """
    true_counts: dict[Signature, int] = {}
    examples: dict[Signature, EvidencePath] = {}
    false_sigs: set[Signature] = set()
    for claim, stream, label in zip(claims, streams, labels):
        if claim.predicate != relation:
            continue
        for path in stream.paths:
            sig = path_signature(path)
            if label:
                true_counts[sig] = true_counts.get(sig, 0) + 1
                examples.setdefault(sig, path)
            else:
                false_sigs.add(sig)
    kept = [
        PatternEntry(sig, freq, examples[sig])
        for sig, freq in true_counts.items()
        if sig not in false_sigs
    ]
    kept.sort(key=lambda e: (-e.frequency, e.signature))
    return PatternReport(relation=relation, entries=kept)


# -- top-k cross-validation ---------------------------------------------


@dataclass
class CrossValResult:
    best_k: int
    fold_aurocs: dict[int, list[float]]

    def mean(self, k: int) -> float:
        return float(np.mean(self.fold_aurocs[k]))


def stratified_folds(labels, folds: int, seed: int) -> list[list[int]]:
    """Deterministic stratified index folds (shuffle within class, deal
    round-robin)."""
    if folds < 2:
        raise ValueError("folds must be >= 2")
    if folds > len(labels):
        raise ValueError("more folds than claims")
    rng = random.Random(seed)
    pos = [i for i, lab in enumerate(labels) if lab]
    neg = [i for i, lab in enumerate(labels) if not lab]
    rng.shuffle(pos)
    rng.shuffle(neg)
    out = []
    for f in range(folds):
        fold = sorted(pos[f::folds] + neg[f::folds])
        out.append(fold)
    return out


def cross_validate_k(
    labeled_claims, streams, folds: int, k_grid, seed: int = 0
) -> CrossValResult:
    """Pick the number of evidence paths that maximizes mean validation AUROC.

    Scores are the running top-k net-flow sums, so no refitting happens per
    fold; ties prefer the smaller k. Every fold must contain both classes.
    """
    labels = [lc.label for lc in labeled_claims]
    fold_indices = stratified_folds(labels, folds, seed)
    for fold in fold_indices:
        fold_labels = {labels[i] for i in fold}
        if fold_labels != {True, False}:
            raise ValueError("a fold lacks one of the classes; use fewer folds")
    fold_aurocs: dict[int, list[float]] = {}
    for k in k_grid:
        per_fold = []
        for fold in fold_indices:
            scores = [truth_score_topk(streams[i], k) for i in fold]
            per_fold.append(auroc(scores, [labels[i] for i in fold]))
        fold_aurocs[k] = per_fold
    best_k = min(fold_aurocs, key=lambda k: (-float(np.mean(fold_aurocs[k])), k))
    return CrossValResult(best_k=best_k, fold_aurocs=fold_aurocs)


# -- per-claim scoring dispatch ------------------------------------------


@dataclass
class ClaimScore:
    method: str
    score: float
    stream: Stream | None = None
    path: EvidencePath | None = None


def score_claim(
    graph: KnowledgeGraph,
    model: SimilarityModel,
    claim: ClaimTriple,
    method: str,
    opts: EvalOptions,
    stream: Stream | None = None,
) -> ClaimScore:
    """Score one claim with one method; pass a precomputed stream to avoid
    re-solving for the flow-based variants."""
    if method in ("ks", "ks-avg"):
        if stream is None:
            stream = knowledge_stream(graph, model, claim, opts.stream)
        if method == "ks":
            return ClaimScore(method, stream.truth_score, stream=stream)
        return ClaimScore(
            method, truth_score_topk(stream, opts.ks_avg_k), stream=stream
        )
    if method == "kl":
        res = kl_score(graph, claim)
        return ClaimScore(method, res.score, path=res.path)
    if method == "kl-rel":
        res = kl_rel_score(graph, model, claim)
        return ClaimScore(method, res.score, path=res.path)
    mask = graph.mask_claim_edges(claim)
    if method == "katz":
        value = baselines.katz(
            graph, claim.subject, claim.object, opts.katz_beta, opts.katz_max_len, mask
        )
    elif method == "aa":
        value = baselines.adamic_adar(graph, claim.subject, claim.object, mask)
    elif method == "jaccard":
        value = baselines.jaccard(graph, claim.subject, claim.object, mask)
    elif method == "dp":
        value = baselines.degree_product(graph, claim.subject, claim.object)
    else:
        raise ValueError(f"unknown method {method!r}")
    return ClaimScore(method, value)


# -- whole-dataset evaluation --------------------------------------------

_WORKER: dict = {}


def _init_worker(graph, model, opts):
    _WORKER["graph"] = graph
    _WORKER["model"] = model
    _WORKER["opts"] = opts


def _score_one(args):
    index, claim, methods, need_stream = args
    graph, model, opts = _WORKER["graph"], _WORKER["model"], _WORKER["opts"]
    timings: dict[str, float] = {}
    stream = None
    if need_stream:
        t0 = perf_counter()
        stream = knowledge_stream(graph, model, claim, opts.stream)
        timings["_stream"] = perf_counter() - t0
    scores: dict[str, float] = {}
    for method in methods:
        t0 = perf_counter()
        scores[method] = score_claim(graph, model, claim, method, opts, stream).score
        timings[method] = perf_counter() - t0
    weights = [p.net_flow for p in stream.paths] if stream is not None else None
    return index, scores, weights, timings


@dataclass
class MethodResult:
    method: str
    auroc: float
    n_pos: int
    n_neg: int
    runtime_ms: int
    chosen_k: int | None = None


def evaluate_dataset(
    graph: KnowledgeGraph,
    model: SimilarityModel,
    labeled_claims,
    methods,
    opts: EvalOptions,
) -> list[MethodResult]:
    """Score every claim with every requested method and compute per-method
    AUROC. Results come back in the requested method order regardless of the
    parallelism degree; runtimes are reported only when opts.timing is set.
    """
    for m in methods:
        if m not in METHOD_NAMES:
            raise ValueError(f"unknown method {m!r}")
    labels = [lc.label for lc in labeled_claims]
    stream_methods = {"ks", "ks-avg", "ks-cv"}
    need_stream = bool(stream_methods & set(methods))
    direct_methods = [m for m in methods if m not in ("ks-cv",)]
    jobs = [
        (i, lc.claim, direct_methods, need_stream)
        for i, lc in enumerate(labeled_claims)
    ]
    _init_worker(graph, model, opts)
    if opts.workers > 1:
        with ProcessPoolExecutor(
            max_workers=opts.workers,
            initializer=_init_worker,
            initargs=(graph, model, opts),
        ) as pool:
            raw = list(pool.map(_score_one, jobs))
    else:
        raw = [_score_one(job) for job in jobs]
    raw.sort(key=lambda r: r[0])
    per_method_scores: dict[str, list[float]] = {m: [] for m in direct_methods}
    path_weights: list[list[float] | None] = []
    per_method_time: dict[str, float] = {m: 0.0 for m in methods}
    stream_owner = next((m for m in methods if m in stream_methods), None)
    for _idx, scores, weights, timings in raw:
        for m in direct_methods:
            per_method_scores[m].append(scores[m])
        path_weights.append(weights)
        for m, dt in timings.items():
            if m in per_method_time:
                per_method_time[m] += dt
            elif m == "_stream" and stream_owner is not None:
                per_method_time[stream_owner] += dt
    n_pos = sum(labels)
    n_neg = len(labels) - n_pos
    results = []
    for m in methods:
        chosen_k = None
        if m == "ks-cv":
            t0 = perf_counter()
            streams = [_weights_as_stream(w) for w in path_weights]
            cv = cross_validate_k(
                labeled_claims, streams, opts.folds, opts.cv_k_grid, opts.seed
            )
            chosen_k = cv.best_k
            scores = [truth_score_topk(s, chosen_k) for s in streams]
            per_method_time[m] += perf_counter() - t0
        else:
            scores = per_method_scores[m]
        value = auroc(scores, labels)
        runtime = int(round(per_method_time[m] * 1000)) if opts.timing else 0
        results.append(MethodResult(m, value, n_pos, n_neg, runtime, chosen_k))
    return results


def _weights_as_stream(weights) -> Stream:
    """Wrap per-path net flows in a skeletal stream for top-k scoring."""
    if weights is None:
        raise FactflowError("flow streams were not computed")
    paths = [
        EvidencePath(nodes=[], edges=[], specificity=1.0, bottleneck=w, net_flow=w)
        for w in weights
    ]
    return Stream(paths=paths, total_flow=0.0, truth_score=float(sum(weights)))


def results_csv(results, dataset_name: str) -> str:
    """Render method results as the canonical CSV (one row per method)."""
    lines = ["method,dataset,auroc,n_pos,n_neg,runtime_ms"]
    for r in results:
        lines.append(
            f"{r.method},{dataset_name},{r.auroc:.6f},{r.n_pos},{r.n_neg},{r.runtime_ms}"
        )
    return "\n".join(lines) + "\n"
