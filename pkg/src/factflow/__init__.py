"""factflow: fact checking of (subject, predicate, object) claims against a
knowledge graph.

The graph is treated as a flow network: each edge gets a capacity from the
relational similarity between its label and the claim predicate, and a cost
from the generality of the node it enters. The claim score is the net flow
carried by the cheapest set of augmenting paths between subject and object.
A relational shortest-path scorer and classic link-prediction baselines are
included for comparison, along with an AUROC evaluation harness and
discriminative path-pattern mining.
"""

from ._kernel import HAVE_COMPILED_KERNEL, KERNEL_IMPLEMENTATION
from .baselines import adamic_adar, degree_product, jaccard, katz
from .errors import (
    FactflowError,
    GraphFormatError,
    InternalInvariantError,
    UnknownEntityError,
)
from .evaluate import (
    EvalOptions,
    LabeledClaim,
    auroc,
    cross_validate_k,
    evaluate_dataset,
    generate_lcwa_negatives,
    load_dataset,
    mine_patterns,
    path_signature,
    score_claim,
)
from .flow import (
    EvidencePath,
    Stream,
    StreamConfig,
    edge_capacity,
    edge_cost,
    integerize_capacities,
    knowledge_stream,
    path_specificity,
    truth_score_topk,
)
from .graph import (
    ClaimTriple,
    GraphMask,
    KnowledgeGraph,
    load_graph,
    load_graph_files,
)
from .linker import LinkerResult, kl_rel_score, kl_score
from .relsim import (
    SimilarityModel,
    build_cooccurrence,
    build_model,
    load_model,
    save_model,
    tfidf_transform,
)

__version__ = "0.1.0"

__all__ = [
    "HAVE_COMPILED_KERNEL",
    "KERNEL_IMPLEMENTATION",
    "ClaimTriple",
    "EvalOptions",
    "EvidencePath",
    "FactflowError",
    "GraphFormatError",
    "GraphMask",
    "InternalInvariantError",
    "KnowledgeGraph",
    "LabeledClaim",
    "LinkerResult",
    "SimilarityModel",
    "Stream",
    "StreamConfig",
    "UnknownEntityError",
    "adamic_adar",
    "auroc",
    "build_cooccurrence",
    "build_model",
    "cross_validate_k",
    "degree_product",
    "edge_capacity",
    "edge_cost",
    "evaluate_dataset",
    "generate_lcwa_negatives",
    "integerize_capacities",
    "jaccard",
    "katz",
    "kl_rel_score",
    "kl_score",
    "knowledge_stream",
    "load_dataset",
    "load_graph",
    "load_graph_files",
    "load_model",
    "mine_patterns",
    "path_signature",
    "path_specificity",
    "save_model",
    "score_claim",
    "tfidf_transform",
    "truth_score_topk",
]
