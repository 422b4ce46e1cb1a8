"""Scoring engine for image reconstruction evaluation.

Compares (reconstruction, reference) image pairs through two complementary
lenses: BASIC-H, a weighted F1 over matched objects, attributes, and
relations extracted from captions, and BASIC-L, a weighted IoU over
multigranular segmentation masks (foreground, binary, semantic, instance,
part). BASIC is the mean of the two.
"""

from .datamodel import (
    EvalConfig,
    GranularityAnnotation,
    MaskSet,
    PairRecord,
    SemanticGraph,
    annotation_to_prompt_labels,
    load_annotation,
    load_config,
    load_graph,
    load_manifest,
    load_masks,
    normalize_term,
)
from .evaluate import PairScores, evaluate_pair, evaluate_records
from .maskmatch import GranularityScores, basic_l, iou, score_mask_sets
from .report import MethodSummary, aggregate, kendall_tau, render, summarize, sweep
from .semmatch import (
    EmbeddingTable,
    MatchReport,
    SynonymLexicon,
    basic_h,
    embed_term,
    match_graphs,
    match_terms,
    max_weight_assignment,
    prf,
)

__all__ = [
    "EvalConfig",
    "EmbeddingTable",
    "GranularityAnnotation",
    "GranularityScores",
    "MaskSet",
    "MatchReport",
    "MethodSummary",
    "PairRecord",
    "PairScores",
    "SemanticGraph",
    "SynonymLexicon",
    "aggregate",
    "annotation_to_prompt_labels",
    "basic_h",
    "basic_l",
    "embed_term",
    "evaluate_pair",
    "evaluate_records",
    "iou",
    "kendall_tau",
    "load_annotation",
    "load_config",
    "load_graph",
    "load_manifest",
    "load_masks",
    "match_graphs",
    "match_terms",
    "max_weight_assignment",
    "normalize_term",
    "prf",
    "render",
    "score_mask_sets",
    "summarize",
    "sweep",
]

__version__ = "0.1.0"
