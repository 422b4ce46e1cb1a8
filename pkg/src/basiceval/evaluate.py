"""Per-pair evaluation: load artifacts, match graphs, score masks.

Pure functions of immutable inputs; pairs are independent and may be
evaluated concurrently. Lexicon and embedding tables are cached per path so
worker processes load them once.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

from .datamodel import EvalConfig, PairRecord, load_graph, load_masks
from .maskmatch import GranularityScores, score_mask_sets
from .semmatch import EmbeddingTable, MatchReport, SynonymLexicon, match_graphs


@dataclass(frozen=True)
class PairScores:
    """Scores for one evaluated pair. semantic/structural are None when the
    run was restricted with only="seg"/"sem" respectively."""

    pair_id: str
    method: str
    dataset: str
    semantic: MatchReport | None
    structural: GranularityScores | None

    @property
    def basic_h(self) -> float | None:
        return self.semantic.basic_h if self.semantic else None

    @property
    def basic_l(self) -> float | None:
        return self.structural.basic_l if self.structural else None

    @property
    def basic(self) -> float | None:
        if self.semantic is None or self.structural is None:
            return None
        return (self.semantic.basic_h + self.structural.basic_l) / 2.0


@lru_cache(maxsize=8)
def _load_lexicon(path: str | None) -> SynonymLexicon:
    return SynonymLexicon.load(path) if path else SynonymLexicon.empty()


@lru_cache(maxsize=8)
def _load_embeddings(path: str | None) -> EmbeddingTable:
    return EmbeddingTable.load(path) if path else EmbeddingTable.empty()


def resources_for(cfg: EvalConfig) -> tuple[SynonymLexicon, EmbeddingTable]:
    return _load_lexicon(cfg.lexicon_path), _load_embeddings(cfg.embeddings_path)


def evaluate_pair(record: PairRecord, cfg: EvalConfig, only: str | None = None) -> PairScores:
    """Evaluate one pair; only="sem" skips masks, only="seg" skips graphs."""
    lexicon, embeddings = resources_for(cfg)
    semantic = None
    structural = None
    if only != "seg":
        cand_graph = load_graph(record.candidate_graph)
        ref_graph = load_graph(record.reference_graph)
        semantic = match_graphs(cand_graph, ref_graph, cfg, lexicon, embeddings)
    if only != "sem":
        cand_masks = load_masks(record.candidate_masks)
        ref_masks = load_masks(record.reference_masks)
        structural = score_mask_sets(cand_masks, ref_masks, cfg, lexicon, embeddings)
    return PairScores(
        pair_id=record.pair_id,
        method=record.method,
        dataset=record.dataset,
        semantic=semantic,
        structural=structural,
    )


def _evaluate_task(args: tuple[PairRecord, EvalConfig, str | None]):
    record, cfg, only = args
    try:
        return evaluate_pair(record, cfg, only), None
    except Exception as exc:  # isolated per pair; collected by the caller
        return None, f"{record.pair_id}: {type(exc).__name__}: {exc}"


def evaluate_records(
    records: list[PairRecord],
    cfg: EvalConfig,
    only: str | None = None,
    workers: int = 1,
    strict: bool = False,
) -> tuple[list[PairScores], list[str]]:
    """Evaluate pairs, optionally in parallel. Results are sorted by pair_id
    so output is byte-identical regardless of the worker count. A failing
    pair never affects the others; failures come back as messages unless
    strict is set, in which case the first one is raised."""
    tasks = [(r, cfg, only) for r in records]
    if workers <= 1 or len(records) <= 1:
        outcomes = [_evaluate_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_evaluate_task, tasks, chunksize=8))
    scores: list[PairScores] = []
    failures: list[str] = []
    for result, error in outcomes:
        if error is not None:
            if strict:
                raise RuntimeError(error)
            failures.append(error)
        else:
            scores.append(result)
    scores.sort(key=lambda s: s.pair_id)
    failures.sort()
    return scores, failures
