"""Three-stage structured semantic matching and the BASIC-H score.

Matching between candidate and reference element lists proceeds through
three strictly sequential stages over shrinking unmatched sets:

  a. exact    - identical normalized terms
  b. synonym  - remaining terms sharing a lexicon synset
  c. semantic - maximum-total-weight one-to-one assignment over cosine
                similarities of term embeddings, restricted to pairs with
                similarity >= tau_sem

A pair made at an earlier stage is never revoked. Within a stage the
assignment is globally optimal (not greedy) and deterministic: ties are
broken by the lexicographically smallest pairing over (row, column) indices.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.optimize import linear_sum_assignment

from .datamodel import EvalConfig, SemanticGraph, normalize_term, _strip_plural
from .errors import MalformedFile, NegativeCount, SchemaViolation

STAGE_EXACT = "exact"
STAGE_SYNONYM = "synonym"
STAGE_SEMANTIC = "semantic"


class SynonymLexicon:
    """Collection of synsets; membership is symmetric and reflexive."""

    def __init__(self, synsets: list[set[str]] | None = None):
        self._by_term: dict[str, set[str]] = {}
        for synset in synsets or []:
            normalized = {normalize_term(t) for t in synset}
            normalized.discard("")
            for term in normalized:
                self._by_term.setdefault(term, set()).update(normalized)

    @staticmethod
    def load(path: str | Path) -> "SynonymLexicon":
        """Load a lexicon file: a JSON array of arrays of strings."""
        p = Path(path)
        if not p.exists():
            raise MalformedFile(f"file not found: {p}")
        try:
            doc = json.loads(p.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise MalformedFile(f"{p}: invalid JSON ({exc})") from exc
        if not isinstance(doc, list) or not all(isinstance(s, list) for s in doc):
            raise SchemaViolation(f"{p}: lexicon must be an array of synsets")
        return SynonymLexicon([set(map(str, s)) for s in doc])

    @staticmethod
    def empty() -> "SynonymLexicon":
        return SynonymLexicon([])

    def synonyms(self, term: str) -> set[str]:
        return self._by_term.get(term, {term}) | {term}

    def are_synonyms(self, a: str, b: str) -> bool:
        if a == b:
            return True
        return b in self._by_term.get(a, ())

    def __len__(self) -> int:
        return len(self._by_term)


class EmbeddingTable:
    """Unit-norm word vectors keyed by single tokens.

    File format: first line is the dimension D alone; every following line is
    a token and D decimal numbers, whitespace-separated. Vectors are
    renormalized to unit Euclidean norm on load.
    """

    def __init__(self, dimension: int, vectors: dict[str, np.ndarray] | None = None):
        self.dimension = dimension
        self.vectors: dict[str, np.ndarray] = {}
        for token, vec in (vectors or {}).items():
            arr = np.asarray(vec, dtype=float)
            if arr.shape != (dimension,):
                raise SchemaViolation(f"vector for {token!r} has wrong dimension")
            norm = float(np.linalg.norm(arr))
            if norm == 0.0:
                raise SchemaViolation(f"vector for {token!r} has zero norm")
            self.vectors[token] = arr / norm

    @staticmethod
    def load(path: str | Path) -> "EmbeddingTable":
        p = Path(path)
        if not p.exists():
            raise MalformedFile(f"file not found: {p}")
        lines = [ln for ln in p.read_text(encoding="utf-8").splitlines() if ln.strip()]
        if not lines:
            raise SchemaViolation(f"{p}: empty embedding file")
        try:
            dimension = int(lines[0].strip())
        except ValueError as exc:
            raise SchemaViolation(f"{p}: first line must be the dimension alone") from exc
        vectors: dict[str, np.ndarray] = {}
        for i, line in enumerate(lines[1:], start=2):
            parts = line.split()
            if len(parts) != dimension + 1:
                raise SchemaViolation(f"{p}:{i}: expected token plus {dimension} numbers")
            token = parts[0]
            try:
                vec = np.array([float(x) for x in parts[1:]])
            except ValueError as exc:
                raise SchemaViolation(f"{p}:{i}: non-numeric vector entry") from exc
            if token in vectors:
                raise SchemaViolation(f"{p}:{i}: duplicate token {token!r}")
            vectors[token] = vec
        return EmbeddingTable(dimension, vectors)

    @staticmethod
    def empty() -> "EmbeddingTable":
        return EmbeddingTable(1, {})

    def __len__(self) -> int:
        return len(self.vectors)

    def lookup(self, token: str) -> np.ndarray | None:
        vec = self.vectors.get(token)
        if vec is None:
            vec = self.vectors.get(_strip_plural(token))
        return vec


def embed_term(term: str, table: EmbeddingTable) -> np.ndarray | None:
    """Vector for a term, or None when no token of it is known.

    Multi-word terms embed as the renormalized arithmetic mean of their known
    token vectors.
    """
    found = [v for v in (table.lookup(tok) for tok in term.split()) if v is not None]
    if not found:
        return None
    mean = np.mean(found, axis=0)
    norm = float(np.linalg.norm(mean))
    if norm == 0.0:
        return None
    return mean / norm


def max_weight_assignment(weights: np.ndarray) -> list[tuple[int, int]]:
    """One-to-one pairing of rows to columns maximizing total weight.

    Weights must be finite and non-negative. Zero-weight pairs are never
    included, and among pairings of equal total weight the lexicographically
    smallest list of (row, column) pairs is returned, so the result is fully
    deterministic.
    """
    w = np.asarray(weights, dtype=float)
    if w.size == 0:
        return []
    if w.ndim != 2:
        raise ValueError("weight matrix must be 2-dimensional")
    if not np.isfinite(w).all() or (w < 0).any():
        raise ValueError("weights must be finite and non-negative")

    n_rows, n_cols = w.shape
    target = _optimal_total(w)
    tol = 1e-9
    pairs: list[tuple[int, int]] = []
    free_cols = list(range(n_cols))
    achieved = 0.0
    for row in range(n_rows):
        if achieved >= target - tol:
            break
        chosen = None
        for col in free_cols:
            if w[row, col] <= 0.0:
                continue
            rest = w[np.ix_(range(row + 1, n_rows), [c for c in free_cols if c != col])]
            if achieved + w[row, col] + _optimal_total(rest) >= target - tol:
                chosen = col
                break
        if chosen is not None:
            pairs.append((row, chosen))
            achieved += w[row, chosen]
            free_cols.remove(chosen)
    return pairs


def _optimal_total(w: np.ndarray) -> float:
    if w.size == 0:
        return 0.0
    rows, cols = linear_sum_assignment(w, maximize=True)
    return float(w[rows, cols].sum())


@dataclass(frozen=True)
class MatchPair:
    candidate: object
    reference: object
    stage: str
    similarity: float


@dataclass(frozen=True)
class TypeMatch:
    """Match outcome for one element type."""

    pairs: tuple[MatchPair, ...]
    n_matched: int
    n_candidate: int
    n_reference: int
    precision: float
    recall: float
    f1: float


@dataclass(frozen=True)
class MatchReport:
    """Stage-annotated correspondences plus P/R/F1 per element type.

    Scene and camera descriptors are matched and reported but do not enter
    the BASIC-H weighted sum.
    """

    object: TypeMatch
    attribute: TypeMatch
    relation: TypeMatch
    scene: TypeMatch
    camera: TypeMatch
    basic_h: float


def _match_stagewise(
    n_cand: int,
    n_ref: int,
    exact_eq,
    synonym_eq,
    semantic_weight,
) -> list[tuple[int, int, str, float]]:
    """Run the three sequential stages over index sets, returning
    (cand_index, ref_index, stage, similarity) tuples."""
    matched: list[tuple[int, int, str, float]] = []
    cand_left = list(range(n_cand))
    ref_left = list(range(n_ref))

    for stage, predicate in ((STAGE_EXACT, exact_eq), (STAGE_SYNONYM, synonym_eq)):
        if not cand_left or not ref_left:
            break
        w = np.zeros((len(cand_left), len(ref_left)))
        for i, ci in enumerate(cand_left):
            for j, rj in enumerate(ref_left):
                if predicate(ci, rj):
                    w[i, j] = 1.0
        for i, j in max_weight_assignment(w):
            matched.append((cand_left[i], ref_left[j], stage, 1.0))
        used_c = {c for c, _, _, _ in matched}
        used_r = {r for _, r, _, _ in matched}
        cand_left = [c for c in cand_left if c not in used_c]
        ref_left = [r for r in ref_left if r not in used_r]

    if cand_left and ref_left and semantic_weight is not None:
        w = np.zeros((len(cand_left), len(ref_left)))
        for i, ci in enumerate(cand_left):
            for j, rj in enumerate(ref_left):
                w[i, j] = semantic_weight(ci, rj)
        for i, j in max_weight_assignment(w):
            matched.append((cand_left[i], ref_left[j], STAGE_SEMANTIC, float(w[i, j])))

    return matched


def _semantic_weight_fn(cand_vecs, ref_vecs, tau: float):
    def weight(ci: int, rj: int) -> float:
        vc, vr = cand_vecs[ci], ref_vecs[rj]
        if vc is None or vr is None:
            return 0.0
        sim = float(np.dot(vc, vr))
        if sim < tau:
            return 0.0
        return min(max(sim, 0.0), 1.0)

    return weight


def match_terms(
    cand: list[str],
    ref: list[str],
    cfg: EvalConfig,
    lexicon: SynonymLexicon,
    embeddings: EmbeddingTable,
) -> list[MatchPair]:
    """Three-stage one-to-one matching of two deduplicated term lists."""
    cand_vecs = [embed_term(t, embeddings) for t in cand]
    ref_vecs = [embed_term(t, embeddings) for t in ref]
    raw = _match_stagewise(
        len(cand),
        len(ref),
        exact_eq=lambda ci, rj: cand[ci] == ref[rj],
        synonym_eq=lambda ci, rj: lexicon.are_synonyms(cand[ci], ref[rj]),
        semantic_weight=_semantic_weight_fn(cand_vecs, ref_vecs, cfg.tau_sem),
    )
    return [MatchPair(cand[ci], ref[rj], stage, sim) for ci, rj, stage, sim in raw]


def _pairing_map(pairs: list[MatchPair]) -> dict[str, str]:
    return {p.candidate: p.reference for p in pairs}


def match_attributes(
    cand_graph: SemanticGraph,
    ref_graph: SemanticGraph,
    cfg: EvalConfig,
    lexicon: SynonymLexicon,
    embeddings: EmbeddingTable,
) -> TypeMatch:
    """Match attribute bindings between two graphs.

    host-conditioned (default): hosts are first matched with the full term
    matcher over the host term sets (hosts need not appear in the object
    lists); attribute terms are then matched within each matched host pair.
    unconditioned: attribute terms are matched globally, ignoring hosts.
    Denominators always count all bindings, so attributes on unmatched hosts
    penalize precision and recall.
    """
    cand_bindings = list(cand_graph.attributes)
    ref_bindings = list(ref_graph.attributes)
    pairs: list[MatchPair] = []

    if cfg.attribute_mode == "host-conditioned":
        cand_hosts = sorted({h for h, _ in cand_bindings})
        ref_hosts = sorted({h for h, _ in ref_bindings})
        host_pairs = match_terms(cand_hosts, ref_hosts, cfg, lexicon, embeddings)
        for host_pair in host_pairs:
            c_attrs = [a for h, a in cand_bindings if h == host_pair.candidate]
            r_attrs = [a for h, a in ref_bindings if h == host_pair.reference]
            for p in match_terms(c_attrs, r_attrs, cfg, lexicon, embeddings):
                pairs.append(
                    MatchPair(
                        (host_pair.candidate, p.candidate),
                        (host_pair.reference, p.reference),
                        p.stage,
                        p.similarity,
                    )
                )
    else:
        cand_vecs = [embed_term(a, embeddings) for _, a in cand_bindings]
        ref_vecs = [embed_term(a, embeddings) for _, a in ref_bindings]
        raw = _match_stagewise(
            len(cand_bindings),
            len(ref_bindings),
            exact_eq=lambda ci, rj: cand_bindings[ci][1] == ref_bindings[rj][1],
            synonym_eq=lambda ci, rj: lexicon.are_synonyms(cand_bindings[ci][1], ref_bindings[rj][1]),
            semantic_weight=_semantic_weight_fn(cand_vecs, ref_vecs, cfg.tau_sem),
        )
        pairs = [MatchPair(cand_bindings[ci], ref_bindings[rj], stage, sim) for ci, rj, stage, sim in raw]

    return _to_type_match(pairs, len(cand_bindings), len(ref_bindings))


def match_relations(
    cand_graph: SemanticGraph,
    ref_graph: SemanticGraph,
    cfg: EvalConfig,
    lexicon: SynonymLexicon,
    embeddings: EmbeddingTable,
) -> TypeMatch:
    """Match relation triples between two graphs.

    endpoint-consistent (default): a candidate triple is eligible against a
    reference triple only when its subject and object terms are matched to
    the reference's by the full term matcher over the pooled endpoint term
    sets; predicates of eligible pairs then go through the three stages.
    triple-string: each triple is flattened to "s p o" and matched as a term,
    with stage c operating on averaged token embeddings.
    """
    cand_triples = list(cand_graph.relations)
    ref_triples = list(ref_graph.relations)

    if cfg.relation_mode == "endpoint-consistent":
        cand_endpoints = sorted({t for s, _, o in cand_triples for t in (s, o)})
        ref_endpoints = sorted({t for s, _, o in ref_triples for t in (s, o)})
        endpoint_map = _pairing_map(match_terms(cand_endpoints, ref_endpoints, cfg, lexicon, embeddings))

        def eligible(ci: int, rj: int) -> bool:
            sc, _, oc = cand_triples[ci]
            sr, _, orr = ref_triples[rj]
            return endpoint_map.get(sc) == sr and endpoint_map.get(oc) == orr

        pred_cand_vecs = [embed_term(p, embeddings) for _, p, _ in cand_triples]
        pred_ref_vecs = [embed_term(p, embeddings) for _, p, _ in ref_triples]
        base_weight = _semantic_weight_fn(pred_cand_vecs, pred_ref_vecs, cfg.tau_sem)
        raw = _match_stagewise(
            len(cand_triples),
            len(ref_triples),
            exact_eq=lambda ci, rj: eligible(ci, rj) and cand_triples[ci][1] == ref_triples[rj][1],
            synonym_eq=lambda ci, rj: eligible(ci, rj)
            and lexicon.are_synonyms(cand_triples[ci][1], ref_triples[rj][1]),
            semantic_weight=lambda ci, rj: base_weight(ci, rj) if eligible(ci, rj) else 0.0,
        )
    else:
        cand_flat = [" ".join(t) for t in cand_triples]
        ref_flat = [" ".join(t) for t in ref_triples]
        cand_vecs = [embed_term(t, embeddings) for t in cand_flat]
        ref_vecs = [embed_term(t, embeddings) for t in ref_flat]
        raw = _match_stagewise(
            len(cand_triples),
            len(ref_triples),
            exact_eq=lambda ci, rj: cand_flat[ci] == ref_flat[rj],
            synonym_eq=lambda ci, rj: lexicon.are_synonyms(cand_flat[ci], ref_flat[rj]),
            semantic_weight=_semantic_weight_fn(cand_vecs, ref_vecs, cfg.tau_sem),
        )

    pairs = [MatchPair(cand_triples[ci], ref_triples[rj], stage, sim) for ci, rj, stage, sim in raw]
    return _to_type_match(pairs, len(cand_triples), len(ref_triples))


def prf(n_matched: int, n_candidate: int, n_reference: int) -> tuple[float, float, float]:
    """Precision, recall, and F1 from match counts.

    Conventions for degenerate denominators: both sides empty scores perfect
    vacuous agreement (1, 1, 1); an empty side against a non-empty one scores
    (0, 0, 0), so hallucination and total omission are both penalized.
    """
    for name, v in (("n_matched", n_matched), ("n_candidate", n_candidate), ("n_reference", n_reference)):
        if v < 0:
            raise NegativeCount(f"{name} is negative: {v}")
    if n_matched > min(n_candidate, n_reference):
        raise ValueError("n_matched exceeds min(n_candidate, n_reference)")
    if n_candidate == 0 and n_reference == 0:
        return (1.0, 1.0, 1.0)
    precision = n_matched / n_candidate if n_candidate else 0.0
    recall = n_matched / n_reference if n_reference else 0.0
    if precision + recall == 0.0:
        return (precision, recall, 0.0)
    return (precision, recall, 2.0 * precision * recall / (precision + recall))


def basic_h(f1_object: float, f1_attribute: float, f1_relation: float, alpha) -> float:
    """Weighted sum of the three F1 scores (percentage scale in, same out)."""
    total = sum(alpha)
    a1, a2, a3 = (w / total for w in alpha)
    return a1 * f1_object + a2 * f1_attribute + a3 * f1_relation


def _to_type_match(pairs: list[MatchPair], n_candidate: int, n_reference: int) -> TypeMatch:
    n_matched = len(pairs)
    precision, recall, f1 = prf(n_matched, n_candidate, n_reference)
    return TypeMatch(
        pairs=tuple(pairs),
        n_matched=n_matched,
        n_candidate=n_candidate,
        n_reference=n_reference,
        precision=precision,
        recall=recall,
        f1=f1,
    )


def match_graphs(
    cand_graph: SemanticGraph,
    ref_graph: SemanticGraph,
    cfg: EvalConfig,
    lexicon: SynonymLexicon,
    embeddings: EmbeddingTable,
) -> MatchReport:
    """Full semantic comparison of two graphs, including BASIC-H."""
    obj_pairs = match_terms(list(cand_graph.objects), list(ref_graph.objects), cfg, lexicon, embeddings)
    object_match = _to_type_match(obj_pairs, len(cand_graph.objects), len(ref_graph.objects))
    attribute_match = match_attributes(cand_graph, ref_graph, cfg, lexicon, embeddings)
    relation_match = match_relations(cand_graph, ref_graph, cfg, lexicon, embeddings)
    scene_match = _to_type_match(
        match_terms(list(cand_graph.scene), list(ref_graph.scene), cfg, lexicon, embeddings),
        len(cand_graph.scene),
        len(ref_graph.scene),
    )
    camera_match = _to_type_match(
        match_terms(list(cand_graph.camera), list(ref_graph.camera), cfg, lexicon, embeddings),
        len(cand_graph.camera),
        len(ref_graph.camera),
    )
    score = basic_h(
        100.0 * object_match.f1,
        100.0 * attribute_match.f1,
        100.0 * relation_match.f1,
        cfg.alpha,
    )
    return MatchReport(
        object=object_match,
        attribute=attribute_match,
        relation=relation_match,
        scene=scene_match,
        camera=camera_match,
        basic_h=score,
    )
