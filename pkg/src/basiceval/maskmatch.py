"""Structural correspondence between mask sets and the BASIC-L score.

For every granularity the candidate's labels are paired one-to-one with the
reference's labels through the same exact/synonym/semantic term matcher used
for captions (open-vocabulary annotators emit near-synonym labels such as
"boat"/"ship"). IoU averages include unmatched labels and instances on both
sides as zeros, so omission and hallucination are penalized symmetrically.
AP is precision at a single IoU threshold over candidate detections.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .datamodel import EvalConfig, MaskSet
from .errors import DimensionMismatch
from .semmatch import EmbeddingTable, SynonymLexicon, match_terms, max_weight_assignment


def iou(a: np.ndarray, b: np.ndarray) -> float:
    """Pixel intersection-over-union; 1.0 when both masks are empty."""
    if a.shape != b.shape:
        raise DimensionMismatch(f"mask shapes differ: {a.shape} vs {b.shape}")
    union = int(np.logical_or(a, b).sum())
    if union == 0:
        return 1.0
    inter = int(np.logical_and(a, b).sum())
    return inter / union


@dataclass(frozen=True)
class GranularityScore:
    iou: float
    ap: float


@dataclass(frozen=True)
class GranularityScores:
    """Per-granularity IoU/AP for one pair plus the weighted BASIC-L."""

    f: GranularityScore
    b: GranularityScore
    s: GranularityScore
    i: GranularityScore
    p: GranularityScore
    basic_l: float

    def by_granularity(self) -> dict[str, GranularityScore]:
        return {"F": self.f, "B": self.b, "S": self.s, "I": self.i, "P": self.p}


def _check_dims(cand: MaskSet, ref: MaskSet) -> None:
    if (cand.height, cand.width) != (ref.height, ref.width):
        raise DimensionMismatch(
            f"mask sets differ in size: {cand.height}x{cand.width} vs {ref.height}x{ref.width}"
        )


def _union_of(mask_set: MaskSet, granularity: str) -> np.ndarray:
    out = np.zeros((mask_set.height, mask_set.width), dtype=bool)
    for entry in mask_set.at(granularity):
        out |= mask_set.mask(entry)
    return out


def binary_score(cand: MaskSet, ref: MaskSet, cfg: EvalConfig) -> GranularityScore:
    """IoU of the two B masks; AP is 1 when that IoU clears the threshold."""
    _check_dims(cand, ref)
    value = iou(_union_of(cand, "B"), _union_of(ref, "B"))
    return GranularityScore(iou=value, ap=1.0 if value >= cfg.ap_iou_threshold else 0.0)


def _match_labels(
    cand: MaskSet,
    ref: MaskSet,
    granularity: str,
    cfg: EvalConfig,
    lexicon: SynonymLexicon,
    embeddings: EmbeddingTable,
) -> tuple[list[tuple[str, str]], list[str], list[str]]:
    cand_labels = list(cand.labels(granularity))
    ref_labels = list(ref.labels(granularity))
    pairs = match_terms(cand_labels, ref_labels, cfg, lexicon, embeddings)
    matched = [(p.candidate, p.reference) for p in pairs]
    used_c = {c for c, _ in matched}
    used_r = {r for _, r in matched}
    return (
        matched,
        [c for c in cand_labels if c not in used_c],
        [r for r in ref_labels if r not in used_r],
    )


def category_scores(
    cand: MaskSet,
    ref: MaskSet,
    granularity: str,
    cfg: EvalConfig,
    lexicon: SynonymLexicon,
    embeddings: EmbeddingTable,
) -> GranularityScore:
    """Scores for category granularities (F, S): one mask per label.

    IoU is the mean over matched-label pair IoUs with unmatched labels on
    either side contributing zero; AP is the fraction of candidate labels
    whose matched IoU clears the threshold.
    """
    _check_dims(cand, ref)
    matched, unmatched_c, unmatched_r = _match_labels(cand, ref, granularity, cfg, lexicon, embeddings)

    def label_mask(mask_set: MaskSet, g: str, label: str) -> np.ndarray:
        out = np.zeros((mask_set.height, mask_set.width), dtype=bool)
        for entry in mask_set.at(g):
            if entry.label == label:
                out |= mask_set.mask(entry)
        return out

    pair_ious = [
        iou(label_mask(cand, granularity, cl), label_mask(ref, granularity, rl)) for cl, rl in matched
    ]
    denominator = len(matched) + len(unmatched_c) + len(unmatched_r)
    mean_iou = sum(pair_ious) / denominator if denominator else 1.0

    n_cand = len(matched) + len(unmatched_c)
    n_ref = len(matched) + len(unmatched_r)
    hits = sum(1 for v in pair_ious if v >= cfg.ap_iou_threshold)
    if n_cand:
        ap = hits / n_cand
    else:
        ap = 0.0 if n_ref else 1.0
    return GranularityScore(iou=mean_iou, ap=ap)


def foreground_union_score(cand: MaskSet, ref: MaskSet, cfg: EvalConfig) -> GranularityScore:
    """Alternative F scoring on the union of all foreground masks."""
    _check_dims(cand, ref)
    value = iou(_union_of(cand, "F"), _union_of(ref, "F"))
    return GranularityScore(iou=value, ap=1.0 if value >= cfg.ap_iou_threshold else 0.0)


def instance_scores(
    cand: MaskSet,
    ref: MaskSet,
    granularity: str,
    cfg: EvalConfig,
    lexicon: SynonymLexicon,
    embeddings: EmbeddingTable,
) -> GranularityScore:
    """Scores for instance granularities (I, P).

    Labels pair as in category_scores; within each matched label pair the
    instances pair by maximum-weight assignment on pairwise IoU. The IoU mean
    counts unmatched instances on either side, including every instance under
    an unmatched label, as zeros. AP divides threshold-clearing instance
    pairs by the total number of candidate instances.
    """
    _check_dims(cand, ref)
    matched, unmatched_c, unmatched_r = _match_labels(cand, ref, granularity, cfg, lexicon, embeddings)

    def instances(mask_set: MaskSet, label: str) -> list[np.ndarray]:
        entries = sorted(
            (e for e in mask_set.at(granularity) if e.label == label), key=lambda e: e.instance
        )
        return [mask_set.mask(e) for e in entries]

    pair_ious: list[float] = []
    n_unmatched_instances = 0
    for cl, rl in matched:
        cand_instances = instances(cand, cl)
        ref_instances = instances(ref, rl)
        weights = np.zeros((len(cand_instances), len(ref_instances)))
        for i, cm in enumerate(cand_instances):
            for j, rm in enumerate(ref_instances):
                weights[i, j] = iou(cm, rm)
        assigned = max_weight_assignment(weights)
        pair_ious.extend(float(weights[i, j]) for i, j in assigned)
        n_unmatched_instances += (len(cand_instances) - len(assigned)) + (
            len(ref_instances) - len(assigned)
        )
    for label in unmatched_c:
        n_unmatched_instances += len(instances(cand, label))
    for label in unmatched_r:
        n_unmatched_instances += len(instances(ref, label))

    denominator = len(pair_ious) + n_unmatched_instances
    mean_iou = sum(pair_ious) / denominator if denominator else 1.0

    n_cand_instances = len(cand.at(granularity))
    n_ref_instances = len(ref.at(granularity))
    hits = sum(1 for v in pair_ious if v >= cfg.ap_iou_threshold)
    if n_cand_instances:
        ap = hits / n_cand_instances
    else:
        ap = 0.0 if n_ref_instances else 1.0
    return GranularityScore(iou=mean_iou, ap=ap)


def basic_l(iou_f: float, iou_s: float, iou_i: float, iou_p: float, beta) -> float:
    """Weighted sum of the F/S/I/P IoUs (B is excluded).

    Inputs in [0, 1] are scaled to a 0..100 score; inputs already on the
    percentage scale (any value above 1) pass through the weighting unscaled.
    """
    total = sum(beta)
    b1, b2, b3, b4 = (w / total for w in beta)
    combined = b1 * iou_f + b2 * iou_s + b3 * iou_i + b4 * iou_p
    values = (iou_f, iou_s, iou_i, iou_p)
    if any(v > 1.0 for v in values):
        return combined
    return 100.0 * combined


def score_mask_sets(
    cand: MaskSet,
    ref: MaskSet,
    cfg: EvalConfig,
    lexicon: SynonymLexicon,
    embeddings: EmbeddingTable,
) -> GranularityScores:
    """All five granularity scores plus BASIC-L for one pair."""
    if cfg.foreground_mode == "union":
        f = foreground_union_score(cand, ref, cfg)
    else:
        f = category_scores(cand, ref, "F", cfg, lexicon, embeddings)
    b = binary_score(cand, ref, cfg)
    s = category_scores(cand, ref, "S", cfg, lexicon, embeddings)
    i = instance_scores(cand, ref, "I", cfg, lexicon, embeddings)
    p = instance_scores(cand, ref, "P", cfg, lexicon, embeddings)
    return GranularityScores(
        f=f,
        b=b,
        s=s,
        i=i,
        p=p,
        basic_l=basic_l(f.iou, s.iou, i.iou, p.iou, cfg.beta),
    )
