"""Aggregation into per-method tables, rank stability, sweeps, rendering.

Aggregation is per-pair-then-mean: every sub-indicator of a method is the
unweighted arithmetic mean of its per-pair scores, reported on the 0..100
scale. A pooled-counts mode (sum match counts across pairs before computing
P/R/F1) is available for sensitivity analysis.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, fields, replace
from pathlib import Path

from .datamodel import EvalConfig, PairRecord
from .errors import EmptyInput, MismatchedSets, MixedMethods
from .evaluate import PairScores, evaluate_records
from .semmatch import basic_h as combine_h
from .semmatch import prf

CSV_COLUMNS = [
    "method", "dataset",
    "obj_p", "obj_r", "obj_f1",
    "attr_p", "attr_r", "attr_f1",
    "rel_p", "rel_r", "rel_f1",
    "iou_f", "ap_f", "iou_b", "ap_b", "iou_s", "ap_s",
    "iou_i", "ap_i", "iou_p", "ap_p",
    "basic_h", "basic_l", "basic",
]


@dataclass(frozen=True)
class MethodSummary:
    """Mean scores of one method on one dataset (0..100 scale)."""

    method: str
    dataset: str
    n_pairs: int
    obj_p: float | None = None
    obj_r: float | None = None
    obj_f1: float | None = None
    attr_p: float | None = None
    attr_r: float | None = None
    attr_f1: float | None = None
    rel_p: float | None = None
    rel_r: float | None = None
    rel_f1: float | None = None
    iou_f: float | None = None
    ap_f: float | None = None
    iou_b: float | None = None
    ap_b: float | None = None
    iou_s: float | None = None
    ap_s: float | None = None
    iou_i: float | None = None
    ap_i: float | None = None
    iou_p: float | None = None
    ap_p: float | None = None
    basic_h: float | None = None
    basic_l: float | None = None
    basic: float | None = None

    def as_row(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def _mean(values: list[float]) -> float:
    # fsum keeps the mean exactly permutation-invariant
    return math.fsum(values) / len(values)


def aggregate(records: list[PairScores], pooled: bool = False, alpha=None) -> MethodSummary:
    """Summarize the per-pair scores of one (method, dataset).

    pooled mode sums match counts across pairs before computing the semantic
    P/R/F1 (alpha is then required to recombine BASIC-H); mask scores are
    always per-pair means.
    """
    if not records:
        raise EmptyInput("no records to aggregate")
    keys = {(r.method, r.dataset) for r in records}
    if len(keys) > 1:
        raise MixedMethods(f"records span multiple methods: {sorted(keys)}")
    method, dataset = next(iter(keys))
    summary = MethodSummary(method=method, dataset=dataset, n_pairs=len(records))

    semantic = [r.semantic for r in records if r.semantic is not None]
    if len(semantic) == len(records):
        values: dict[str, float] = {}
        for prefix, pick in (("obj", lambda m: m.object),
                             ("attr", lambda m: m.attribute),
                             ("rel", lambda m: m.relation)):
            if pooled:
                matched = sum(pick(m).n_matched for m in semantic)
                n_cand = sum(pick(m).n_candidate for m in semantic)
                n_ref = sum(pick(m).n_reference for m in semantic)
                p, r, f1 = prf(matched, n_cand, n_ref)
            else:
                p = _mean([pick(m).precision for m in semantic])
                r = _mean([pick(m).recall for m in semantic])
                f1 = _mean([pick(m).f1 for m in semantic])
            values[f"{prefix}_p"] = 100.0 * p
            values[f"{prefix}_r"] = 100.0 * r
            values[f"{prefix}_f1"] = 100.0 * f1
        if pooled:
            if alpha is None:
                raise ValueError("pooled aggregation requires alpha weights")
            h = combine_h(values["obj_f1"], values["attr_f1"], values["rel_f1"], alpha)
        else:
            h = _mean([m.basic_h for m in semantic])
        summary = replace(summary, basic_h=h, **values)

    structural = [r.structural for r in records if r.structural is not None]
    if len(structural) == len(records):
        values = {}
        for name, pick in (("f", lambda g: g.f), ("b", lambda g: g.b), ("s", lambda g: g.s),
                           ("i", lambda g: g.i), ("p", lambda g: g.p)):
            values[f"iou_{name}"] = 100.0 * _mean([pick(g).iou for g in structural])
            values[f"ap_{name}"] = 100.0 * _mean([pick(g).ap for g in structural])
        summary = replace(summary, basic_l=_mean([g.basic_l for g in structural]), **values)

    if summary.basic_h is not None and summary.basic_l is not None:
        summary = replace(summary, basic=(summary.basic_h + summary.basic_l) / 2.0)
    return summary


def summarize(scores: list[PairScores], pooled: bool = False, alpha=None) -> list[MethodSummary]:
    """Group per-pair scores by (dataset, method) and aggregate each group."""
    groups: dict[tuple[str, str], list[PairScores]] = {}
    for s in scores:
        groups.setdefault((s.dataset, s.method), []).append(s)
    return [aggregate(groups[key], pooled=pooled, alpha=alpha) for key in sorted(groups)]


def kendall_tau(rank_a: list, rank_b: list) -> float:
    """Kendall tau-a between two orderings of the same item set.

    Both arguments are sequences of items in rank order (no ties; break ties
    by name before ranking, see ranking()). Returns 1.0 for fewer than two
    items.
    """
    if len(set(rank_a)) != len(rank_a) or len(set(rank_b)) != len(rank_b):
        raise MismatchedSets("rankings contain duplicate items")
    if set(rank_a) != set(rank_b):
        raise MismatchedSets("rankings cover different item sets")
    n = len(rank_a)
    if n < 2:
        return 1.0
    position = {item: i for i, item in enumerate(rank_b)}
    concordant = discordant = 0
    for i in range(n):
        for j in range(i + 1, n):
            if position[rank_a[i]] < position[rank_a[j]]:
                concordant += 1
            else:
                discordant += 1
    return (concordant - discordant) / (n * (n - 1) / 2)


def ranking(summaries: list[MethodSummary], key: str = "basic") -> list[str]:
    """Methods ordered best-first by a summary column; score ties are broken
    by method name so the ranking is always total."""
    scored = [(s, getattr(s, key)) for s in summaries]
    missing = [s.method for s, v in scored if v is None]
    if missing:
        raise ValueError(f"methods without {key!r} score: {missing}")
    return [s.method for s, v in sorted(scored, key=lambda sv: (-sv[1], sv[0].method))]


GRID_FLOAT_PARAMS = ("tau_sem", "ap_iou_threshold", "box_threshold", "text_threshold")
GRID_MODE_PARAMS = ("attribute_mode", "relation_mode", "foreground_mode")
GRID_WEIGHT_PARAMS = ("alpha", "beta")
GRID_DIR_PARAMS = ("graph_dir", "mask_dir")
GRID_PARAMS = GRID_FLOAT_PARAMS + GRID_MODE_PARAMS + GRID_WEIGHT_PARAMS + GRID_DIR_PARAMS


def apply_grid_point(
    records: list[PairRecord], cfg: EvalConfig, point: dict[str, object]
) -> tuple[list[PairRecord], EvalConfig]:
    """Apply one sweep point: config overrides plus artifact-directory
    remapping (graph_dir/mask_dir replace the directory of every graph/mask
    path, keeping file names)."""
    overrides: dict[str, object] = {}
    for param, value in point.items():
        if param in GRID_FLOAT_PARAMS:
            overrides[param] = float(value)
        elif param in GRID_MODE_PARAMS:
            overrides[param] = str(value)
        elif param in GRID_WEIGHT_PARAMS:
            overrides[param] = tuple(float(v) for v in value)
        elif param not in GRID_DIR_PARAMS:
            raise ValueError(f"unknown sweep parameter {param!r}")
    if overrides:
        cfg = cfg.with_overrides(**overrides)

    def _redir(path: str, directory: str) -> str:
        return str(Path(directory) / Path(path).name)

    if "graph_dir" in point or "mask_dir" in point:
        remapped = []
        for r in records:
            if "graph_dir" in point:
                r = replace(
                    r,
                    candidate_graph=_redir(r.candidate_graph, str(point["graph_dir"])),
                    reference_graph=_redir(r.reference_graph, str(point["graph_dir"])),
                )
            if "mask_dir" in point:
                r = replace(
                    r,
                    candidate_masks=_redir(r.candidate_masks, str(point["mask_dir"])),
                    reference_masks=_redir(r.reference_masks, str(point["mask_dir"])),
                )
            remapped.append(r)
        records = remapped
    return records, cfg


@dataclass(frozen=True)
class SweepPoint:
    params: dict[str, object]
    summaries: list[MethodSummary]
    tau: float
    failures: list[str]


def sweep(
    records: list[PairRecord],
    base_cfg: EvalConfig,
    grid: dict[str, list],
    workers: int = 1,
    rank_by: str = "basic",
) -> list[SweepPoint]:
    """Run one full evaluation per grid point (Cartesian product over the
    parameter value lists) and report each point's Kendall tau of the method
    ranking against the base configuration."""
    if not grid:
        raise ValueError("sweep grid is empty")
    unknown = [p for p in grid if p not in GRID_PARAMS]
    if unknown:
        raise ValueError(f"unknown sweep parameters: {unknown}")

    base_scores, _ = evaluate_records(records, base_cfg, workers=workers)
    base_ranking = ranking(summarize(base_scores), key=rank_by)

    points = []
    names = sorted(grid)
    for combo in itertools.product(*(grid[name] for name in names)):
        point = dict(zip(names, combo))
        try:
            point_records, point_cfg = apply_grid_point(records, base_cfg, point)
            scores, failures = evaluate_records(point_records, point_cfg, workers=workers)
            summaries = summarize(scores)
            tau = kendall_tau(ranking(summaries, key=rank_by), base_ranking)
        except Exception as exc:
            raise RuntimeError(f"sweep point {point} failed: {exc}") from exc
        points.append(SweepPoint(params=point, summaries=summaries, tau=tau, failures=failures))
    return points


def _format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.2f}"
    return str(value)


def render(summaries: list[MethodSummary], fmt: str = "csv", extra_columns: dict | None = None) -> str:
    """Render summaries as csv or markdown.

    csv: fixed column order (CSV_COLUMNS), two decimals, comma-delimited,
    header row. markdown: same columns with the best value per numeric
    column in bold. extra_columns prepends constant-valued columns (used by
    the sweep's long-form output).
    """
    extra = extra_columns or {}
    header = list(extra) + CSV_COLUMNS
    rows = []
    ordered = sorted(summaries, key=lambda s: (s.dataset, s.method))
    for s in ordered:
        row = s.as_row()
        rows.append([_format_cell(extra[c]) for c in extra] + [_format_cell(row[c]) for c in CSV_COLUMNS])

    if fmt == "csv":
        lines = [",".join(header)] + [",".join(r) for r in rows]
        return "\n".join(lines) + "\n"
    if fmt != "markdown":
        raise ValueError(f"unknown format {fmt!r}")

    numeric = [c for c in CSV_COLUMNS if c not in ("method", "dataset")]
    best: dict[str, float] = {}
    for s in ordered:
        for c in numeric:
            v = s.as_row()[c]
            if v is not None and (c not in best or v > best[c]):
                best[c] = v
    cells = []
    for s in ordered:
        row = s.as_row()
        rendered = [_format_cell(extra[c]) for c in extra]
        for c in CSV_COLUMNS:
            text = _format_cell(row[c])
            if c in numeric and row[c] is not None and row[c] == best.get(c):
                text = f"**{text}**"
            rendered.append(text)
        cells.append(rendered)
    lines = ["| " + " | ".join(header) + " |", "|" + "|".join(" --- " for _ in header) + "|"]
    lines.extend("| " + " | ".join(r) + " |" for r in cells)
    return "\n".join(lines) + "\n"
