"""Command-line entry point for validation, batch evaluation, and sweeps.

Exit codes: 0 success, 1 evaluation/validation failures, 2 usage errors
(unreadable manifest, bad flags). All runs are deterministic: identical
inputs and config produce byte-identical outputs regardless of --workers.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .datamodel import (
    EvalConfig,
    PairRecord,
    load_config,
    load_graph,
    load_manifest,
    load_masks,
)
from .errors import BasicEvalError, MalformedFile
from .evaluate import PairScores, evaluate_records, resources_for
from .maskmatch import basic_l as combine_l
from .report import (
    GRID_DIR_PARAMS,
    GRID_WEIGHT_PARAMS,
    MethodSummary,
    render,
    summarize,
    sweep,
)
from .semmatch import basic_h as combine_h

log = logging.getLogger("basiceval")


def _pair_to_dict(scores: PairScores) -> dict:
    doc: dict = {
        "pair_id": scores.pair_id,
        "method": scores.method,
        "dataset": scores.dataset,
        "basic_h": scores.basic_h,
        "basic_l": scores.basic_l,
        "basic": scores.basic,
    }
    if scores.semantic is not None:
        sem: dict = {"basic_h": scores.semantic.basic_h}
        for name in ("object", "attribute", "relation", "scene", "camera"):
            tm = getattr(scores.semantic, name)
            sem[name] = {
                "pairs": [
                    {
                        "candidate": p.candidate,
                        "reference": p.reference,
                        "stage": p.stage,
                        "similarity": p.similarity,
                    }
                    for p in tm.pairs
                ],
                "counts": {
                    "n_matched": tm.n_matched,
                    "n_candidate": tm.n_candidate,
                    "n_reference": tm.n_reference,
                },
                "scores": {"precision": tm.precision, "recall": tm.recall, "f1": tm.f1},
            }
        doc["semantic"] = sem
    if scores.structural is not None:
        doc["structural"] = {
            "basic_l": scores.structural.basic_l,
            **{
                g.lower(): {"iou": gs.iou, "ap": gs.ap}
                for g, gs in scores.structural.by_granularity().items()
            },
        }
    return doc


def _json_default(obj):
    if isinstance(obj, tuple):
        return list(obj)
    raise TypeError(f"not JSON serializable: {type(obj)}")


def _load_run_config(args) -> EvalConfig:
    return load_config(args.config) if args.config else EvalConfig()


def cmd_validate(args) -> int:
    try:
        records = load_manifest(args.manifest)
        cfg = _load_run_config(args)
    except BasicEvalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    diagnostics: list[str] = []
    try:
        resources_for(cfg)
    except BasicEvalError as exc:
        diagnostics.append(f"config resources: {exc}")
    for record in records:
        for label, path, loader in (
            ("candidate_graph", record.candidate_graph, load_graph),
            ("reference_graph", record.reference_graph, load_graph),
            ("candidate_masks", record.candidate_masks, load_masks),
            ("reference_masks", record.reference_masks, load_masks),
        ):
            try:
                loader(path)
            except BasicEvalError as exc:
                diagnostics.append(f"{record.pair_id}/{label}: {exc}")
    for diagnostic in diagnostics:
        print(diagnostic)
    print(f"validated {len(records)} pairs, {len(diagnostics)} problems")
    return 0 if not diagnostics else 1


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def _write_reports(out: Path, summaries: list[MethodSummary], fmt: str) -> None:
    _write(
        out / "summary.json",
        json.dumps([s.as_row() | {"n_pairs": s.n_pairs} for s in summaries],
                   indent=2, sort_keys=True) + "\n",
    )
    suffix = "csv" if fmt == "csv" else "md"
    _write(out / f"report.{suffix}", render(summaries, fmt=fmt))


def cmd_evaluate(args) -> int:
    if args.combine_only:
        return _combine_only(args)
    try:
        records = load_manifest(args.manifest)
        cfg = _load_run_config(args)
    except BasicEvalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    out = Path(args.out)
    try:
        scores, failures = evaluate_records(
            records, cfg, only=args.only, workers=args.workers, strict=args.strict
        )
    except RuntimeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    lines = [json.dumps(_pair_to_dict(s), sort_keys=True, default=_json_default) for s in scores]
    _write(out / "pairs.jsonl", "\n".join(lines) + ("\n" if lines else ""))
    summaries = summarize(scores)
    _write_reports(out, summaries, args.format)
    log.info("evaluated %d pairs into %s (%d failures)", len(scores), out, len(failures))
    if failures:
        for failure in failures:
            print(f"failed: {failure}", file=sys.stderr)
        return 1
    return 0


def _combine_only(args) -> int:
    """Recombine stored sub-scores (percentage scale) into BASIC columns."""
    try:
        cfg = _load_run_config(args)
        doc = json.loads(Path(args.manifest).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError, BasicEvalError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if not isinstance(doc, list):
        print("error: combine-only input must be an array of score rows", file=sys.stderr)
        return 2
    summaries = []
    for row in doc:
        kwargs = {k: row.get(k) for k in MethodSummary.__dataclass_fields__ if k in row}
        kwargs.setdefault("n_pairs", 1)
        summary = MethodSummary(**kwargs)
        h = summary.basic_h
        l = summary.basic_l
        if h is None and None not in (summary.obj_f1, summary.attr_f1, summary.rel_f1):
            h = combine_h(summary.obj_f1, summary.attr_f1, summary.rel_f1, cfg.alpha)
        if l is None and None not in (summary.iou_f, summary.iou_s, summary.iou_i, summary.iou_p):
            l = combine_l(summary.iou_f, summary.iou_s, summary.iou_i, summary.iou_p, cfg.beta)
        basic = (h + l) / 2.0 if h is not None and l is not None else None
        summaries.append(
            MethodSummary(**{**summary.as_row(), "n_pairs": summary.n_pairs,
                             "basic_h": h, "basic_l": l, "basic": basic})
        )
    _write_reports(Path(args.out), summaries, args.format)
    log.info("combined %d score rows into %s", len(summaries), args.out)
    return 0


def _parse_grid(entries: list[str]) -> dict[str, list]:
    grid: dict[str, list] = {}
    for entry in entries:
        if "=" not in entry:
            raise ValueError(f"grid entry must be param=v1,v2,...: {entry!r}")
        param, _, values = entry.partition("=")
        param = param.strip()
        raw = [v.strip() for v in values.split(",") if v.strip()]
        if not raw:
            raise ValueError(f"grid entry has no values: {entry!r}")
        if param in GRID_WEIGHT_PARAMS:
            grid[param] = [tuple(float(x) for x in v.split(":")) for v in raw]
        elif param in GRID_DIR_PARAMS or param.endswith("_mode"):
            grid[param] = raw
        else:
            grid[param] = [float(v) for v in raw]
    return grid


def cmd_sweep(args) -> int:
    try:
        grid = _parse_grid(args.grid or [])
        if not grid:
            raise ValueError("sweep requires at least one --grid entry")
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    try:
        records = load_manifest(args.manifest)
        cfg = _load_run_config(args)
    except BasicEvalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        points = sweep(records, cfg, grid, workers=args.workers)
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except RuntimeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    out = Path(args.out)
    blocks = []
    tau_rows = []
    header_lines = 1 if args.format == "csv" else 2
    header_written = False
    for point in points:
        extra = {name: _grid_value_str(point.params[name]) for name in sorted(point.params)}
        extra["tau"] = f"{point.tau:.4f}"
        table = render(point.summaries, fmt=args.format, extra_columns=extra)
        lines = table.splitlines()
        blocks.extend(lines if not header_written else lines[header_lines:])
        header_written = True
        tau_rows.append({"params": {k: _grid_value_str(v) for k, v in point.params.items()},
                         "tau": point.tau})
    suffix = "csv" if args.format == "csv" else "md"
    _write(out / f"sweep.{suffix}", "\n".join(blocks) + "\n")
    _write(out / "sweep_tau.json", json.dumps(tau_rows, indent=2, sort_keys=True) + "\n")
    log.info("swept %d grid points into %s", len(points), out)
    failures = [f for point in points for f in point.failures]
    if failures:
        for failure in failures:
            print(f"failed: {failure}", file=sys.stderr)
        return 1
    return 0


def _grid_value_str(value) -> str:
    if isinstance(value, tuple):
        return ":".join(f"{v:g}" for v in value)
    return str(value)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="basiceval",
        description="Semantic-graph and multigranular-mask scoring for image reconstruction evaluation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--manifest", required=True, help="pair manifest (JSON array)")
        p.add_argument("--config", default=None, help="config file (JSON); defaults apply if omitted")

    p_validate = sub.add_parser("validate", help="check every referenced file against the schemas")
    add_common(p_validate)
    p_validate.set_defaults(func=cmd_validate)

    p_eval = sub.add_parser("evaluate", help="score every pair and write reports")
    add_common(p_eval)
    p_eval.add_argument("--out", required=True, help="output directory")
    p_eval.add_argument("--only", choices=("sem", "seg"), default=None,
                        help="restrict to semantic or segmentation scoring")
    p_eval.add_argument("--workers", type=int, default=1)
    p_eval.add_argument("--strict", action="store_true",
                        help="fail the whole run on the first pair error")
    p_eval.add_argument("--combine-only", action="store_true",
                        help="treat --manifest as stored sub-scores and only recombine them")
    p_eval.add_argument("--format", choices=("csv", "markdown"), default="csv")
    p_eval.set_defaults(func=cmd_evaluate)

    p_sweep = sub.add_parser("sweep", help="re-evaluate over a config grid with rank-stability stats")
    add_common(p_sweep)
    p_sweep.add_argument("--out", required=True)
    p_sweep.add_argument("--workers", type=int, default=1)
    p_sweep.add_argument("--grid", action="append", default=[],
                         metavar="PARAM=V1,V2,...",
                         help="sweep values for one parameter; repeatable")
    p_sweep.add_argument("--format", choices=("csv", "markdown"), default="csv")
    p_sweep.set_defaults(func=cmd_sweep)
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
