"""Aggregation, rank stability, sweeps, and report rendering."""

import csv
import io
import json

import numpy as np
import pytest

from basiceval.datamodel import EvalConfig, load_manifest
from basiceval.errors import EmptyInput, MismatchedSets, MixedMethods
from basiceval.evaluate import PairScores, evaluate_records
from basiceval.maskmatch import GranularityScore, GranularityScores
from basiceval.report import (
    CSV_COLUMNS,
    aggregate,
    kendall_tau,
    ranking,
    render,
    summarize,
    sweep,
)
from basiceval.semmatch import MatchReport, TypeMatch

from conftest import EMBEDDINGS_PATH, LEXICON_PATH, build_manifest


def type_match(f1: float, precision: float = None, recall: float = None,
               matched: int = 0, cand: int = 0, ref: int = 0) -> TypeMatch:
    p = f1 if precision is None else precision
    r = f1 if recall is None else recall
    return TypeMatch(pairs=(), n_matched=matched, n_candidate=cand, n_reference=ref,
                     precision=p, recall=r, f1=f1)


def make_pair(pair_id: str, method: str, basic_h: float, basic_l: float,
              obj_f1: float = 0.5, dataset: str = "d") -> PairScores:
    semantic = MatchReport(
        object=type_match(obj_f1, matched=1, cand=2, ref=2),
        attribute=type_match(0.25),
        relation=type_match(0.4),
        scene=type_match(1.0),
        camera=type_match(1.0),
        basic_h=basic_h,
    )
    gs = GranularityScore(iou=basic_l / 100.0, ap=0.5)
    structural = GranularityScores(f=gs, b=gs, s=gs, i=gs, p=gs, basic_l=basic_l)
    return PairScores(pair_id=pair_id, method=method, dataset=dataset,
                      semantic=semantic, structural=structural)


class TestAggregate:
    def test_single_pair_passthrough(self):
        pair = make_pair("p1", "m", basic_h=44.21, basic_l=25.88)
        summary = aggregate([pair])
        assert summary.basic_h == pytest.approx(44.21)
        assert summary.basic_l == pytest.approx(25.88)
        assert summary.basic == pytest.approx(35.045)
        assert summary.n_pairs == 1

    def test_mean_of_two(self):
        pairs = [
            make_pair("p1", "m", 40.0, 20.0, obj_f1=0.4),
            make_pair("p2", "m", 50.0, 30.0, obj_f1=0.6),
        ]
        summary = aggregate(pairs)
        assert summary.obj_f1 == pytest.approx(50.0)
        assert summary.basic_h == pytest.approx(45.0)
        assert summary.basic == pytest.approx((45.0 + 25.0) / 2)

    def test_permutation_invariant(self):
        pairs = [make_pair(f"p{i}", "m", 40.0 + i, 20.0 + i) for i in range(5)]
        assert aggregate(pairs) == aggregate(list(reversed(pairs)))

    def test_empty_input(self):
        with pytest.raises(EmptyInput):
            aggregate([])

    def test_mixed_methods(self):
        with pytest.raises(MixedMethods):
            aggregate([make_pair("p1", "a", 40, 20), make_pair("p2", "b", 40, 20)])

    def test_pooled_counts_mode(self):
        pairs = [
            make_pair("p1", "m", 40.0, 20.0),
            make_pair("p2", "m", 50.0, 30.0),
        ]
        pooled = aggregate(pairs, pooled=True, alpha=(4, 4, 2))
        # counts pool to 2 matched / 4 candidate / 4 reference
        assert pooled.obj_p == pytest.approx(50.0)
        assert pooled.basic_h is not None

    def test_combined_contract(self):
        summary = aggregate([make_pair("p", "NeuroPictor", 44.21, 25.88)])
        assert summary.basic == pytest.approx((summary.basic_h + summary.basic_l) / 2)


class TestKendallTau:
    def test_identical(self):
        assert kendall_tau(list("abcde"), list("abcde")) == 1.0

    def test_reversed(self):
        assert kendall_tau(list("abcde"), list("edcba")) == -1.0

    def test_one_swap(self):
        assert kendall_tau([1, 2, 3, 4], [1, 3, 2, 4]) == pytest.approx(4 / 6)

    def test_mismatched_sets(self):
        with pytest.raises(MismatchedSets):
            kendall_tau([1, 2], [1, 3])

    def test_ranking_tie_break_by_name(self):
        pairs = [make_pair("p1", "beta", 40, 20), make_pair("p2", "alpha", 40, 20)]
        summaries = summarize(pairs)
        assert ranking(summaries) == ["alpha", "beta"]


class TestRender:
    def test_csv_header_contract(self):
        text = render([make_pair("p", "m", 40, 20)] and summarize([make_pair("p", "m", 40, 20)]))
        header = text.splitlines()[0]
        assert header == ",".join(CSV_COLUMNS)
        assert header == (
            "method,dataset,obj_p,obj_r,obj_f1,attr_p,attr_r,attr_f1,"
            "rel_p,rel_r,rel_f1,iou_f,ap_f,iou_b,ap_b,iou_s,ap_s,iou_i,ap_i,"
            "iou_p,ap_p,basic_h,basic_l,basic"
        )

    def test_single_summary_two_lines(self):
        text = render(summarize([make_pair("p", "m", 40, 20)]))
        assert len(text.strip().splitlines()) == 2

    def test_csv_round_trip_two_decimals(self):
        summaries = summarize(
            [make_pair("p1", "m", 44.214, 25.883), make_pair("p2", "m", 44.214, 25.883)]
        )
        text = render(summaries)
        (row,) = list(csv.DictReader(io.StringIO(text)))
        for column in CSV_COLUMNS[2:]:
            rendered = float(row[column])
            original = getattr(summaries[0], column)
            assert rendered == pytest.approx(original, abs=0.005)

    def test_markdown_bolds_leader(self):
        from basiceval.report import MethodSummary

        def summary(method: str, scale: float) -> MethodSummary:
            values = {c: scale * (i + 1) for i, c in enumerate(CSV_COLUMNS[2:])}
            return MethodSummary(method=method, dataset="d", n_pairs=1, **values)

        text = render([summary("winner", 2.0), summary("loser", 1.0)], fmt="markdown")
        winner_row = next(line for line in text.splitlines() if "winner" in line)
        loser_row = next(line for line in text.splitlines() if "loser" in line)
        # winner leads every numeric column, so every one of its cells is bold
        assert winner_row.count("**") == 2 * len(CSV_COLUMNS[2:])
        assert "**" not in loser_row


@pytest.fixture(scope="module")
def tree(tmp_path_factory):
    root = tmp_path_factory.mktemp("sweeptree")
    rng = np.random.RandomState(5)
    manifest = build_manifest(root, ["alpha_m", "beta_m"], 2, rng, identical=False)
    records = load_manifest(manifest)
    cfg = EvalConfig(lexicon_path=str(LEXICON_PATH), embeddings_path=str(EMBEDDINGS_PATH))
    return records, cfg


class TestSweep:
    def test_single_point_base_grid(self, tree):
        records, cfg = tree
        (point,) = sweep(records, cfg, {"tau_sem": [cfg.tau_sem]})
        assert point.tau == 1.0

    def test_alpha_rescale_is_noop(self, tree):
        records, cfg = tree
        (point,) = sweep(records, cfg, {"alpha": [(8.0, 8.0, 4.0)]})
        base_scores, _ = evaluate_records(records, cfg)
        base = summarize(base_scores)
        for before, after in zip(base, point.summaries):
            assert after.basic_h == pytest.approx(before.basic_h)
        assert point.tau == 1.0

    def test_mode_isolation(self, tree):
        records, cfg = tree
        points = sweep(records, cfg, {"attribute_mode": ["host-conditioned", "unconditioned"]})
        assert len(points) == 2
        for left, right in zip(points[0].summaries, points[1].summaries):
            assert left.obj_p == right.obj_p
            assert left.obj_f1 == right.obj_f1
            assert left.iou_f == right.iou_f

    def test_grid_product(self, tree):
        records, cfg = tree
        points = sweep(records, cfg, {"tau_sem": [0.7, 0.9], "ap_iou_threshold": [0.5]})
        assert len(points) == 2
        for point in points:
            assert -1.0 <= point.tau <= 1.0

    def test_empty_grid_rejected(self, tree):
        records, cfg = tree
        with pytest.raises(ValueError):
            sweep(records, cfg, {})

    def test_unknown_param_rejected(self, tree):
        records, cfg = tree
        with pytest.raises(ValueError):
            sweep(records, cfg, {"bogus": [1]})

    def test_seg_only_params_leave_basic_l_bit_identical(self, tree):
        records, cfg = tree
        points = sweep(records, cfg, {"tau_sem": [0.5, 0.95]})
        for left, right in zip(points[0].summaries, points[1].summaries):
            assert left.basic_l == right.basic_l
            assert left.iou_i == right.iou_i

    def test_mask_source_directory_grid(self, tmp_path):
        # masks produced under two settings live in two directories; sweeping
        # mask_dir re-scores structure only
        import shutil

        from basiceval.datamodel import load_masks
        from basiceval import rle as rle_codec
        from conftest import random_mask

        rng = np.random.RandomState(17)
        manifest = build_manifest(tmp_path, ["m1", "m2"], 2, rng, identical=False)
        records = load_manifest(manifest)
        alt = tmp_path / "masks_alt"
        shutil.copytree(tmp_path / "masks", alt)
        for mask_file in alt.glob("*-cand.json"):
            doc = json.loads(mask_file.read_text())
            for entries in doc["granularities"].values():
                for entry in entries:
                    entry["rle"] = rle_codec.encode(random_mask(rng, doc["height"], doc["width"]))
            mask_file.write_text(json.dumps(doc), encoding="utf-8")

        cfg = EvalConfig(lexicon_path=str(LEXICON_PATH), embeddings_path=str(EMBEDDINGS_PATH))
        points = sweep(records, cfg, {"mask_dir": [str(tmp_path / "masks"), str(alt)]})
        assert len(points) == 2
        for left, right in zip(points[0].summaries, points[1].summaries):
            assert left.basic_h == right.basic_h
            assert left.basic_l != right.basic_l
