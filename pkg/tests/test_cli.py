"""End-to-end CLI behavior: exit codes, outputs, determinism."""

import csv
import io
import json

import numpy as np
import pytest

from basiceval.cli import main

from conftest import (
    EMBEDDINGS_PATH,
    FIXTURES,
    LEXICON_PATH,
    build_manifest,
    write_json,
)


@pytest.fixture()
def config_path(tmp_path):
    return write_json(
        tmp_path / "config.json",
        {"lexicon_path": str(LEXICON_PATH), "embeddings_path": str(EMBEDDINGS_PATH)},
    )


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


class TestValidate:
    def test_clean_manifest(self, tmp_path, config_path, capsys):
        manifest = build_manifest(tmp_path, ["m1"], 2, np.random.RandomState(0))
        code = main(["validate", "--manifest", str(manifest), "--config", str(config_path)])
        assert code == 0
        assert "0 problems" in capsys.readouterr().out

    def test_rle_mismatch_diagnosed(self, tmp_path, config_path, capsys):
        manifest = build_manifest(tmp_path, ["m1"], 2, np.random.RandomState(0))
        bad = tmp_path / "masks" / "m1-0001-cand.json"
        doc = json.loads(bad.read_text())
        first_granularity = next(iter(doc["granularities"]))
        doc["granularities"][first_granularity][0]["rle"] = [2, 3]
        bad.write_text(json.dumps(doc), encoding="utf-8")
        code = main(["validate", "--manifest", str(manifest), "--config", str(config_path)])
        out = capsys.readouterr().out
        assert code == 1
        diagnostics = [line for line in out.splitlines() if "m1-0001" in line]
        assert len(diagnostics) == 1
        assert "candidate_masks" in diagnostics[0]

    def test_missing_graph_file(self, tmp_path, config_path, capsys):
        manifest = build_manifest(tmp_path, ["m1"], 1, np.random.RandomState(0))
        (tmp_path / "graphs" / "m1-0000-ref.json").unlink()
        code = main(["validate", "--manifest", str(manifest), "--config", str(config_path)])
        assert code == 1
        assert "file not found" in capsys.readouterr().out

    def test_unreadable_manifest(self, tmp_path, config_path, capsys):
        bad = tmp_path / "manifest.json"
        bad.write_text("{broken", encoding="utf-8")
        code = main(["validate", "--manifest", str(bad), "--config", str(config_path)])
        assert code == 2


class TestEvaluate:
    def test_identical_pairs_score_100(self, tmp_path, config_path):
        manifest = build_manifest(tmp_path, ["m1", "m2", "m3"], 2, np.random.RandomState(1))
        out = tmp_path / "out"
        code = main([
            "evaluate", "--manifest", str(manifest), "--config", str(config_path),
            "--out", str(out),
        ])
        assert code == 0
        rows = read_csv(out / "report.csv")
        assert len(rows) == 3
        for row in rows:
            assert row["basic_h"] == "100.00"
            assert row["basic_l"] == "100.00"
            assert row["basic"] == "100.00"

    def test_worker_count_determinism(self, tmp_path, config_path):
        manifest = build_manifest(tmp_path, ["m1", "m2"], 4, np.random.RandomState(2), identical=False)
        out1, out8 = tmp_path / "w1", tmp_path / "w8"
        assert main(["evaluate", "--manifest", str(manifest), "--config", str(config_path),
                     "--out", str(out1), "--workers", "1"]) == 0
        assert main(["evaluate", "--manifest", str(manifest), "--config", str(config_path),
                     "--out", str(out8), "--workers", "8"]) == 0
        for name in ("pairs.jsonl", "summary.json", "report.csv"):
            assert (out1 / name).read_bytes() == (out8 / name).read_bytes()

    def test_only_scopes(self, tmp_path, config_path):
        manifest = build_manifest(tmp_path, ["m1"], 1, np.random.RandomState(3))
        out_sem = tmp_path / "sem"
        out_seg = tmp_path / "seg"
        assert main(["evaluate", "--manifest", str(manifest), "--config", str(config_path),
                     "--out", str(out_sem), "--only", "sem"]) == 0
        assert main(["evaluate", "--manifest", str(manifest), "--config", str(config_path),
                     "--out", str(out_seg), "--only", "seg"]) == 0
        (sem_row,) = read_csv(out_sem / "report.csv")
        (seg_row,) = read_csv(out_seg / "report.csv")
        assert sem_row["basic_h"] == "100.00" and sem_row["basic_l"] == ""
        assert seg_row["basic_l"] == "100.00" and seg_row["basic_h"] == ""
        assert sem_row["basic"] == "" and seg_row["basic"] == ""

    def test_corrupt_pair_is_isolated(self, tmp_path, config_path, capsys):
        manifest = build_manifest(tmp_path, ["m1"], 3, np.random.RandomState(4))
        (tmp_path / "graphs" / "m1-0001-cand.json").write_text("{oops", encoding="utf-8")
        out = tmp_path / "out"
        code = main(["evaluate", "--manifest", str(manifest), "--config", str(config_path),
                     "--out", str(out)])
        assert code == 1
        assert "m1-0001" in capsys.readouterr().err
        lines = (out / "pairs.jsonl").read_text().strip().splitlines()
        assert len(lines) == 2  # the other pairs are still scored
        ids = {json.loads(line)["pair_id"] for line in lines}
        assert ids == {"m1-0000", "m1-0002"}

    def test_strict_aborts(self, tmp_path, config_path, capsys):
        manifest = build_manifest(tmp_path, ["m1"], 2, np.random.RandomState(5))
        (tmp_path / "graphs" / "m1-0000-cand.json").write_text("{oops", encoding="utf-8")
        out = tmp_path / "out"
        code = main(["evaluate", "--manifest", str(manifest), "--config", str(config_path),
                     "--out", str(out), "--strict"])
        assert code == 1
        assert not (out / "pairs.jsonl").exists()

    def test_combine_only_reproduces_reference_columns(self, tmp_path, config_path):
        out = tmp_path / "combined"
        code = main([
            "evaluate", "--combine-only",
            "--manifest", str(FIXTURES / "nsd_subscores.json"),
            "--config", str(config_path),
            "--out", str(out),
        ])
        assert code == 0
        rows = {r["method"]: r for r in read_csv(out / "report.csv")}
        assert float(rows["SDRecon"]["basic_h"]) == pytest.approx(35.31, abs=0.01)
        assert float(rows["DREAM"]["basic_h"]) == pytest.approx(46.37, abs=0.01)
        assert float(rows["SDRecon"]["basic_l"]) == pytest.approx(11.81, abs=0.03)
        assert float(rows["NeuroPictor"]["basic_l"]) == pytest.approx(25.88, abs=0.03)
        assert float(rows["NeuroPictor"]["basic"]) == pytest.approx(35.045, abs=0.03)
        assert float(rows["EEG2Video"]["basic_l"]) == pytest.approx(20.54, abs=0.03)

    def test_markdown_format(self, tmp_path, config_path):
        manifest = build_manifest(tmp_path, ["m1"], 1, np.random.RandomState(6))
        out = tmp_path / "out"
        assert main(["evaluate", "--manifest", str(manifest), "--config", str(config_path),
                     "--out", str(out), "--format", "markdown"]) == 0
        assert (out / "report.md").exists()
        assert (out / "report.md").read_text().startswith("| method |")


class TestSweepCommand:
    def test_tau_grid(self, tmp_path, config_path):
        manifest = build_manifest(tmp_path, ["m1", "m2"], 2, np.random.RandomState(7), identical=False)
        out = tmp_path / "sweep"
        code = main(["sweep", "--manifest", str(manifest), "--config", str(config_path),
                     "--out", str(out), "--grid", "tau_sem=0.7,0.8,0.9"])
        assert code == 0
        taus = json.loads((out / "sweep_tau.json").read_text())
        assert len(taus) == 3
        rows = read_csv(out / "sweep.csv")
        assert len(rows) == 3 * 2  # 3 grid points x 2 methods
        assert {row["tau_sem"] for row in rows} == {"0.7", "0.8", "0.9"}

    def test_empty_grid_usage_error(self, tmp_path, config_path):
        manifest = build_manifest(tmp_path, ["m1"], 1, np.random.RandomState(8))
        code = main(["sweep", "--manifest", str(manifest), "--config", str(config_path),
                     "--out", str(tmp_path / "o")])
        assert code == 2

    def test_markdown_long_form(self, tmp_path, config_path):
        manifest = build_manifest(tmp_path, ["m1"], 1, np.random.RandomState(10))
        out = tmp_path / "sweep"
        code = main(["sweep", "--manifest", str(manifest), "--config", str(config_path),
                     "--out", str(out), "--grid", "tau_sem=0.7,0.9", "--format", "markdown"])
        assert code == 0
        text = (out / "sweep.md").read_text()
        assert text.startswith("| tau_sem | tau |")
        assert text.count("| m1 |") == 2  # one data row per grid point, one header

    def test_attribute_mode_isolation(self, tmp_path, config_path):
        manifest = build_manifest(tmp_path, ["m1"], 2, np.random.RandomState(9), identical=False)
        out = tmp_path / "sweep"
        code = main(["sweep", "--manifest", str(manifest), "--config", str(config_path),
                     "--out", str(out), "--grid", "attribute_mode=host-conditioned,unconditioned"])
        assert code == 0
        rows = read_csv(out / "sweep.csv")
        assert len(rows) == 2
        assert rows[0]["obj_f1"] == rows[1]["obj_f1"]
        assert rows[0]["iou_f"] == rows[1]["iou_f"]
