"""Shared fixtures: hermetic lexicon/embeddings, file writers, generators."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest

from basiceval import rle
from basiceval.datamodel import EvalConfig
from basiceval.semmatch import EmbeddingTable, SynonymLexicon

FIXTURES = Path(__file__).resolve().parent / "fixtures"

LEXICON_PATH = FIXTURES / "lexicon.json"
EMBEDDINGS_PATH = FIXTURES / "embeddings.txt"


@pytest.fixture(scope="session")
def lexicon() -> SynonymLexicon:
    return SynonymLexicon.load(LEXICON_PATH)


@pytest.fixture(scope="session")
def embeddings() -> EmbeddingTable:
    return EmbeddingTable.load(EMBEDDINGS_PATH)


@pytest.fixture(scope="session")
def cfg() -> EvalConfig:
    return EvalConfig(lexicon_path=str(LEXICON_PATH), embeddings_path=str(EMBEDDINGS_PATH))


def write_json(path: Path, doc) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
    return path


def graph_doc(objects=(), attributes=None, relations=(), scene=(), camera=()) -> dict:
    return {
        "objects": list(objects),
        "attributes": {h: list(a) for h, a in (attributes or {}).items()},
        "relations": [list(r) for r in relations],
        "scene": list(scene),
        "camera": list(camera),
    }


def mask_doc(height: int, width: int, entries: dict[str, list[tuple[str, int, np.ndarray]]]) -> dict:
    granularities = {}
    for g, items in entries.items():
        granularities[g] = [
            {"label": label, "instance": instance, "rle": rle.encode(mask)}
            for label, instance, mask in items
        ]
    return {"height": height, "width": width, "granularities": granularities}


def rect_mask(height: int, width: int, r0: int, c0: int, r1: int, c1: int) -> np.ndarray:
    mask = np.zeros((height, width), dtype=bool)
    mask[r0:r1, c0:c1] = True
    return mask


MASK_VOCAB = ["boat", "tree", "dog", "sky", "water", "grass", "person", "car", "bird", "rock"]
PART_VOCAB = ["head", "leg", "tail", "wing", "roof", "door", "wheel", "window"]


def random_mask(rng: np.random.RandomState, height: int, width: int) -> np.ndarray:
    r0 = rng.randint(0, height)
    c0 = rng.randint(0, width)
    r1 = rng.randint(r0, height) + 1
    c1 = rng.randint(c0, width) + 1
    return rect_mask(height, width, r0, c0, r1, c1)


def random_maskset_doc(rng: np.random.RandomState, height: int = 8, width: int = 8) -> dict:
    labels = list(rng.choice(MASK_VOCAB, size=rng.randint(1, 4), replace=False))
    entries: dict[str, list] = {"F": [], "S": [], "I": [], "P": []}
    for label in labels:
        entries["F"].append((label, 0, random_mask(rng, height, width)))
        entries["S"].append((label, 0, random_mask(rng, height, width)))
        for k in range(rng.randint(1, 3)):
            entries["I"].append((label, k, random_mask(rng, height, width)))
    for part in rng.choice(PART_VOCAB, size=rng.randint(0, 3), replace=False):
        entries["P"].append((str(part), 0, random_mask(rng, height, width)))
    return mask_doc(height, width, entries)


def perturb_graph_doc(rng: np.random.RandomState, doc: dict) -> dict:
    """Candidate-side mutation: rename some objects to fresh tokens."""
    out = json.loads(json.dumps(doc))
    for i, obj in enumerate(out["objects"]):
        if rng.rand() < 0.3:
            fresh = f"zzq{rng.randint(0, 10_000)}"
            out["objects"][i] = fresh
    return out


def perturb_mask_doc(rng: np.random.RandomState, doc: dict) -> dict:
    """Candidate-side mutation: re-draw some masks."""
    out = json.loads(json.dumps(doc))
    height, width = out["height"], out["width"]
    for entries in out["granularities"].values():
        for entry in entries:
            if rng.rand() < 0.5:
                entry["rle"] = rle.encode(random_mask(rng, height, width))
    return out


def build_manifest(
    root: Path,
    methods: list[str],
    n_pairs: int,
    rng: np.random.RandomState,
    identical: bool = True,
    dataset: str = "fixture",
) -> Path:
    """Write a complete evaluation tree (graphs, masks, manifest) under root."""
    records = []
    for method in methods:
        for k in range(n_pairs):
            pair_id = f"{method}-{k:04d}"
            ref_graph = random_graph_doc(rng)
            ref_masks = random_maskset_doc(rng)
            if identical:
                cand_graph, cand_masks = ref_graph, ref_masks
            else:
                cand_graph = perturb_graph_doc(rng, ref_graph)
                cand_masks = perturb_mask_doc(rng, ref_masks)
            write_json(root / "graphs" / f"{pair_id}-cand.json", cand_graph)
            write_json(root / "graphs" / f"{pair_id}-ref.json", ref_graph)
            write_json(root / "masks" / f"{pair_id}-cand.json", cand_masks)
            write_json(root / "masks" / f"{pair_id}-ref.json", ref_masks)
            records.append(
                {
                    "pair_id": pair_id,
                    "method": method,
                    "dataset": dataset,
                    "candidate_graph": f"graphs/{pair_id}-cand.json",
                    "reference_graph": f"graphs/{pair_id}-ref.json",
                    "candidate_masks": f"masks/{pair_id}-cand.json",
                    "reference_masks": f"masks/{pair_id}-ref.json",
                }
            )
    return write_json(root / "manifest.json", records)


GRAPH_VOCAB = ["boat", "water", "tree", "dock", "sky", "person", "dog", "sand", "cloud", "hill"]
ATTR_VOCAB = ["white", "blue", "large", "small", "calm", "wooden", "bright", "soft"]
PRED_VOCAB = ["on", "near", "hold", "float on", "next to", "under"]


def random_graph_doc(rng: np.random.RandomState) -> dict:
    objects = list(rng.choice(GRAPH_VOCAB, size=rng.randint(1, 6), replace=False))
    attributes: dict[str, list[str]] = {}
    for host in objects[: rng.randint(0, len(objects) + 1)]:
        attributes[host] = list(rng.choice(ATTR_VOCAB, size=rng.randint(1, 3), replace=False))
    relations = []
    if len(objects) >= 2:
        for _ in range(rng.randint(0, 3)):
            s, o = rng.choice(objects, size=2, replace=False)
            relations.append([str(s), str(rng.choice(PRED_VOCAB)), str(o)])
    return graph_doc(objects, attributes, relations)
