"""Domain types, file formats, and validated ingestion.

File formats (all JSON):

Graph file
    {"objects": [...], "attributes": {host: [attr, ...]},
     "relations": [[subject, predicate, object], ...],
     "scene": [...], "camera": [...]}
    objects/attributes/relations are required, scene/camera optional.

Annotation file
    {"foreground_objects": [{"object": ..., "semantic_category": ...,
                             "parts": [...]}, ...],
     "background_elements": [{"element": ..., "semantic_category": ...}, ...]}

Mask file
    {"height": H, "width": W,
     "granularities": {"F"|"B"|"S"|"I"|"P":
                       [{"label": ..., "instance": n, "rle": [...]}, ...]}}
    Runs follow the canonical codec in ``rle``. If no B entry is present one
    is synthesized as the pixelwise union of all F entries.

Manifest file
    [{"pair_id": ..., "method": ..., "dataset": ...,
      "candidate_graph": path, "reference_graph": path,
      "candidate_masks": path, "reference_masks": path}, ...]
    Relative paths resolve against the manifest's directory.

Config file
    Flat JSON object with any subset of the EvalConfig fields.

All terms (graph entries, mask labels, lexicon entries) are normalized on
load: lowercased, whitespace collapsed, and the final word stripped of a
plural suffix ("-es" after s/x/z/ch/sh, otherwise a trailing "-s" when the
word is longer than three characters and does not end in "-ss").
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import rle
from .errors import (
    DuplicateEntry,
    MalformedFile,
    SchemaViolation,
)

GRANULARITIES = ("F", "B", "S", "I", "P")

_ES_STEMS = ("s", "x", "z", "ch", "sh")
_WS = re.compile(r"\s+")


def _strip_plural(word: str) -> str:
    if word.endswith("es") and word[:-2].endswith(_ES_STEMS):
        return word[:-2]
    if word.endswith("s") and not word.endswith("ss") and len(word) > 3:
        return word[:-1]
    return word


def normalize_term(term: str) -> str:
    """Canonical form of a free-text term; idempotent."""
    term = _WS.sub(" ", str(term).strip().lower())
    if not term:
        return ""
    words = term.split(" ")
    words[-1] = _strip_plural(words[-1])
    return " ".join(words)


def _require_term(raw: object, what: str) -> str:
    if not isinstance(raw, str):
        raise SchemaViolation(f"{what} must be a string, got {type(raw).__name__}")
    term = normalize_term(raw)
    if not term:
        raise SchemaViolation(f"{what} is empty after normalization: {raw!r}")
    return term


@dataclass(frozen=True)
class SemanticGraph:
    """Objects, attribute bindings, relation triples, and scene/camera
    descriptors extracted from one caption. All terms normalized, all lists
    deduplicated and sorted."""

    objects: tuple[str, ...] = ()
    attributes: tuple[tuple[str, str], ...] = ()
    relations: tuple[tuple[str, str, str], ...] = ()
    scene: tuple[str, ...] = ()
    camera: tuple[str, ...] = ()

    @staticmethod
    def build(objects=(), attributes=(), relations=(), scene=(), camera=()) -> "SemanticGraph":
        """Normalize, deduplicate, and sort raw entries into a graph."""
        objs = sorted({_require_term(o, "object") for o in objects})
        attrs = sorted(
            {(_require_term(h, "attribute host"), _require_term(a, "attribute")) for h, a in attributes}
        )
        rels = []
        for triple in relations:
            triple = tuple(triple)
            if len(triple) != 3:
                raise SchemaViolation(f"relation must have 3 elements, got {len(triple)}: {triple!r}")
            rels.append(tuple(_require_term(t, "relation element") for t in triple))
        return SemanticGraph(
            objects=tuple(objs),
            attributes=tuple(attrs),
            relations=tuple(sorted(set(rels))),
            scene=tuple(sorted({_require_term(s, "scene descriptor") for s in scene})),
            camera=tuple(sorted({_require_term(c, "camera descriptor") for c in camera})),
        )

    def is_empty(self) -> bool:
        return not (self.objects or self.attributes or self.relations or self.scene or self.camera)


@dataclass(frozen=True)
class ForegroundObject:
    object: str
    semantic_category: str
    parts: tuple[str, ...] = ()


@dataclass(frozen=True)
class BackgroundElement:
    element: str
    semantic_category: str


@dataclass(frozen=True)
class GranularityAnnotation:
    """Structured scene annotation: foreground objects with part lists plus
    background elements. Names are kept verbatim (they are used as natural
    language prompts downstream, not as match keys)."""

    foreground_objects: tuple[ForegroundObject, ...] = ()
    background_elements: tuple[BackgroundElement, ...] = ()


@dataclass(frozen=True)
class PromptLabels:
    """Per-granularity label lists derived from an annotation."""

    foreground: tuple[str, ...]
    semantic: tuple[str, ...]
    instance: tuple[str, ...]
    parts: dict[str, tuple[str, ...]]


@dataclass(frozen=True)
class MaskEntry:
    granularity: str
    label: str
    instance: int
    runs: tuple[int, ...]

    def decode(self, height: int, width: int) -> np.ndarray:
        return rle.decode(list(self.runs), height, width)


@dataclass(frozen=True)
class MaskSet:
    """All labeled masks of one image across the five granularities."""

    height: int
    width: int
    entries: tuple[MaskEntry, ...]

    def at(self, granularity: str) -> tuple[MaskEntry, ...]:
        return tuple(e for e in self.entries if e.granularity == granularity)

    def labels(self, granularity: str) -> tuple[str, ...]:
        seen: dict[str, None] = {}
        for e in self.at(granularity):
            seen.setdefault(e.label, None)
        return tuple(seen)

    def mask(self, entry: MaskEntry) -> np.ndarray:
        return entry.decode(self.height, self.width)


@dataclass(frozen=True)
class EvalConfig:
    """Weights, thresholds, matching modes, and resource locations.

    alpha weighs the object/attribute/relation F1 scores; beta weighs the
    F/S/I/P granularity IoUs (B is excluded from the weighted sum). Both are
    normalized to sum 1 before use. box/text thresholds are recorded for
    provenance and sweeps; they are consumed by the mask producer, not here.
    """

    alpha: tuple[float, float, float] = (4.0, 4.0, 2.0)
    beta: tuple[float, float, float, float] = (3.0, 2.5, 2.5, 2.0)
    tau_sem: float = 0.80
    ap_iou_threshold: float = 0.50
    box_threshold: float = 0.25
    text_threshold: float = 0.30
    attribute_mode: str = "host-conditioned"
    relation_mode: str = "endpoint-consistent"
    foreground_mode: str = "category"
    lexicon_path: str | None = None
    embeddings_path: str | None = None

    def __post_init__(self) -> None:
        for name, weights, arity in (("alpha", self.alpha, 3), ("beta", self.beta, 4)):
            if len(weights) != arity:
                raise SchemaViolation(f"{name} must have {arity} entries")
            if any(w < 0 for w in weights):
                raise SchemaViolation(f"{name} weights must be non-negative")
            if sum(weights) <= 0:
                raise SchemaViolation(f"{name} weights must sum to a positive value")
        for name in ("tau_sem", "ap_iou_threshold", "box_threshold", "text_threshold"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise SchemaViolation(f"{name} must be in [0, 1], got {v}")
        if self.attribute_mode not in ("host-conditioned", "unconditioned"):
            raise SchemaViolation(f"unknown attribute_mode: {self.attribute_mode}")
        if self.relation_mode not in ("endpoint-consistent", "triple-string"):
            raise SchemaViolation(f"unknown relation_mode: {self.relation_mode}")
        if self.foreground_mode not in ("category", "union"):
            raise SchemaViolation(f"unknown foreground_mode: {self.foreground_mode}")

    def alpha_normalized(self) -> tuple[float, float, float]:
        s = sum(self.alpha)
        return tuple(w / s for w in self.alpha)

    def beta_normalized(self) -> tuple[float, float, float, float]:
        s = sum(self.beta)
        return tuple(w / s for w in self.beta)

    def with_overrides(self, **kwargs) -> "EvalConfig":
        return replace(self, **kwargs)


@dataclass(frozen=True)
class PairRecord:
    """One (reconstruction, reference) pair to evaluate."""

    pair_id: str
    method: str
    dataset: str
    candidate_graph: str
    reference_graph: str
    candidate_masks: str
    reference_masks: str


def _read_json(path: str | Path) -> object:
    p = Path(path)
    if not p.exists():
        raise MalformedFile(f"file not found: {p}")
    try:
        with open(p, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise MalformedFile(f"{p}: invalid JSON ({exc})") from exc


def _require_list(doc: dict, key: str, path) -> list:
    if key not in doc:
        raise SchemaViolation(f"{path}: missing required field {key!r}")
    value = doc[key]
    if not isinstance(value, list):
        raise SchemaViolation(f"{path}: field {key!r} must be an array")
    return value


def load_graph(path: str | Path) -> SemanticGraph:
    """Load, normalize, and deduplicate a semantic graph file.

    An empty graph is legal input; scores over empty element lists are
    defined by the match layer.
    """
    doc = _read_json(path)
    if not isinstance(doc, dict):
        raise SchemaViolation(f"{path}: graph document must be an object")
    objects = _require_list(doc, "objects", path)
    if "attributes" not in doc:
        raise SchemaViolation(f"{path}: missing required field 'attributes'")
    raw_attrs = doc["attributes"]
    if not isinstance(raw_attrs, dict):
        raise SchemaViolation(f"{path}: field 'attributes' must be a host -> [attr] map")
    attributes = []
    for host, attrs in raw_attrs.items():
        if not isinstance(attrs, list):
            raise SchemaViolation(f"{path}: attributes of {host!r} must be an array")
        attributes.extend((host, a) for a in attrs)
    relations = []
    for entry in _require_list(doc, "relations", path):
        if not isinstance(entry, list) or len(entry) != 3:
            raise SchemaViolation(f"{path}: relation must be an [s, p, o] triple, got {entry!r}")
        relations.append(entry)
    scene = doc.get("scene", [])
    camera = doc.get("camera", [])
    try:
        return SemanticGraph.build(objects, attributes, relations, scene, camera)
    except SchemaViolation as exc:
        raise SchemaViolation(f"{path}: {exc}") from exc


def save_graph(graph: SemanticGraph, path: str | Path) -> None:
    attrs: dict[str, list[str]] = {}
    for host, attr in graph.attributes:
        attrs.setdefault(host, []).append(attr)
    doc = {
        "objects": list(graph.objects),
        "attributes": attrs,
        "relations": [list(r) for r in graph.relations],
        "scene": list(graph.scene),
        "camera": list(graph.camera),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_masks(path: str | Path) -> MaskSet:
    """Load a mask file, verify all invariants, and synthesize the B entry
    (union of all F masks) when absent."""
    doc = _read_json(path)
    if not isinstance(doc, dict):
        raise SchemaViolation(f"{path}: mask document must be an object")
    for key in ("height", "width"):
        if key not in doc or isinstance(doc[key], bool) or not isinstance(doc[key], int) or doc[key] <= 0:
            raise SchemaViolation(f"{path}: {key} must be a positive integer")
    height, width = doc["height"], doc["width"]
    gran = doc.get("granularities", {})
    if not isinstance(gran, dict):
        raise SchemaViolation(f"{path}: 'granularities' must be an object")
    unknown = set(gran) - set(GRANULARITIES)
    if unknown:
        raise SchemaViolation(f"{path}: unknown granularities {sorted(unknown)}")

    entries: list[MaskEntry] = []
    seen: set[tuple[str, str, int]] = set()
    for g in GRANULARITIES:
        for item in gran.get(g, []):
            if not isinstance(item, dict):
                raise SchemaViolation(f"{path}: mask entry must be an object")
            label = _require_term(item.get("label"), f"{path}: {g} label")
            instance = item.get("instance", 0)
            if isinstance(instance, bool) or not isinstance(instance, int) or instance < 0:
                raise SchemaViolation(f"{path}: instance index must be a non-negative integer")
            runs = item.get("rle")
            if not isinstance(runs, list):
                raise SchemaViolation(f"{path}: {g}/{label} rle must be an array")
            try:
                rle.validate(runs, height, width)
            except SchemaViolation as exc:
                raise type(exc)(f"{path}: {g}/{label}#{instance}: {exc}") from exc
            key = (g, label, instance)
            if key in seen:
                raise DuplicateEntry(f"{path}: duplicate mask entry {key}")
            seen.add(key)
            if g in ("F", "B", "S") and instance != 0:
                raise SchemaViolation(f"{path}: {g}/{label} must use instance index 0, got {instance}")
            entries.append(MaskEntry(g, label, instance, tuple(runs)))

    for g in ("I", "P"):
        by_label: dict[str, list[int]] = {}
        for e in entries:
            if e.granularity == g:
                by_label.setdefault(e.label, []).append(e.instance)
        for label, indices in by_label.items():
            if sorted(indices) != list(range(len(indices))):
                raise SchemaViolation(
                    f"{path}: {g}/{label} instance indices {sorted(indices)} are not 0..{len(indices) - 1}"
                )

    b_entries = [e for e in entries if e.granularity == "B"]
    if len(b_entries) > 1:
        raise SchemaViolation(f"{path}: more than one B entry")
    if not b_entries:
        union = np.zeros((height, width), dtype=bool)
        for e in entries:
            if e.granularity == "F":
                union |= e.decode(height, width)
        entries.append(MaskEntry("B", "foreground", 0, tuple(rle.encode(union))))

    return MaskSet(height=height, width=width, entries=tuple(entries))


def load_annotation(path: str | Path) -> GranularityAnnotation:
    doc = _read_json(path)
    if not isinstance(doc, dict):
        raise SchemaViolation(f"{path}: annotation document must be an object")
    fgs = []
    names: set[str] = set()
    for item in doc.get("foreground_objects", []):
        name = item.get("object")
        if not isinstance(name, str) or not name.strip():
            raise SchemaViolation(f"{path}: foreground object name missing")
        name = name.strip()
        if name in names:
            raise SchemaViolation(f"{path}: duplicate foreground object {name!r}")
        names.add(name)
        parts = [p.strip() for p in item.get("parts", [])]
        if len(parts) != len(set(parts)):
            raise SchemaViolation(f"{path}: duplicate part names for {name!r}")
        fgs.append(ForegroundObject(name, str(item.get("semantic_category", "")).strip(), tuple(parts)))
    bgs = []
    names = set()
    for item in doc.get("background_elements", []):
        name = item.get("element")
        if not isinstance(name, str) or not name.strip():
            raise SchemaViolation(f"{path}: background element name missing")
        name = name.strip()
        if name in names:
            raise SchemaViolation(f"{path}: duplicate background element {name!r}")
        names.add(name)
        bgs.append(BackgroundElement(name, str(item.get("semantic_category", "")).strip()))
    return GranularityAnnotation(tuple(fgs), tuple(bgs))


def annotation_to_prompt_labels(annotation: GranularityAnnotation) -> PromptLabels:
    """Label lists handed to the segmenter, per granularity.

    F = foreground object names; S = F plus background element names;
    I = F (the segmenter enumerates instances); P = part lists keyed by
    the owning object.
    """
    f_labels = tuple(fg.object for fg in annotation.foreground_objects)
    s_labels = list(f_labels)
    for bg in annotation.background_elements:
        if bg.element not in s_labels:
            s_labels.append(bg.element)
    parts = {fg.object: fg.parts for fg in annotation.foreground_objects if fg.parts}
    return PromptLabels(
        foreground=f_labels,
        semantic=tuple(s_labels),
        instance=f_labels,
        parts=parts,
    )


_CONFIG_FIELDS = {
    "alpha", "beta", "tau_sem", "ap_iou_threshold", "box_threshold",
    "text_threshold", "attribute_mode", "relation_mode", "foreground_mode",
    "lexicon_path", "embeddings_path",
}


def load_config(path: str | Path) -> EvalConfig:
    doc = _read_json(path)
    if not isinstance(doc, dict):
        raise SchemaViolation(f"{path}: config document must be an object")
    unknown = set(doc) - _CONFIG_FIELDS
    if unknown:
        raise SchemaViolation(f"{path}: unknown config keys {sorted(unknown)}")
    kwargs = dict(doc)
    for key in ("alpha", "beta"):
        if key in kwargs:
            kwargs[key] = tuple(float(v) for v in kwargs[key])
    try:
        return EvalConfig(**kwargs)
    except SchemaViolation as exc:
        raise SchemaViolation(f"{path}: {exc}") from exc


def load_manifest(path: str | Path) -> list[PairRecord]:
    """Load a manifest; relative artifact paths resolve against the manifest
    directory. pair_ids must be unique."""
    doc = _read_json(path)
    if not isinstance(doc, list):
        raise SchemaViolation(f"{path}: manifest must be an array of pair records")
    base = Path(path).resolve().parent
    records = []
    seen_ids: set[str] = set()
    required = ("pair_id", "method", "dataset", "candidate_graph",
                "reference_graph", "candidate_masks", "reference_masks")
    for i, item in enumerate(doc):
        if not isinstance(item, dict):
            raise SchemaViolation(f"{path}: record {i} must be an object")
        missing = [k for k in required if k not in item]
        if missing:
            raise SchemaViolation(f"{path}: record {i} missing fields {missing}")
        pair_id = str(item["pair_id"])
        if pair_id in seen_ids:
            raise SchemaViolation(f"{path}: duplicate pair_id {pair_id!r}")
        seen_ids.add(pair_id)

        def _resolve(p: str) -> str:
            q = Path(p)
            return str(q if q.is_absolute() else base / q)

        records.append(
            PairRecord(
                pair_id=pair_id,
                method=str(item["method"]),
                dataset=str(item["dataset"]),
                candidate_graph=_resolve(item["candidate_graph"]),
                reference_graph=_resolve(item["reference_graph"]),
                candidate_masks=_resolve(item["candidate_masks"]),
                reference_masks=_resolve(item["reference_masks"]),
            )
        )
    return records
