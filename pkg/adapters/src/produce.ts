/**
 * Production pipelines: image -> graph file (caption, parse, consolidate)
 * and image + annotation -> mask file (prompted segmentation, threshold
 * filtering, run-length encoding, B synthesis).
 */

import {
  AnnotationFile,
  Detection,
  GraphFile,
  MaskEntry,
  MaskFile,
  ProducerBackend,
  ProducerConfig,
} from './formats.js';
import { normalizeTerm } from './normalize.js';
import { emptyMask, encodeMask, paintBox, unionInto } from './rle.js';

export function splitSentences(caption: string): string[] {
  return caption
    .split(/[.!?]/)
    .map((s) => s.trim())
    .filter((s) => s.length > 0);
}

export async function produceGraph(
  imagePath: string,
  cfg: ProducerConfig,
  backend: ProducerBackend,
): Promise<GraphFile> {
  const caption = await backend.caption(imagePath, cfg.descriptionPrompt);
  const sentences = splitSentences(caption);
  if (sentences.length === 0) {
    console.warn(`empty caption for ${imagePath}; emitting empty graph`);
  }
  const parses = sentences.length > 0 ? await backend.parse(sentences) : [];

  const objects = new Set<string>();
  const attributes = new Map<string, Set<string>>();
  const relations = new Set<string>();
  for (const parse of parses) {
    for (const objectName of parse.objects) {
      const term = normalizeTerm(objectName);
      if (term) {
        objects.add(term);
      }
    }
    for (const [host, attr] of parse.attributes) {
      const hostTerm = normalizeTerm(host);
      const attrTerm = normalizeTerm(attr);
      if (hostTerm && attrTerm) {
        if (!attributes.has(hostTerm)) {
          attributes.set(hostTerm, new Set());
        }
        attributes.get(hostTerm)!.add(attrTerm);
      }
    }
    for (const triple of parse.relations) {
      const normalized = triple.map(normalizeTerm);
      if (normalized.every((t) => t.length > 0)) {
        relations.add(JSON.stringify(normalized));
      }
    }
  }

  const attributeRecord: Record<string, string[]> = {};
  for (const host of [...attributes.keys()].sort()) {
    attributeRecord[host] = [...attributes.get(host)!].sort();
  }
  return {
    objects: [...objects].sort(),
    attributes: attributeRecord,
    relations: [...relations]
      .sort()
      .map((s) => JSON.parse(s) as [string, string, string]),
  };
}

export async function produceAnnotation(
  imagePath: string,
  cfg: ProducerConfig,
  backend: ProducerBackend,
): Promise<AnnotationFile> {
  return AnnotationFile.parse(await backend.annotate(imagePath, cfg.categorizationPrompt));
}

function surviving(detections: Detection[], cfg: ProducerConfig): Detection[] {
  return detections.filter(
    (d) => d.score >= cfg.boxThreshold && d.textScore >= cfg.textThreshold,
  );
}

interface LabeledMasks {
  label: string;
  masks: boolean[][][];
}

async function detectLabels(
  imagePath: string,
  rawLabels: string[],
  cfg: ProducerConfig,
  backend: ProducerBackend,
  height: number,
  width: number,
): Promise<LabeledMasks[]> {
  // merge labels that normalize to the same term before detection so the
  // emitted (granularity, label, instance) keys stay unique downstream
  const byTerm = new Map<string, string>();
  for (const raw of rawLabels) {
    const term = normalizeTerm(raw);
    if (term && !byTerm.has(term)) {
      byTerm.set(term, raw);
    }
  }
  const out: LabeledMasks[] = [];
  for (const [term, raw] of [...byTerm.entries()].sort()) {
    const detections = surviving(
      await backend.segment(imagePath, raw, height, width),
      cfg,
    );
    if (detections.length === 0) {
      continue; // labels with no surviving detection are omitted
    }
    const masks = detections.map((d) => {
      const mask = emptyMask(height, width);
      paintBox(mask, d.box);
      return mask;
    });
    out.push({ label: term, masks });
  }
  return out;
}

function categoryEntry(labeled: LabeledMasks): MaskEntry {
  const union = emptyMask(labeled.masks[0].length, labeled.masks[0][0].length);
  for (const mask of labeled.masks) {
    unionInto(union, mask);
  }
  return { label: labeled.label, instance: 0, rle: encodeMask(union) };
}

export async function produceMasks(
  imagePath: string,
  annotation: AnnotationFile,
  cfg: ProducerConfig,
  backend: ProducerBackend,
  height = 64,
  width = 64,
): Promise<MaskFile> {
  const foregroundLabels = annotation.foreground_objects.map((o) => o.object);
  const backgroundLabels = annotation.background_elements.map((e) => e.element);
  const partLabels = annotation.foreground_objects.flatMap((o) => o.parts);

  const foreground = await detectLabels(imagePath, foregroundLabels, cfg, backend, height, width);
  const foregroundTerms = new Set(foregroundLabels.map(normalizeTerm));
  const semanticExtra = await detectLabels(
    imagePath,
    backgroundLabels.filter((l) => !foregroundTerms.has(normalizeTerm(l))),
    cfg,
    backend,
    height,
    width,
  );
  const parts = await detectLabels(imagePath, partLabels, cfg, backend, height, width);

  const fEntries = foreground.map(categoryEntry);
  const sEntries = [...foreground, ...semanticExtra]
    .sort((a, b) => (a.label < b.label ? -1 : 1))
    .map(categoryEntry);
  const iEntries: MaskEntry[] = [];
  for (const labeled of foreground) {
    labeled.masks.forEach((mask, index) => {
      iEntries.push({ label: labeled.label, instance: index, rle: encodeMask(mask) });
    });
  }
  const pEntries: MaskEntry[] = [];
  for (const labeled of parts) {
    labeled.masks.forEach((mask, index) => {
      pEntries.push({ label: labeled.label, instance: index, rle: encodeMask(mask) });
    });
  }

  const union = emptyMask(height, width);
  for (const labeled of foreground) {
    for (const mask of labeled.masks) {
      unionInto(union, mask);
    }
  }
  const bEntries: MaskEntry[] = [
    { label: 'foreground', instance: 0, rle: encodeMask(union) },
  ];

  return {
    height,
    width,
    granularities: { F: fEntries, B: bEntries, S: sEntries, I: iEntries, P: pEntries },
  };
}
