/**
 * Schemas for the files this package emits (graph, annotation, masks) and
 * for the producer configuration. The file shapes are the scoring engine's
 * external interface; emitted documents must pass `basiceval validate`
 * with zero diagnostics.
 */

import { z } from 'zod';

export const GraphFile = z.object({
  objects: z.array(z.string()),
  attributes: z.record(z.string(), z.array(z.string())),
  relations: z.array(z.tuple([z.string(), z.string(), z.string()])),
  scene: z.array(z.string()).optional(),
  camera: z.array(z.string()).optional(),
});
export type GraphFile = z.infer<typeof GraphFile>;

export const AnnotationFile = z.object({
  foreground_objects: z.array(
    z.object({
      object: z.string().min(1),
      semantic_category: z.string(),
      parts: z.array(z.string()),
    }),
  ),
  background_elements: z.array(
    z.object({
      element: z.string().min(1),
      semantic_category: z.string(),
    }),
  ),
});
export type AnnotationFile = z.infer<typeof AnnotationFile>;

export const MaskEntry = z.object({
  label: z.string().min(1),
  instance: z.number().int().nonnegative(),
  rle: z.array(z.number().int().nonnegative()),
});
export type MaskEntry = z.infer<typeof MaskEntry>;

export const MaskFile = z.object({
  height: z.number().int().positive(),
  width: z.number().int().positive(),
  granularities: z.object({
    F: z.array(MaskEntry).optional(),
    B: z.array(MaskEntry).optional(),
    S: z.array(MaskEntry).optional(),
    I: z.array(MaskEntry).optional(),
    P: z.array(MaskEntry).optional(),
  }),
});
export type MaskFile = z.infer<typeof MaskFile>;

export const DEFAULT_DESCRIPTION_PROMPT = 'Describe the image in detail.';

export const DEFAULT_CATEGORIZATION_PROMPT = [
  'You are a visual understanding assistant. Analyze the input image and',
  'return a structured categorization as JSON with two keys:',
  '"foreground_objects": the main objects, each with "object",',
  '"semantic_category", and a "parts" array naming its visible components',
  'in general terms; "background_elements": the surrounding elements, each',
  'with "element" and "semantic_category". Return only the JSON object.',
].join(' ');

export const ProducerConfig = z.object({
  captionerId: z.string().default('mock-captioner'),
  parserId: z.string().default('mock-parser'),
  segmenterId: z.string().default('mock-segmenter'),
  descriptionPrompt: z.string().min(1).default(DEFAULT_DESCRIPTION_PROMPT),
  categorizationPrompt: z.string().min(1).default(DEFAULT_CATEGORIZATION_PROMPT),
  boxThreshold: z.number().min(0).max(1).default(0.25),
  textThreshold: z.number().min(0).max(1).default(0.3),
});
export type ProducerConfig = z.infer<typeof ProducerConfig>;

/** One detection returned by a segmenter for a text prompt. */
export interface Detection {
  /** box similarity score in [0, 1]; filtered by boxThreshold */
  score: number;
  /** word similarity score in [0, 1]; filtered by textThreshold */
  textScore: number;
  /** pixel box [rowStart, colStart, rowEnd, colEnd), clipped by caller */
  box: [number, number, number, number];
}

/** Raw parse elements for one sentence. */
export interface SentenceParse {
  objects: string[];
  attributes: Array<[string, string]>;
  relations: Array<[string, string, string]>;
}

/** The three external producers behind one interface. */
export interface ProducerBackend {
  caption(imagePath: string, prompt: string): Promise<string>;
  parse(sentences: string[]): Promise<SentenceParse[]>;
  annotate(imagePath: string, prompt: string): Promise<AnnotationFile>;
  segment(
    imagePath: string,
    label: string,
    height: number,
    width: number,
  ): Promise<Detection[]>;
}

export class ModelUnavailable extends Error {
  constructor(message: string) {
    super(message);
    this.name = 'ModelUnavailable';
  }
}
