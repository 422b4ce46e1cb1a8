#!/usr/bin/env node
/**
 * Producer adapter CLI. Runs the captioner / parser / segmenter backends on
 * images (or video-frame / rendered-view directories) and writes the
 * canonical graph, annotation, and mask files the scoring engine consumes.
 *
 * Usage:
 *   node dist/cli.js produce-graph --image img.png --out graph.json
 *   node dist/cli.js produce-annotation --image img.png --out annotation.json
 *   node dist/cli.js produce-masks --image img.png --annotation annotation.json --out masks.json
 *   node dist/cli.js produce-batch --images list.json --out-dir run/
 *
 * The default backend is the deterministic mock; pass --backend http with
 * --endpoint to talk to real model servers.
 */

import { mkdir, readFile, writeFile } from 'node:fs/promises';
import { dirname, join } from 'node:path';

import yargs from 'yargs';
import { hideBin } from 'yargs/helpers';

import { ModelUnavailable, ProducerBackend, ProducerConfig } from './formats.js';
import { InputKind, selectRepresentative } from './frames.js';
import { HttpBackend } from './http.js';
import { MockBackend } from './mock.js';
import { produceAnnotation, produceGraph, produceMasks } from './produce.js';

interface CommonFlags {
  backend: string;
  endpoint?: string;
  captionerId: string;
  parserId: string;
  segmenterId: string;
  boxThreshold: number;
  textThreshold: number;
  kind: InputKind;
}

function makeBackend(flags: CommonFlags): ProducerBackend {
  if (flags.backend === 'http') {
    if (!flags.endpoint) {
      throw new Error('--endpoint is required with --backend http');
    }
    return new HttpBackend({
      endpoint: flags.endpoint,
      captionerId: flags.captionerId,
      parserId: flags.parserId,
      segmenterId: flags.segmenterId,
    });
  }
  return new MockBackend();
}

function makeConfig(flags: CommonFlags): ProducerConfig {
  return ProducerConfig.parse({
    captionerId: flags.captionerId,
    parserId: flags.parserId,
    segmenterId: flags.segmenterId,
    boxThreshold: flags.boxThreshold,
    textThreshold: flags.textThreshold,
  });
}

async function writeJson(path: string, doc: unknown): Promise<void> {
  await mkdir(dirname(path), { recursive: true });
  await writeFile(path, `${JSON.stringify(doc, null, 2)}\n`, 'utf-8');
}

const commonOptions = {
  backend: { type: 'string' as const, choices: ['mock', 'http'], default: 'mock' },
  endpoint: { type: 'string' as const, describe: 'model server base URL (http backend)' },
  'captioner-id': { type: 'string' as const, default: 'mock-captioner' },
  'parser-id': { type: 'string' as const, default: 'mock-parser' },
  'segmenter-id': { type: 'string' as const, default: 'mock-segmenter' },
  'box-threshold': { type: 'number' as const, default: 0.25 },
  'text-threshold': { type: 'number' as const, default: 0.3 },
  kind: {
    type: 'string' as const,
    choices: ['image', 'video', 'shape'],
    default: 'image',
    describe: 'input kind; video/shape inputs are frame directories',
  },
};

export async function run(argv: string[]): Promise<number> {
  try {
    await yargs(argv)
      .scriptName('basiceval-adapters')
      .command(
        'produce-graph',
        'caption an image, parse it, and write a semantic graph file',
        { ...commonOptions, image: { type: 'string', demandOption: true }, out: { type: 'string', demandOption: true } },
        async (flags) => {
          const frame = selectRepresentative(flags.image, flags.kind as InputKind);
          const graph = await produceGraph(frame, makeConfig(flags as unknown as CommonFlags), makeBackend(flags as unknown as CommonFlags));
          await writeJson(flags.out, graph);
        },
      )
      .command(
        'produce-annotation',
        'write the structured scene annotation for an image',
        { ...commonOptions, image: { type: 'string', demandOption: true }, out: { type: 'string', demandOption: true } },
        async (flags) => {
          const frame = selectRepresentative(flags.image, flags.kind as InputKind);
          const annotation = await produceAnnotation(frame, makeConfig(flags as unknown as CommonFlags), makeBackend(flags as unknown as CommonFlags));
          await writeJson(flags.out, annotation);
        },
      )
      .command(
        'produce-masks',
        'segment an image from its annotation and write a mask file',
        {
          ...commonOptions,
          image: { type: 'string', demandOption: true },
          annotation: { type: 'string', demandOption: true },
          out: { type: 'string', demandOption: true },
          size: { type: 'number', default: 64, describe: 'mask height and width in pixels' },
        },
        async (flags) => {
          const frame = selectRepresentative(flags.image, flags.kind as InputKind);
          const annotation = JSON.parse(await readFile(flags.annotation, 'utf-8'));
          const masks = await produceMasks(
            frame,
            annotation,
            makeConfig(flags as unknown as CommonFlags),
            makeBackend(flags as unknown as CommonFlags),
            flags.size,
            flags.size,
          );
          await writeJson(flags.out, masks);
        },
      )
      .command(
        'produce-batch',
        'produce graphs, annotations, and masks for candidate/reference image pairs and write a scoring manifest',
        {
          ...commonOptions,
          images: {
            type: 'string',
            demandOption: true,
            describe:
              'JSON array of {pair_id, method, dataset, candidate, reference, kind?} image records',
          },
          'out-dir': { type: 'string', demandOption: true },
          size: { type: 'number', default: 64 },
        },
        async (flags) => {
          const backend = makeBackend(flags as unknown as CommonFlags);
          const cfg = makeConfig(flags as unknown as CommonFlags);
          const records = JSON.parse(await readFile(flags.images, 'utf-8')) as Array<{
            pair_id: string;
            method: string;
            dataset: string;
            candidate: string;
            reference: string;
            kind?: InputKind;
          }>;
          const manifest = [];
          for (const record of records) {
            const kind = record.kind ?? (flags.kind as InputKind);
            const pairDir = join(flags['out-dir'], record.pair_id);
            const manifestEntry: Record<string, string> = {
              pair_id: record.pair_id,
              method: record.method,
              dataset: record.dataset,
            };
            for (const side of ['candidate', 'reference'] as const) {
              const frame = selectRepresentative(record[side], kind);
              const graph = await produceGraph(frame, cfg, backend);
              const annotation = await produceAnnotation(frame, cfg, backend);
              const masks = await produceMasks(frame, annotation, cfg, backend, flags.size, flags.size);
              await writeJson(join(pairDir, `${side}-graph.json`), graph);
              await writeJson(join(pairDir, `${side}-annotation.json`), annotation);
              await writeJson(join(pairDir, `${side}-masks.json`), masks);
              manifestEntry[`${side}_graph`] = join(record.pair_id, `${side}-graph.json`);
              manifestEntry[`${side}_masks`] = join(record.pair_id, `${side}-masks.json`);
            }
            manifest.push(manifestEntry);
          }
          await writeJson(join(flags['out-dir'], 'manifest.json'), manifest);
          console.log(`produced ${manifest.length} pairs under ${flags['out-dir']}`);
        },
      )
      .demandCommand(1)
      .strict()
      .fail((msg, err) => {
        throw err ?? new Error(msg);
      })
      .parseAsync();
    return 0;
  } catch (error) {
    if (error instanceof ModelUnavailable) {
      console.error(`model unavailable: ${error.message}`);
      return 3;
    }
    console.error(String(error instanceof Error ? error.message : error));
    return 1;
  }
}

const entry = process.argv[1] ?? '';
if (entry.endsWith('cli.js') || entry.endsWith('cli.ts')) {
  run(hideBin(process.argv)).then((code) => {
    process.exitCode = code;
  });
}
