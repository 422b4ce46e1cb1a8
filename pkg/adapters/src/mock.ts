/**
 * Deterministic stand-in for the neural producers, used for hermetic tests
 * and dry runs. Everything derives from a hash of the input file bytes, so
 * the same image always yields the same caption, parses, annotation, and
 * detections, and different images spread across a small scene library.
 */

import { readFile } from 'node:fs/promises';

import type {
  AnnotationFile,
  Detection,
  ProducerBackend,
  SentenceParse,
} from './formats.js';

function fnv1a(bytes: Uint8Array, seed = 0x811c9dc5): number {
  let hash = seed >>> 0;
  for (const byte of bytes) {
    hash ^= byte;
    hash = Math.imul(hash, 0x01000193) >>> 0;
  }
  return hash >>> 0;
}

function hashString(text: string, seed = 0x811c9dc5): number {
  return fnv1a(new TextEncoder().encode(text), seed);
}

/** mulberry32: small deterministic PRNG over a 32-bit seed. */
function mulberry32(seed: number): () => number {
  let state = seed >>> 0;
  return () => {
    state = (state + 0x6d2b79f5) >>> 0;
    let t = state;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

interface Scene {
  caption: string;
  parses: SentenceParse[];
  annotation: AnnotationFile;
}

const SCENES: Scene[] = [
  {
    caption: 'A white boat floats on the calm water. A wooden dock extends into the water.',
    parses: [
      {
        objects: ['boat', 'water'],
        attributes: [
          ['boat', 'white'],
          ['water', 'calm'],
        ],
        relations: [['boat', 'float on', 'water']],
      },
      {
        objects: ['dock', 'water'],
        attributes: [['dock', 'wooden']],
        relations: [['dock', 'extend into', 'water']],
      },
    ],
    annotation: {
      foreground_objects: [
        { object: 'boat', semantic_category: 'vehicle', parts: ['hull', 'deck', 'mast'] },
        { object: 'dock', semantic_category: 'structure', parts: ['piling', 'plank'] },
      ],
      background_elements: [
        { element: 'water', semantic_category: 'natural' },
        { element: 'tree', semantic_category: 'plant' },
        { element: 'sky', semantic_category: 'natural' },
      ],
    },
  },
  {
    caption: 'A large airplane sits on the runway. The sky is overcast.',
    parses: [
      {
        objects: ['airplane', 'runway'],
        attributes: [['airplane', 'large']],
        relations: [['airplane', 'sit on', 'runway']],
      },
      {
        objects: ['sky'],
        attributes: [['sky', 'overcast']],
        relations: [],
      },
    ],
    annotation: {
      foreground_objects: [
        {
          object: 'airplane',
          semantic_category: 'vehicle',
          parts: ['fuselage', 'wing', 'engine', 'tail'],
        },
      ],
      background_elements: [
        { element: 'sky', semantic_category: 'natural' },
        { element: 'runway', semantic_category: 'infrastructure' },
        { element: 'grass', semantic_category: 'plant' },
        { element: 'tree', semantic_category: 'plant' },
      ],
    },
  },
  {
    caption: 'A zebra grazes on the dry grass. Tall trees stand behind it.',
    parses: [
      {
        objects: ['zebra', 'grass'],
        attributes: [['grass', 'dry']],
        relations: [['zebra', 'graze on', 'grass']],
      },
      {
        objects: ['tree'],
        attributes: [['tree', 'tall']],
        relations: [],
      },
    ],
    annotation: {
      foreground_objects: [
        {
          object: 'zebra',
          semantic_category: 'animal',
          parts: ['head', 'neck', 'torso', 'tail', 'leg'],
        },
      ],
      background_elements: [
        { element: 'grass', semantic_category: 'plant' },
        { element: 'tree', semantic_category: 'plant' },
        { element: 'sky', semantic_category: 'natural' },
      ],
    },
  },
  {
    caption: 'A white sink sits beside the toilet. A mirror hangs on the tiled wall.',
    parses: [
      {
        objects: ['sink', 'toilet'],
        attributes: [['sink', 'white']],
        relations: [['sink', 'beside', 'toilet']],
      },
      {
        objects: ['mirror', 'wall'],
        attributes: [['wall', 'tiled']],
        relations: [['mirror', 'hang on', 'wall']],
      },
    ],
    annotation: {
      foreground_objects: [
        { object: 'sink', semantic_category: 'fixture', parts: ['basin', 'faucet'] },
        { object: 'toilet', semantic_category: 'fixture', parts: ['tank', 'bowl', 'seat'] },
      ],
      background_elements: [
        { element: 'tile', semantic_category: 'material' },
        { element: 'window', semantic_category: 'structure' },
        { element: 'mirror', semantic_category: 'object' },
      ],
    },
  },
  {
    caption: 'People play volleyball on the sandy beach. Gentle waves roll onto the shore.',
    parses: [
      {
        objects: ['people', 'volleyball', 'beach'],
        attributes: [['beach', 'sandy']],
        relations: [['people', 'play', 'volleyball']],
      },
      {
        objects: ['wave', 'shore'],
        attributes: [['wave', 'gentle']],
        relations: [['wave', 'roll onto', 'shore']],
      },
    ],
    annotation: {
      foreground_objects: [
        { object: 'people', semantic_category: 'person', parts: ['head', 'torso', 'leg'] },
        { object: 'volleyball', semantic_category: 'object', parts: [] },
      ],
      background_elements: [
        { element: 'sand', semantic_category: 'natural' },
        { element: 'sea', semantic_category: 'natural' },
        { element: 'sky', semantic_category: 'natural' },
      ],
    },
  },
];

export class MockBackend implements ProducerBackend {
  private seeds = new Map<string, number>();

  private async seedFor(imagePath: string): Promise<number> {
    const cached = this.seeds.get(imagePath);
    if (cached !== undefined) {
      return cached;
    }
    const bytes = await readFile(imagePath);
    const seed = fnv1a(bytes);
    this.seeds.set(imagePath, seed);
    return seed;
  }

  private async sceneFor(imagePath: string): Promise<Scene> {
    const seed = await this.seedFor(imagePath);
    return SCENES[seed % SCENES.length];
  }

  async caption(imagePath: string, _prompt: string): Promise<string> {
    return (await this.sceneFor(imagePath)).caption;
  }

  async parse(sentences: string[]): Promise<SentenceParse[]> {
    // look the sentences back up in the scene library; unknown text parses
    // to an empty element set, like a parser with nothing to extract
    return sentences.map((sentence) => {
      for (const scene of SCENES) {
        const index = scene.caption
          .split(/[.!?]/)
          .map((s) => s.trim())
          .indexOf(sentence.trim());
        if (index >= 0 && index < scene.parses.length) {
          return scene.parses[index];
        }
      }
      return { objects: [], attributes: [], relations: [] };
    });
  }

  async annotate(imagePath: string, _prompt: string): Promise<AnnotationFile> {
    return (await this.sceneFor(imagePath)).annotation;
  }

  async segment(
    imagePath: string,
    label: string,
    height: number,
    width: number,
  ): Promise<Detection[]> {
    const seed = await this.seedFor(imagePath);
    const rand = mulberry32(hashString(label, seed));
    const count = 1 + Math.floor(rand() * 2);
    const detections: Detection[] = [];
    for (let i = 0; i < count; i += 1) {
      const r0 = Math.floor(rand() * (height - 4));
      const c0 = Math.floor(rand() * (width - 4));
      const h = 4 + Math.floor(rand() * (height - r0 - 4));
      const w = 4 + Math.floor(rand() * (width - c0 - 4));
      detections.push({
        score: 0.2 + 0.8 * rand(),
        textScore: 0.2 + 0.8 * rand(),
        box: [r0, c0, r0 + h, c0 + w],
      });
    }
    return detections;
  }
}
