/**
 * Representative-input selection for non-image stimuli. Deliberately
 * trivial: the middle frame of a video frame directory, the first rendered
 * view of a 3D shape directory. A plain image path passes through.
 */

import { readdirSync, statSync } from 'node:fs';
import { join } from 'node:path';

export type InputKind = 'image' | 'video' | 'shape';

export function selectRepresentative(inputPath: string, kind: InputKind): string {
  if (kind === 'image') {
    if (!statSync(inputPath).isFile()) {
      throw new Error(`image input must be a file: ${inputPath}`);
    }
    return inputPath;
  }
  if (!statSync(inputPath).isDirectory()) {
    throw new Error(`${kind} input must be a directory of frames: ${inputPath}`);
  }
  const frames = readdirSync(inputPath)
    .filter((name) => statSync(join(inputPath, name)).isFile())
    .sort();
  if (frames.length === 0) {
    throw new Error(`no frames found under ${inputPath}`);
  }
  const index = kind === 'video' ? Math.floor(frames.length / 2) : 0;
  return join(inputPath, frames[index]);
}
