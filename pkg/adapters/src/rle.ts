/**
 * Canonical run-length encoding shared with the scoring engine: row-major,
 * alternating runs starting with the zero run (a leading 0 encodes a mask
 * whose first pixel is set).
 */

export function encodeMask(mask: boolean[][]): number[] {
  const flat: boolean[] = [];
  for (const row of mask) {
    flat.push(...row);
  }
  if (flat.length === 0) {
    return [];
  }
  const runs: number[] = [];
  let current = flat[0];
  let length = 0;
  for (const value of flat) {
    if (value === current) {
      length += 1;
    } else {
      runs.push(length);
      current = value;
      length = 1;
    }
  }
  runs.push(length);
  if (flat[0]) {
    runs.unshift(0);
  }
  return runs;
}

export function emptyMask(height: number, width: number): boolean[][] {
  return Array.from({ length: height }, () => new Array<boolean>(width).fill(false));
}

export function paintBox(
  mask: boolean[][],
  box: [number, number, number, number],
): void {
  const height = mask.length;
  const width = height > 0 ? mask[0].length : 0;
  const r0 = Math.max(0, Math.min(box[0], height));
  const c0 = Math.max(0, Math.min(box[1], width));
  const r1 = Math.max(r0, Math.min(box[2], height));
  const c1 = Math.max(c0, Math.min(box[3], width));
  for (let r = r0; r < r1; r += 1) {
    for (let c = c0; c < c1; c += 1) {
      mask[r][c] = true;
    }
  }
}

export function unionInto(target: boolean[][], source: boolean[][]): void {
  for (let r = 0; r < target.length; r += 1) {
    for (let c = 0; c < target[r].length; c += 1) {
      target[r][c] = target[r][c] || source[r][c];
    }
  }
}
