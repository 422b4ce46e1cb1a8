/**
 * Term normalization mirroring the scoring engine's loader: lowercase,
 * whitespace collapse, final-word plural strip ("-es" after s/x/z/ch/sh,
 * else trailing "-s" for words longer than three characters not ending in
 * "-ss"). Emitting already-normalized labels keeps (granularity, label,
 * instance) keys unique after the engine re-normalizes them.
 */

const ES_STEMS = ['s', 'x', 'z', 'ch', 'sh'];

function stripPlural(word: string): string {
  if (word.endsWith('es') && ES_STEMS.some((s) => word.slice(0, -2).endsWith(s))) {
    return word.slice(0, -2);
  }
  if (word.endsWith('s') && !word.endsWith('ss') && word.length > 3) {
    return word.slice(0, -1);
  }
  return word;
}

export function normalizeTerm(term: string): string {
  const collapsed = term.trim().toLowerCase().replace(/\s+/g, ' ');
  if (collapsed === '') {
    return '';
  }
  const words = collapsed.split(' ');
  words[words.length - 1] = stripPlural(words[words.length - 1]);
  return words.join(' ');
}
