"""Caption-side graph construction.

Turns per-sentence raw parse elements into a consolidated SemanticGraph and
provides a deterministic rule-based fallback parser for controlled test
captions, so the suite runs without any neural parser.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

from .datamodel import SemanticGraph, normalize_term
from .errors import UnparsableSentence

log = logging.getLogger(__name__)

TERMINATORS = frozenset(".!?")

# Lowercase, without the trailing dot. A '.' directly after one of these is
# kept inside the sentence instead of ending it.
ABBREVIATIONS = frozenset({
    "e.g", "i.e", "etc", "cf", "vs", "fig", "approx",
    "mr", "mrs", "ms", "dr", "prof", "jr", "sr", "st",
})


def split_sentences(text: str) -> list[str]:
    """Split a caption into sentences on . ! ? with abbreviation handling.

    Terminators that end a sentence are dropped; a '.' following an entry of
    ABBREVIATIONS stays inside the sentence. Concatenating the outputs
    (ignoring whitespace) reproduces the input minus the dropped terminators.
    """
    sentences: list[str] = []
    buf: list[str] = []
    for ch in text:
        if ch in TERMINATORS:
            if ch == "." and _ends_with_abbreviation(buf):
                buf.append(ch)
                continue
            sentence = "".join(buf).strip()
            if sentence:
                sentences.append(sentence)
            buf = []
        else:
            buf.append(ch)
    tail = "".join(buf).strip()
    if tail:
        sentences.append(tail)
    return sentences


def _ends_with_abbreviation(buf: list[str]) -> bool:
    token_chars: list[str] = []
    for ch in reversed(buf):
        if ch.isalpha() or ch == ".":
            token_chars.append(ch)
        else:
            break
    token = "".join(reversed(token_chars)).lower().lstrip(".")
    if token in ABBREVIATIONS:
        return True
    # Mid-abbreviation dot, e.g. the first '.' of "e.g."
    return bool(token) and any(a.startswith(token + ".") for a in ABBREVIATIONS)


@dataclass(frozen=True)
class RawParse:
    """Elements emitted by a parser for one sentence."""

    sentence_index: int
    objects: tuple[str, ...] = ()
    attributes: tuple[tuple[str, str], ...] = ()
    relations: tuple[tuple[str, str, str], ...] = ()


def consolidate(parses: list[RawParse]) -> SemanticGraph:
    """Merge per-sentence parses into one graph.

    Objects mentioned in multiple sentences collapse to a single normalized
    term; attributes stay bound to their stated host; relation triples are
    kept verbatim in (subject, predicate, object) order. Exact duplicates are
    removed and the result is order-insensitive in the input parses.
    """
    objects: list[str] = []
    attributes: list[tuple[str, str]] = []
    relations: list[tuple[str, str, str]] = []
    for parse in parses:
        objects.extend(parse.objects)
        attributes.extend(parse.attributes)
        relations.extend(parse.relations)
    return SemanticGraph.build(objects=objects, attributes=attributes, relations=relations)


# Closed-class word lists for the controlled grammar
#   DET? ADJ* NOUN (VERB PREP? DET? ADJ* NOUN)?
DETERMINERS = frozenset({"a", "an", "the", "some", "this", "that", "these", "those"})

ADJECTIVES = frozenset({
    "white", "black", "blue", "red", "green", "yellow", "brown", "gray",
    "orange", "pink", "purple", "bright", "dark", "pale",
    "large", "big", "small", "little", "tiny", "tall", "short", "long", "wide",
    "old", "new", "young", "calm", "quiet", "loud", "soft", "hard",
    "wet", "dry", "clean", "dirty", "happy", "sad", "fast", "slow",
    "warm", "cold", "lush", "grassy", "wooden", "sandy", "rocky",
    "peaceful", "tropical", "turquoise", "azure", "fluffy", "shiny",
})

NOUNS = frozenset({
    "dog", "cat", "boat", "ship", "ball", "man", "woman", "person", "child",
    "kid", "bird", "horse", "zebra", "cow", "sheep", "fish",
    "tree", "flower", "grass", "bush", "leaf",
    "sky", "cloud", "sun", "moon", "star",
    "water", "sea", "ocean", "wave", "lake", "river", "beach", "sand",
    "shore", "island", "hill", "hillside", "mountain", "rock", "stone",
    "road", "street", "path", "car", "bus", "truck", "train", "bicycle",
    "plane", "airplane", "house", "building", "door", "window", "roof",
    "wall", "fence", "bridge", "table", "chair", "bench", "bed", "book",
    "cup", "bottle", "hat", "bag", "umbrella", "volleyball", "kite",
    "dock", "pier", "field", "park", "garden", "people",
})

# Verb surface form -> lemma used in the relation predicate.
VERBS = {}
for _lemma, _forms in {
    "chase": ("chase", "chases"),
    "run": ("run", "runs"),
    "sleep": ("sleep", "sleeps"),
    "sit": ("sit", "sits"),
    "stand": ("stand", "stands"),
    "lie": ("lie", "lies"),
    "hold": ("hold", "holds"),
    "play": ("play", "plays"),
    "watch": ("watch", "watches"),
    "carry": ("carry", "carries"),
    "eat": ("eat", "eats"),
    "drink": ("drink", "drinks"),
    "jump": ("jump", "jumps"),
    "walk": ("walk", "walks"),
    "float": ("float", "floats"),
    "fly": ("fly", "flies"),
    "ride": ("ride", "rides"),
    "pull": ("pull", "pulls"),
    "push": ("push", "pushes"),
    "follow": ("follow", "follows"),
    "face": ("face", "faces"),
    "touch": ("touch", "touches"),
}.items():
    for _form in _forms:
        VERBS[_form] = _lemma

PREPOSITIONS = frozenset({
    "on", "in", "at", "by", "near", "under", "over", "beside", "behind",
    "above", "below", "into", "onto", "with", "toward", "across", "along",
})

_PUNCT = ",;:\"'()"


def fallback_parse(sentence: str, sentence_index: int = 0) -> RawParse:
    """Parse a sentence from the controlled grammar into a RawParse.

    Grammar: DET? ADJ* NOUN (VERB PREP? DET? ADJ* NOUN)?. Nouns become
    objects, adjacent adjectives become (noun, adj) attributes, and a
    verb(+preposition) clause becomes a relation triple. Anything outside
    the grammar raises UnparsableSentence.
    """
    tokens = [t.strip(_PUNCT).lower() for t in sentence.split()]
    tokens = [t for t in tokens if t]
    if not tokens:
        raise UnparsableSentence("empty sentence")

    pos = 0

    def _noun_phrase() -> tuple[str, list[str]]:
        nonlocal pos
        if pos < len(tokens) and tokens[pos] in DETERMINERS:
            pos += 1
        adjs: list[str] = []
        while pos < len(tokens) and tokens[pos] in ADJECTIVES:
            adjs.append(tokens[pos])
            pos += 1
        if pos >= len(tokens):
            raise UnparsableSentence(f"expected a noun at end of: {sentence!r}")
        noun = normalize_term(tokens[pos])
        if noun not in NOUNS:
            raise UnparsableSentence(f"unknown noun {tokens[pos]!r} in: {sentence!r}")
        pos += 1
        return noun, adjs

    subject, subject_adjs = _noun_phrase()
    objects = [subject]
    attributes = [(subject, adj) for adj in subject_adjs]
    relations: list[tuple[str, str, str]] = []

    if pos < len(tokens):
        verb_token = tokens[pos]
        if verb_token not in VERBS:
            raise UnparsableSentence(f"unknown verb {verb_token!r} in: {sentence!r}")
        predicate = VERBS[verb_token]
        pos += 1
        if pos < len(tokens) and tokens[pos] in PREPOSITIONS:
            predicate = f"{predicate} {tokens[pos]}"
            pos += 1
        obj, obj_adjs = _noun_phrase()
        if pos != len(tokens):
            raise UnparsableSentence(f"trailing tokens {tokens[pos:]} in: {sentence!r}")
        objects.append(obj)
        attributes.extend((obj, adj) for adj in obj_adjs)
        relations.append((subject, predicate, obj))

    return RawParse(
        sentence_index=sentence_index,
        objects=tuple(objects),
        attributes=tuple(attributes),
        relations=tuple(relations),
    )


def parse_caption(text: str) -> list[RawParse]:
    """Split a caption and fallback-parse each sentence; sentences outside
    the grammar are logged and contribute an empty RawParse."""
    parses = []
    for i, sentence in enumerate(split_sentences(text)):
        try:
            parses.append(fallback_parse(sentence, sentence_index=i))
        except UnparsableSentence as exc:
            log.warning("unparsable sentence %d: %s", i, exc)
            parses.append(RawParse(sentence_index=i))
    return parses
