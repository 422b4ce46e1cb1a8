#!/usr/bin/env python3
"""Regenerate the deterministic embedding/lexicon fixtures under tests/fixtures.

The embedding table groups 300 tokens into meaning clusters. Cluster bases
are mutually orthonormal directions in 64 dimensions; members are the base
plus small seeded noise, so within-cluster cosines are high (>= 0.85) and
cross-cluster cosines stay low (< 0.75). The script asserts those margins
plus the spot relationships the test suite relies on.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

DIM = 64
NOISE = 0.15
SEED = 7

CLUSTERS: dict[str, list[str]] = {
    "watercraft": ["boat", "ship", "vessel", "canoe", "kayak", "yacht", "sailboat", "motorboat", "dinghy", "ferry"],
    "water": ["water", "sea", "ocean", "wave", "lake", "river", "pond", "stream"],
    "shoreline": ["beach", "sand", "shore", "coast", "coastline", "dune"],
    "dock": ["dock", "pier", "wharf", "marina", "jetty"],
    "sky": ["sky", "cloud", "sun", "moon", "star", "horizon", "sunset"],
    "tree": ["tree", "palm", "forest", "wood", "bush", "foliage", "branch"],
    "grass": ["grass", "lawn", "meadow", "field", "pasture"],
    "hill": ["hill", "hillside", "mountain", "cliff", "ridge", "slope"],
    "people": ["people", "person", "man", "woman", "crowd", "group", "friend", "child", "kid", "tourist"],
    "dog": ["dog", "puppy", "hound"],
    "cat": ["cat", "kitten", "feline"],
    "equine": ["zebra", "horse", "pony", "donkey"],
    "bird": ["bird", "seagull", "duck", "goose"],
    "aircraft": ["airplane", "plane", "jet", "aircraft", "airliner"],
    "aircraft_part": ["fuselage", "wing", "engine", "cockpit", "propeller"],
    "animal_part": ["head", "neck", "torso", "leg", "tail", "paw", "fur", "mane", "hoof"],
    "building": ["building", "edifice", "house", "structure", "tower", "hut"],
    "building_part": ["roof", "window", "door", "wall", "chimney", "balcony", "gate"],
    "road": ["road", "street", "path", "lane", "highway", "trail"],
    "vehicle": ["car", "automobile", "truck", "bus", "van", "sedan", "jeep"],
    "furniture": ["table", "chair", "bench", "sofa", "couch", "stool", "desk", "cabinet"],
    "blue": ["blue", "azure", "turquoise", "teal", "navy", "cyan"],
    "red": ["red", "crimson", "scarlet", "maroon"],
    "green": ["green", "emerald", "olive"],
    "neutral_color": ["white", "black", "gray", "brown", "beige"],
    "warm_color": ["yellow", "orange", "pink", "purple", "golden"],
    "brightness": ["bright", "dark", "pale", "vivid", "dim", "shiny"],
    "size_large": ["large", "big", "huge", "giant", "tall"],
    "size_small": ["small", "little", "tiny", "short", "narrow"],
    "calmness": ["calm", "peaceful", "tranquil", "serene", "quiet", "still"],
    "texture": ["soft", "smooth", "rough", "hard", "fluffy"],
    "lushness": ["lush", "verdant", "leafy", "overgrown"],
    "material": ["wooden", "metal", "stone", "brick", "glass", "plastic", "steel"],
    "weather": ["overcast", "cloudy", "sunny", "foggy", "misty", "rainy", "hazy"],
    "play": ["play", "game", "sport", "fun", "frolic"],
    "rest": ["sit", "lounge", "recline", "rest", "relax", "sunbathe", "nap"],
    "motion": ["run", "walk", "stroll", "jog", "sprint", "hike"],
    "float": ["float", "drift", "sail", "glide", "bob"],
    "hold": ["hold", "carry", "grip", "grasp", "clutch"],
    "proximity": ["near", "beside", "adjacent", "close", "next"],
    "on_top": ["on", "atop", "upon", "over", "above"],
    "containment": ["in", "inside", "within", "into", "under", "below"],
    "mooring": ["moor", "anchor", "tie", "fasten", "secure"],
    "extension": ["extend", "stretch", "reach", "span"],
    "sports_gear": ["volleyball", "ball", "frisbee", "kite", "racket", "net"],
    "shade_gear": ["umbrella", "parasol", "canopy", "awning"],
    "scene": ["scene", "view", "landscape", "scenery", "vista", "panorama"],
    "photo": ["photograph", "photo", "picture", "image", "snapshot", "portrait"],
    "position": ["left", "right", "center", "middle", "side"],
    "zoo": ["giraffe", "elephant", "lion", "bear", "savannah", "tiger"],
    "bathroom": ["sink", "toilet", "faucet", "basin", "bathtub", "mirror", "shower"],
    "stance": ["stand", "lean", "pose", "crouch"],
    "grassy_adj": ["grassy", "sandy", "rocky", "muddy"],
}

LEXICON: list[list[str]] = [
    ["building", "edifice"],
    ["next to", "beside"],
    ["boat", "ship", "vessel"],
    ["sofa", "couch"],
    ["car", "automobile"],
    ["sea", "ocean"],
    ["photograph", "photo", "picture"],
    ["rock", "stone"],
    ["street", "road"],
    ["kid", "child"],
    ["big", "large"],
    ["small", "little"],
    ["quick", "fast", "rapid"],
    ["happy", "joyful", "glad"],
    ["sad", "unhappy"],
    ["begin", "start"],
    ["stop", "halt"],
    ["house", "home"],
    ["forest", "wood"],
    ["shore", "coast"],
    ["hill", "slope"],
    ["man", "gentleman"],
    ["woman", "lady"],
    ["dog", "hound"],
    ["cat", "feline"],
    ["plane", "airplane", "aircraft"],
    ["engine", "motor"],
    ["cup", "mug"],
    ["bag", "sack"],
    ["hat", "cap"],
    ["tiny", "minuscule"],
    ["calm", "tranquil"],
    ["peaceful", "serene"],
    ["wet", "damp"],
    ["dark", "dim"],
    ["bright", "luminous"],
    ["walk", "stroll"],
    ["run", "sprint"],
    ["hold", "grasp"],
    ["under", "beneath"],
]


def build_vectors() -> dict[str, np.ndarray]:
    names = list(CLUSTERS)
    assert len(names) <= DIM, "need one orthonormal base direction per cluster"
    rng = np.random.RandomState(SEED)
    basis, _ = np.linalg.qr(rng.standard_normal((DIM, DIM)))
    vectors: dict[str, np.ndarray] = {}
    cluster_of: dict[str, str] = {}
    for index, name in enumerate(names):
        base = basis[:, index]
        for token in CLUSTERS[name]:
            assert token not in vectors, f"token {token!r} appears in two clusters"
            jitter = rng.standard_normal(DIM)
            jitter /= np.linalg.norm(jitter)
            vec = base + NOISE * jitter
            vectors[token] = vec / np.linalg.norm(vec)
            cluster_of[token] = name

    tokens = list(vectors)
    matrix = np.stack([vectors[t] for t in tokens])
    cos = matrix @ matrix.T
    for i, a in enumerate(tokens):
        for j in range(i + 1, len(tokens)):
            b = tokens[j]
            if cluster_of[a] == cluster_of[b]:
                assert cos[i, j] >= 0.85, f"within-cluster cos({a},{b}) = {cos[i, j]:.3f}"
            else:
                assert cos[i, j] < 0.75, f"cross-cluster cos({a},{b}) = {cos[i, j]:.3f}"

    def c(a: str, b: str) -> float:
        return float(vectors[a] @ vectors[b])

    assert c("umbrella", "volleyball") < 0.80
    assert c("sea", "wave") >= 0.80
    assert c("boat", "ship") >= 0.80
    return vectors


def main() -> None:
    fixtures = Path(__file__).resolve().parent.parent / "tests" / "fixtures"
    fixtures.mkdir(parents=True, exist_ok=True)

    vectors = build_vectors()
    print(f"{len(vectors)} tokens in {len(CLUSTERS)} clusters")
    lines = [str(DIM)]
    for token in vectors:
        values = " ".join(f"{v:.6f}" for v in vectors[token])
        lines.append(f"{token} {values}")
    (fixtures / "embeddings.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")

    (fixtures / "lexicon.json").write_text(
        json.dumps(LEXICON, indent=2) + "\n", encoding="utf-8"
    )
    print(f"{len(LEXICON)} synsets")


if __name__ == "__main__":
    main()
