"""Run-length codec for binary masks.

Convention: masks are flattened row-major and stored as alternating run
lengths, always starting with the run of zeros. A mask whose first pixel is 1
therefore begins with a zero-length first run. All later runs are strictly
positive, so every mask has exactly one canonical encoding.
"""

from __future__ import annotations

import numpy as np

from .errors import RleLengthMismatch, SchemaViolation


def encode(mask: np.ndarray) -> list[int]:
    """Encode a 2-D binary mask into its canonical run-length list."""
    flat = np.asarray(mask, dtype=bool).ravel()
    if flat.size == 0:
        return []
    boundaries = np.flatnonzero(flat[1:] != flat[:-1]) + 1
    starts = np.concatenate(([0], boundaries))
    ends = np.concatenate((boundaries, [flat.size]))
    runs = (ends - starts).tolist()
    if flat[0]:
        runs.insert(0, 0)
    return [int(r) for r in runs]


def decode(runs: list[int], height: int, width: int) -> np.ndarray:
    """Decode a canonical run-length list into a (height, width) bool array."""
    validate(runs, height, width)
    values = np.zeros(len(runs), dtype=bool)
    values[1::2] = True
    flat = np.repeat(values, runs)
    return flat.reshape(height, width)


def validate(runs: list[int], height: int, width: int) -> None:
    """Check a run list against the canonical-encoding rules.

    Raises SchemaViolation for non-integer, negative, or non-canonical runs
    (only the first run may be zero) and RleLengthMismatch when the runs do
    not cover exactly height * width pixels.
    """
    for i, r in enumerate(runs):
        if isinstance(r, bool) or not isinstance(r, int):
            raise SchemaViolation(f"rle run at index {i} is not an integer: {r!r}")
        if r < 0:
            raise SchemaViolation(f"rle run at index {i} is negative: {r}")
        if r == 0 and i > 0:
            raise SchemaViolation(f"rle run at index {i} is zero (only the first run may be)")
    total = sum(runs)
    expected = height * width
    if total != expected:
        raise RleLengthMismatch(f"rle covers {total} pixels, expected {expected}")
