"""Shared small helpers: seeded sub-streams and validation."""

from __future__ import annotations

import numpy as np

# Fixed ids so every consumer of a given stream name agrees on the stream.
_STREAM_IDS = {
    "plan": 1,
    "walk": 2,
    "data": 3,
    "noise": 4,
    "oracle": 5,
}


def substream(seed: int, name: str) -> np.random.Generator:
    """Generator for a named sub-stream of one top-level seed.

    Every piece of randomness in the package draws from one of these, so a
    single integer seed pins down plans, walks and synthetic draws without
    the streams colliding.
    """
    if name not in _STREAM_IDS:
        raise ValueError(f"unknown stream name: {name!r}")
    return np.random.default_rng((int(seed), _STREAM_IDS[name]))


def as_feature_set(indices) -> tuple[int, ...]:
    """Normalize a collection of feature indices: sorted, unique, int tuple."""
    idx = sorted({int(j) for j in indices})
    for j in idx:
        if j < 0:
            raise ValueError(f"feature index must be nonnegative, got {j}")
    return tuple(idx)


def check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not 0.5 < alpha < 1.0:
        raise ValueError(f"stability threshold must lie in (0.5, 1), got {alpha}")
    return alpha
