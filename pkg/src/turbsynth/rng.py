"""Deterministic random streams.

Everything stochastic in this package draws from the counter-based Philox
bit generator, keyed through numpy's SeedSequence so that independent
streams can be split off a single master seed without coordination:

    master seed
      -> (STREAM_SEQUENCE, <hash of sequence id>)   per video sequence
        -> STREAM_CONFIG                            parameter sampling
        -> STREAM_FIELD_BLUR                        blur-width noise field
        -> STREAM_TILT -> axis 0 / axis 1           displacement fields
        -> (STREAM_NOISE, frame index)              sensor noise

A stream is addressed by the integer path passed to spawn_key, so results
are reproducible regardless of scheduling or worker count.
"""

from __future__ import annotations

import hashlib

import numpy as np

STREAM_CONFIG = 0
STREAM_SPLIT = 1
STREAM_FIELD_BLUR = 2
STREAM_TILT = 3
STREAM_NOISE = 4
STREAM_SEQUENCE = 5

AXIS_X = 0
AXIS_Y = 1


def make_generator(seed: int, *stream: int) -> np.random.Generator:
    """Generator for the sub-stream addressed by (seed, *stream)."""
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(s) for s in stream))
    return np.random.Generator(np.random.Philox(ss))


def derive_seed(seed: int, *stream: int) -> int:
    """Collapse a stream address into a single 64-bit child seed.

    Used where an API takes one seed (e.g. RandomFieldSpec) but the value
    must come from a documented split of a parent seed.
    """
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(s) for s in stream))
    return int(ss.generate_state(1, np.uint64)[0])


def string_key(name: str) -> int:
    """Stable 64-bit key for a string id (first 8 bytes of its SHA-256).

    Independent of iteration order and of Python's per-process hash seed.
    """
    digest = hashlib.sha256(name.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little")


def sequence_seed(master_seed: int, sequence_id: str) -> int:
    """Per-sequence seed derived only from (master_seed, sequence_id)."""
    return derive_seed(master_seed, STREAM_SEQUENCE, string_key(sequence_id))
