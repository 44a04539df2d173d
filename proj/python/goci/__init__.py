"""Guided one-shot concept induction: Python access to the C++ core."""

from ._goci import (
    ParseError,
    ProtocolError,
    advice_examples,
    benchmark,
    compressed_size,
    concepts,
    conceptual_distance,
    covers,
    hypothesis_space_size,
    induce,
    ncd,
    ncd_with,
    normalize_theory,
    plan,
    precision,
    refinement_distance_bounds,
    replay,
    sample_complexity,
)

__all__ = [
    "ParseError",
    "ProtocolError",
    "advice_examples",
    "benchmark",
    "compressed_size",
    "concepts",
    "conceptual_distance",
    "covers",
    "hypothesis_space_size",
    "induce",
    "ncd",
    "ncd_with",
    "normalize_theory",
    "plan",
    "precision",
    "refinement_distance_bounds",
    "replay",
    "sample_complexity",
]
