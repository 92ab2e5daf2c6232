"""MIXMAX random number generators built on C-system toral automorphisms."""

from .field import M61, MERSENNE61, Modulus
from .generator import (
    AllZeroSeed,
    GeneratorState,
    derive_stream,
    load,
    save,
    seed_from_vector,
    seed_from_word,
    skip,
    step,
    step_naive,
)
from .operators import Family, OperatorSpec, det_mod, entry, materialize, validate

__all__ = [
    "M61", "MERSENNE61", "Modulus",
    "AllZeroSeed", "GeneratorState", "derive_stream", "load", "save",
    "seed_from_vector", "seed_from_word", "skip", "step", "step_naive",
    "Family", "OperatorSpec", "det_mod", "entry", "materialize", "validate",
]

__version__ = "0.1.0"
