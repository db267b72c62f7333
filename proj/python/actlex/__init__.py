"""Sentiment lexicon expansion and affect-control simulation."""

from ._actlex import (
    ActlexError,
    CoefficientSet,
    HeadModel,
    Lexicon,
    __version__,
    abo_bits,
    abo_code,
    amalgamate,
    cli,
    compare_lexicons,
    deflection,
    generate_corpus,
    impression,
    optimal_actor,
    optimal_behavior,
    pearson,
    run_script,
)

__all__ = [
    "ActlexError",
    "CoefficientSet",
    "HeadModel",
    "Lexicon",
    "abo_bits",
    "abo_code",
    "amalgamate",
    "cli",
    "compare_lexicons",
    "deflection",
    "generate_corpus",
    "impression",
    "optimal_actor",
    "optimal_behavior",
    "pearson",
    "run_script",
]
