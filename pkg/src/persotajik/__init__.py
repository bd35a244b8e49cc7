"""Perso-Arabic / Tajik-Cyrillic transliteration toolkit.

A library for working with Persian written in two scripts: a declarative
model of both grapheme inventories, corpus normalization and sentence
alignment, rule-based transliteration (one-to-one and overgenerating
lattice with lexicon rescoring), a character-level transformer transducer,
and an evaluation suite.
"""

__version__ = "0.1.0"

from .script_model import (
    CharClass,
    Direction,
    Grapheme,
    MappingRule,
    NotInInventory,
    Position,
    RuleSet,
    Script,
    builtin_ruleset,
    classify,
    segment,
    segment_words,
)
from .normalize import NormalizeConfig, ZwnjMode, join_affixes, normalize_text
from .corpus import (
    Bead,
    CorpusStats,
    EmptySide,
    InsufficientData,
    ParallelCorpus,
    ParseError,
    SentencePair,
    Split,
    SplitSpec,
    corpus_stats,
    gale_church_align,
    load_corpus,
    make_splits,
)
from .rule_translit import (
    LatticeOverflow,
    TranslitResult,
    WordLattice,
    avg_alternatives,
    build_word_lattice,
    builtin_lexicon,
    load_lexicon,
    translit_lattice,
    translit_one_to_one,
)
from .metrics import (
    EvalReport,
    char_class_f1,
    chrf_pp,
    evaluate_pairs,
    ld_stats,
    levenshtein,
    relaxed_sequence_accuracy,
    sequence_accuracy,
)

__all__ = [
    "Bead", "CharClass", "CorpusStats", "Direction", "EmptySide", "EvalReport",
    "Grapheme", "InsufficientData", "LatticeOverflow", "MappingRule",
    "NormalizeConfig", "NotInInventory", "ParallelCorpus", "ParseError",
    "Position", "RuleSet", "Script", "SentencePair", "Split", "SplitSpec",
    "TranslitResult", "WordLattice", "ZwnjMode", "avg_alternatives",
    "build_word_lattice", "builtin_lexicon", "builtin_ruleset",
    "char_class_f1", "chrf_pp", "classify", "corpus_stats", "evaluate_pairs",
    "gale_church_align", "join_affixes", "ld_stats", "levenshtein",
    "load_corpus", "load_lexicon", "make_splits", "normalize_text",
    "relaxed_sequence_accuracy", "segment", "segment_words",
    "sequence_accuracy", "translit_lattice", "translit_one_to_one",
]
