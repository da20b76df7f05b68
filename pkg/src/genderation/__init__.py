"""Toolkit for measuring gender bias in dialogue corpora, mitigating it with
counterfactual data augmentation and genderedness-bin control tokens, and
demonstrating bias-controlled generation with a small conditional n-gram
model."""

from .bins import GenderednessBin, TrainingExample, classify, extract_examples, force_bin
from .corpus import (
    Character,
    Dialogue,
    DialogueCorpus,
    GenderLabel,
    TokenSequence,
    Utterance,
    load_corpus,
    tokenize,
    write_corpus,
)
from .lexicon import (
    Gender,
    GenderedLexicon,
    load_default_lexicon,
    load_lexicon,
    load_stopwords,
)

__version__ = "0.1.0"

__all__ = [
    "Character",
    "Dialogue",
    "DialogueCorpus",
    "Gender",
    "GenderLabel",
    "GenderedLexicon",
    "GenderednessBin",
    "TokenSequence",
    "TrainingExample",
    "Utterance",
    "classify",
    "extract_examples",
    "force_bin",
    "load_corpus",
    "load_default_lexicon",
    "load_lexicon",
    "load_stopwords",
    "tokenize",
    "write_corpus",
]
