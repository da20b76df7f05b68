"""Word-level helpers shared by the lexicon and the tokenizer."""
from __future__ import annotations

import re

# A word is a run of alphanumerics, possibly joined by internal apostrophes
# ("don't", "ma'am"). Underscore is excluded from \w so it separates.
WORD_RE = re.compile(r"[^\W_]+(?:['’][^\W_]+)*", re.UNICODE)

_APOSTROPHES = ("'", "’")


def split_possessive(word: str) -> tuple[str, str]:
    """Split one trailing possessive ('s) off a surface word, if present."""
    if len(word) > 2 and word[-2] in _APOSTROPHES and word[-1] in "sS":
        return word[:-2], word[-2:]
    return word, ""


def normalize_token(token: str) -> str:
    """Lowercase and drop trailing possessive suffixes. Idempotent."""
    word = token.lower()
    while len(word) > 2 and word[-2] in _APOSTROPHES and word[-1] == "s":
        word = word[:-2]
    return word


def apply_case_pattern(template: str, word: str) -> str:
    """Re-case lowercase `word` to match `template` (lower/Title/ALLCAPS)."""
    if template.isupper() and len(template) > 1:
        return word.upper()
    if template[:1].isupper():
        return word[:1].upper() + word[1:]
    return word
