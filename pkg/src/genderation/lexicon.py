"""Gendered-word lexicon: the single source of truth for what counts as
gendered and how words swap to their opposite-gender form.

File format (UTF-8, one record per line):

    female_form,male_form      a swap pair; both sides become entries
    word,F  /  word,M          an unpaired entry with no swap partner
    # comment                  '# source: NAME' tags provenance

File order defines ambiguity priority: when a surface form appears in
several pairs, the first pair wins.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from pathlib import Path

from ._words import apply_case_pattern, normalize_token, split_possessive

_DATA_DIR = Path(__file__).resolve().parent / "data"

_SOURCE_DIRECTIVE = "source:"


class Gender(enum.Enum):
    FEMALE = "F"
    MALE = "M"
    NEUTRAL = "N"

    @property
    def opposite(self) -> "Gender":
        if self is Gender.FEMALE:
            return Gender.MALE
        if self is Gender.MALE:
            return Gender.FEMALE
        return Gender.NEUTRAL


class LexiconError(ValueError):
    """Problem in a lexicon file; `line` holds the 1-based line number."""

    def __init__(self, message: str, path: str | Path = "", line: int = 0):
        self.path = str(path)
        self.line = line
        prefix = f"{self.path}:{line}: " if line else ""
        super().__init__(prefix + message)


class LexiconParseError(LexiconError):
    pass


class LexiconConflictError(LexiconError):
    """A word was declared as both FEMALE and MALE."""


@dataclass(frozen=True)
class GenderedLexicon:
    """Immutable word -> gender map plus ordered female/male swap pairs."""

    entries: dict[str, Gender]
    swap_pairs: tuple[tuple[str, str], ...]
    source_ids: tuple[str, ...] = ()
    # word -> opposite form under the first-match rule, derived from swap_pairs
    swap_map: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if not self.swap_map:
            for female, male in self.swap_pairs:
                self.swap_map.setdefault(female, male)
                self.swap_map.setdefault(male, female)

    def gender_of(self, token: str) -> Gender:
        """Gender of a normalized token; NEUTRAL when not in the lexicon."""
        return self.entries.get(token, Gender.NEUTRAL)

    def swap(self, word: str) -> str:
        """Replace a surface word by its opposite-gender pair form.

        Capitalization (lowercase / Titlecase / ALLCAPS) and a trailing
        possessive are preserved; words without a pair pass through.
        """
        base, suffix = split_possessive(word)
        opposite = self.swap_map.get(base.lower())
        if opposite is None:
            return word
        return apply_case_pattern(base, opposite) + suffix

    def validate(self) -> None:
        """Raise LexiconError if any type invariant is broken."""
        for female, male in self.swap_pairs:
            if self.entries.get(female) is not Gender.FEMALE:
                raise LexiconError(f"pair member {female!r} not a FEMALE entry")
            if self.entries.get(male) is not Gender.MALE:
                raise LexiconError(f"pair member {male!r} not a MALE entry")
            if female not in self.swap_map or male not in self.swap_map:
                raise LexiconError(f"pair ({female!r}, {male!r}) missing from swap map")
        for word, gender in self.entries.items():
            if gender is Gender.NEUTRAL:
                raise LexiconError(f"entry {word!r} declared NEUTRAL")

    def pair_members(self) -> list[str]:
        """All distinct words that take part in at least one swap pair."""
        return list(self.swap_map)

    def unambiguous_pair_members(self) -> list[str]:
        """Pair members whose swap is an involution (swap(swap(w)) == w)."""
        return [w for w, opp in self.swap_map.items() if self.swap_map.get(opp) == w]


def load_lexicon(path: str | Path) -> GenderedLexicon:
    """Parse a lexicon file, merging duplicates by first occurrence.

    Declaring one word as both genders raises LexiconConflictError, even
    across sources: a conflicted entry could not satisfy the swap-pair
    invariants either way.
    """
    path = Path(path)
    entries: dict[str, Gender] = {}
    pairs: list[tuple[str, str]] = []
    sources: list[str] = []

    def declare(word: str, gender: Gender, lineno: int) -> None:
        existing = entries.get(word)
        if existing is None:
            entries[word] = gender
        elif existing is not gender:
            raise LexiconConflictError(
                f"word {word!r} declared both {existing.name} and {gender.name}",
                path, lineno,
            )

    with open(path, encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                comment = line.lstrip("#").strip()
                if comment.lower().startswith(_SOURCE_DIRECTIVE):
                    source = comment[len(_SOURCE_DIRECTIVE):].strip()
                    if source and source not in sources:
                        sources.append(source)
                continue
            fields = [f.strip() for f in line.split(",")]
            if len(fields) != 2 or not fields[0] or not fields[1]:
                raise LexiconParseError(
                    f"expected 'female,male' or 'word,F|M', got {line!r}",
                    path, lineno,
                )
            first, second = fields
            if second in ("F", "M"):
                word = normalize_token(first)
                if not word:
                    raise LexiconParseError(f"empty word in {line!r}", path, lineno)
                declare(word, Gender(second), lineno)
            else:
                female, male = normalize_token(first), normalize_token(second)
                if not female or not male:
                    raise LexiconParseError(f"empty pair member in {line!r}", path, lineno)
                declare(female, Gender.FEMALE, lineno)
                declare(male, Gender.MALE, lineno)
                if (female, male) not in pairs:
                    pairs.append((female, male))

    lexicon = GenderedLexicon(entries, tuple(pairs), tuple(sources))
    lexicon.validate()
    return lexicon


def bundled_lexicon_path() -> Path:
    return _DATA_DIR / "gendered_words.txt"


def bundled_stopwords_path() -> Path:
    return _DATA_DIR / "stopwords.txt"


def load_default_lexicon() -> GenderedLexicon:
    return load_lexicon(bundled_lexicon_path())


def load_stopwords(path: str | Path | None = None) -> frozenset[str]:
    """Load a one-word-per-line stopword file (default: the bundled list)."""
    path = Path(path) if path is not None else bundled_stopwords_path()
    words = set()
    with open(path, encoding="utf-8") as handle:
        for raw in handle:
            line = raw.strip()
            if line and not line.startswith("#"):
                words.add(line.lower())
    return frozenset(words)
