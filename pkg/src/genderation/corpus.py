"""Dialogue data model, shared tokenization, and canonical JSONL serialization.

Corpus file format: one JSON object per line, UTF-8, LF line endings:

    {"id": str,
     "characters": [{"name": str, "persona": str, "gender_label": "F"|"M"|"N"|"U"}],
     "turns": [{"speaker_index": int, "text": str}],
     "split": str}          # optional tag, e.g. "train" / "test"
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

from ._words import WORD_RE, normalize_token


class GenderLabel(enum.Enum):
    """Annotated character gender; UNKNOWN means unannotated, NEUTRAL means
    annotated as not explicit."""

    FEMALE = "F"
    MALE = "M"
    NEUTRAL = "N"
    UNKNOWN = "U"


class CorpusError(ValueError):
    """Problem in a corpus file; `line` holds the 1-based line number."""

    def __init__(self, message: str, path: str | Path = "", line: int = 0):
        self.path = str(path)
        self.line = line
        prefix = f"{self.path}:{line}: " if line else ""
        super().__init__(prefix + message)


class CorpusParseError(CorpusError):
    pass


class CorpusSchemaError(CorpusError):
    pass


class DuplicateDialogueError(CorpusError):
    pass


@dataclass(frozen=True)
class TokenSequence:
    """Normalized tokens aligned 1:1 with their original surface spans."""

    tokens: tuple[str, ...]
    surface: tuple[str, ...]

    def __post_init__(self):
        if len(self.tokens) != len(self.surface):
            raise ValueError("tokens and surface spans must align 1:1")

    def __len__(self) -> int:
        return len(self.tokens)

    def __iter__(self) -> Iterator[str]:
        return iter(self.tokens)


def tokenize(text: str) -> TokenSequence:
    """Split on runs of non-alphanumerics (internal apostrophes stay),
    lowercase, and strip trailing possessives."""
    surface = tuple(WORD_RE.findall(text))
    return TokenSequence(tuple(normalize_token(s) for s in surface), surface)


@dataclass(frozen=True)
class Utterance:
    speaker_index: int
    text: str


@dataclass(frozen=True)
class Character:
    name: str
    persona: str = ""
    gender_label: GenderLabel = GenderLabel.UNKNOWN


@dataclass(frozen=True)
class Dialogue:
    id: str
    characters: tuple[Character, ...]
    turns: tuple[Utterance, ...] = ()
    split: str | None = None

    def validate(self) -> None:
        if not self.id:
            raise ValueError("dialogue id must be non-empty")
        if not self.characters:
            raise ValueError(f"dialogue {self.id!r} has no characters")
        for character in self.characters:
            if not character.name:
                raise ValueError(f"dialogue {self.id!r} has a character without a name")
        for i, turn in enumerate(self.turns):
            if not 0 <= turn.speaker_index < len(self.characters):
                raise ValueError(
                    f"dialogue {self.id!r} turn {i}: speaker_index "
                    f"{turn.speaker_index} out of range for "
                    f"{len(self.characters)} characters"
                )
            if not turn.text.strip():
                raise ValueError(f"dialogue {self.id!r} turn {i}: empty text")


@dataclass(frozen=True)
class DialogueCorpus:
    dialogues: tuple[Dialogue, ...] = ()

    def __len__(self) -> int:
        return len(self.dialogues)

    def __iter__(self) -> Iterator[Dialogue]:
        return iter(self.dialogues)

    def validate(self) -> None:
        seen: set[str] = set()
        for dialogue in self.dialogues:
            dialogue.validate()
            if dialogue.id in seen:
                raise ValueError(f"duplicate dialogue id {dialogue.id!r}")
            seen.add(dialogue.id)

    def filter_split(self, split: str | None) -> "DialogueCorpus":
        """Corpus restricted to one split tag; None returns self."""
        if split is None:
            return self
        return DialogueCorpus(tuple(d for d in self.dialogues if d.split == split))


def dialogue_to_dict(dialogue: Dialogue) -> dict:
    record = {
        "id": dialogue.id,
        "characters": [
            {"name": c.name, "persona": c.persona, "gender_label": c.gender_label.value}
            for c in dialogue.characters
        ],
        "turns": [
            {"speaker_index": t.speaker_index, "text": t.text} for t in dialogue.turns
        ],
    }
    if dialogue.split is not None:
        record["split"] = dialogue.split
    return record


def _require(obj: dict, key: str, kind: type, path, line) -> object:
    if key not in obj:
        raise CorpusSchemaError(f"missing key {key!r}", path, line)
    value = obj[key]
    if not isinstance(value, kind) or isinstance(value, bool):
        raise CorpusSchemaError(
            f"key {key!r} must be {kind.__name__}, got {type(value).__name__}",
            path, line,
        )
    return value


def dialogue_from_dict(obj: dict, path: str | Path = "", line: int = 0) -> Dialogue:
    if not isinstance(obj, dict):
        raise CorpusSchemaError("each line must be a JSON object", path, line)
    known = {"id", "characters", "turns", "split"}
    extra = set(obj) - known
    if extra:
        raise CorpusSchemaError(f"unknown keys {sorted(extra)}", path, line)

    dialogue_id = _require(obj, "id", str, path, line)
    characters = []
    for entry in _require(obj, "characters", list, path, line):
        if not isinstance(entry, dict):
            raise CorpusSchemaError("character must be an object", path, line)
        name = _require(entry, "name", str, path, line)
        persona = _require(entry, "persona", str, path, line)
        label = _require(entry, "gender_label", str, path, line)
        try:
            gender_label = GenderLabel(label)
        except ValueError:
            raise CorpusSchemaError(
                f"gender_label must be one of F/M/N/U, got {label!r}", path, line
            ) from None
        characters.append(Character(name, persona, gender_label))
    turns = []
    for entry in _require(obj, "turns", list, path, line):
        if not isinstance(entry, dict):
            raise CorpusSchemaError("turn must be an object", path, line)
        speaker = _require(entry, "speaker_index", int, path, line)
        text = _require(entry, "text", str, path, line)
        turns.append(Utterance(speaker, text))
    split = obj.get("split")
    if split is not None and not isinstance(split, str):
        raise CorpusSchemaError("split must be a string", path, line)

    dialogue = Dialogue(dialogue_id, tuple(characters), tuple(turns), split)
    try:
        dialogue.validate()
    except ValueError as exc:
        raise CorpusSchemaError(str(exc), path, line) from None
    return dialogue


def load_corpus(path: str | Path) -> DialogueCorpus:
    """Load and validate a JSONL corpus; failures name the offending line."""
    path = Path(path)
    dialogues: list[Dialogue] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            if not raw.strip():
                continue
            try:
                obj = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise CorpusParseError(f"invalid JSON: {exc.msg}", path, lineno) from None
            dialogue = dialogue_from_dict(obj, path, lineno)
            if dialogue.id in seen:
                raise DuplicateDialogueError(
                    f"duplicate dialogue id {dialogue.id!r}", path, lineno
                )
            seen.add(dialogue.id)
            dialogues.append(dialogue)
    return DialogueCorpus(tuple(dialogues))


def write_corpus(corpus: DialogueCorpus, path: str | Path) -> None:
    """Write the canonical JSONL form; load_corpus(write_corpus(c)) == c."""
    corpus.validate()
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for dialogue in corpus:
            handle.write(json.dumps(dialogue_to_dict(dialogue), ensure_ascii=False))
            handle.write("\n")


def load_corpora(paths: list[str | Path]) -> DialogueCorpus:
    """Concatenate several corpus files, enforcing id uniqueness across them."""
    merged: list[Dialogue] = []
    seen: set[str] = set()
    for path in paths:
        for dialogue in load_corpus(path):
            if dialogue.id in seen:
                raise DuplicateDialogueError(
                    f"duplicate dialogue id {dialogue.id!r} across corpora", path
                )
            seen.add(dialogue.id)
            merged.append(dialogue)
    return DialogueCorpus(tuple(merged))
