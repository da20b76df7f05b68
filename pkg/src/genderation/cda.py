"""Counterfactual data augmentation: duplicate every gender-bearing dialogue
with all gendered words swapped to their opposite-gender pair forms.

No grammatical repair is attempted; the swap is purely word-list driven, so
augmented text may read awkwardly. Character names are left untouched."""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable

from ._words import WORD_RE
from .corpus import Character, Dialogue, DialogueCorpus, GenderLabel, Utterance
from .lexicon import GenderedLexicon

AUGMENTED_ID_SUFFIX = "#cda"

_FLIPPED_LABEL = {
    GenderLabel.FEMALE: GenderLabel.MALE,
    GenderLabel.MALE: GenderLabel.FEMALE,
    GenderLabel.NEUTRAL: GenderLabel.NEUTRAL,
    GenderLabel.UNKNOWN: GenderLabel.UNKNOWN,
}


class Fields(enum.Enum):
    """Which dialogue text fields the swap applies to."""

    TURNS = "turns"
    PERSONAS = "personas"
    BOTH = "both"

    @property
    def turns(self) -> bool:
        return self in (Fields.TURNS, Fields.BOTH)

    @property
    def personas(self) -> bool:
        return self in (Fields.PERSONAS, Fields.BOTH)


@dataclass(frozen=True)
class AugmentationRecord:
    original_id: str
    augmented_id: str
    swapped_token_count: int


def swap_text(text: str, lexicon: GenderedLexicon) -> tuple[str, int]:
    """Swap every gendered word in a text; everything else is byte-identical.

    Returns the new text and the number of tokens that changed.
    """
    swapped = 0

    def _sub(match) -> str:
        nonlocal swapped
        word = match.group(0)
        replacement = lexicon.swap(word)
        if replacement != word:
            swapped += 1
        return replacement

    return WORD_RE.sub(_sub, text), swapped


def swap_dialogue(
    dialogue: Dialogue, lexicon: GenderedLexicon, fields: Fields = Fields.BOTH
) -> tuple[Dialogue, int]:
    """Gender-swapped copy of a dialogue (id suffixed) and its swap count."""
    count = 0
    characters = []
    for character in dialogue.characters:
        persona = character.persona
        if fields.personas:
            persona, n = swap_text(persona, lexicon)
            count += n
        characters.append(
            Character(character.name, persona, _FLIPPED_LABEL[character.gender_label])
        )
    turns = []
    for turn in dialogue.turns:
        text = turn.text
        if fields.turns:
            text, n = swap_text(text, lexicon)
            count += n
        turns.append(Utterance(turn.speaker_index, text))
    copy = replace(
        dialogue,
        id=dialogue.id + AUGMENTED_ID_SUFFIX,
        characters=tuple(characters),
        turns=tuple(turns),
    )
    return copy, count


def augment(
    corpus: DialogueCorpus,
    lexicon: GenderedLexicon,
    fields: Fields = Fields.BOTH,
) -> tuple[DialogueCorpus, list[AugmentationRecord]]:
    """Append a gender-swapped copy of every dialogue whose selected fields
    contain at least one swappable gendered token.

    Dialogues the swap leaves untouched are not duplicated: a zero-swap copy
    would be an exact duplicate of its original.
    """
    existing = {d.id for d in corpus}
    copies: list[Dialogue] = []
    records: list[AugmentationRecord] = []
    for dialogue in corpus:
        copy, count = swap_dialogue(dialogue, lexicon, fields)
        if count == 0:
            continue
        if copy.id in existing:
            raise ValueError(f"augmented id {copy.id!r} collides with an existing dialogue")
        copies.append(copy)
        records.append(AugmentationRecord(dialogue.id, copy.id, count))
    return DialogueCorpus(tuple(corpus.dialogues) + tuple(copies)), records


def records_to_json(records: Iterable[AugmentationRecord]) -> str:
    rows = [
        {
            "original_id": r.original_id,
            "augmented_id": r.augmented_id,
            "swapped_token_count": r.swapped_token_count,
        }
        for r in records
    ]
    return json.dumps(rows, indent=2, sort_keys=True) + "\n"


def write_records(records: Iterable[AugmentationRecord], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(records_to_json(records))
