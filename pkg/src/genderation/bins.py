"""Four-way genderedness bins and control-token annotation of training
examples: a response lands in F0M0 / F0M+ / F+M0 / F+M+ depending on whether
it contains any female- or male-gendered words."""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable, Iterable

from .corpus import Dialogue, DialogueCorpus, tokenize
from .lexicon import Gender, GenderedLexicon

# Separator between persona texts, turns, and the control token in a context.
CONTEXT_SEPARATOR = "\n"


class GenderednessBin(enum.Enum):
    """Presence/absence of female- and male-gendered words in a response."""

    NEUTRAL = "F0M0"
    MALE_ONLY = "F0M+"
    FEMALE_ONLY = "F+M0"
    BOTH = "F+M+"

    @property
    def label(self) -> str:
        return self.value

    @property
    def female_present(self) -> bool:
        return self.value.startswith("F+")

    @property
    def male_present(self) -> bool:
        return self.value.endswith("M+")

    @property
    def control_token(self) -> str:
        # Angle brackets keep the token out of tokenize()'s word alphabet.
        return f"<{self.value}>"

    @classmethod
    def from_presence(cls, female: bool, male: bool) -> "GenderednessBin":
        return _BY_PRESENCE[(female, male)]

    @classmethod
    def from_label(cls, label: str) -> "GenderednessBin":
        try:
            return cls(label)
        except ValueError:
            raise ValueError(f"unknown genderedness bin {label!r}") from None

    @classmethod
    def from_control_token(cls, token: str) -> "GenderednessBin":
        if len(token) >= 2 and token[0] == "<" and token[-1] == ">":
            return cls.from_label(token[1:-1])
        raise ValueError(f"unknown control token {token!r}")


_BY_PRESENCE = {(b.female_present, b.male_present): b for b in GenderednessBin}

BinClassifier = Callable[[str], GenderednessBin]


def classify(response: str, lexicon: GenderedLexicon) -> GenderednessBin:
    """Bin a response by which genders appear among its tokens."""
    female = male = False
    for token in tokenize(response):
        gender = lexicon.gender_of(token)
        if gender is Gender.FEMALE:
            female = True
        elif gender is Gender.MALE:
            male = True
        if female and male:
            break
    return GenderednessBin.from_presence(female, male)


@dataclass(frozen=True)
class TrainingExample:
    """A (dialogue history, response) pair with its genderedness bin.

    When annotated, `control_token` is the bin's rendering and the context
    ends with it; unannotated examples carry an empty control token.
    """

    context: str
    response: str
    bin: GenderednessBin
    control_token: str = ""

    @property
    def annotated(self) -> bool:
        return bool(self.control_token)


def _dialogue_examples(
    dialogue: Dialogue,
    annotate: bool,
    classifier: BinClassifier,
) -> list[TrainingExample]:
    parts = [c.persona for c in dialogue.characters]
    examples = []
    for i in range(1, len(dialogue.turns)):
        response = dialogue.turns[i].text
        context = CONTEXT_SEPARATOR.join(parts + [t.text for t in dialogue.turns[:i]])
        response_bin = classifier(response)
        token = response_bin.control_token if annotate else ""
        if annotate:
            context = context + CONTEXT_SEPARATOR + token
        examples.append(TrainingExample(context, response, response_bin, token))
    return examples


def extract_examples(
    corpus: DialogueCorpus,
    lexicon: GenderedLexicon,
    annotate: bool = True,
    classifier: BinClassifier | None = None,
) -> list[TrainingExample]:
    """One example per turn with index >= 1; context is all persona texts then
    all prior turns, oldest first. Output is ordered by (dialogue id, turn)."""
    if classifier is None:
        classifier = lambda text: classify(text, lexicon)  # noqa: E731
    examples: list[TrainingExample] = []
    for dialogue in sorted(corpus, key=lambda d: d.id):
        examples.extend(_dialogue_examples(dialogue, annotate, classifier))
    return examples


def force_bin(
    examples: Iterable[TrainingExample], target: GenderednessBin
) -> list[TrainingExample]:
    """Rewrite every control token to `target`; responses and true bins stay."""
    forced = []
    for example in examples:
        if not example.annotated:
            raise ValueError("force_bin requires annotated examples")
        suffix = CONTEXT_SEPARATOR + example.control_token
        if not example.context.endswith(suffix):
            raise ValueError(
                f"context does not end with control token {example.control_token!r}"
            )
        context = example.context[: -len(suffix)] + CONTEXT_SEPARATOR + target.control_token
        forced.append(
            replace(example, context=context, control_token=target.control_token)
        )
    return forced


def write_examples(examples: Iterable[TrainingExample], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for example in examples:
            record = {
                "context": example.context,
                "response": example.response,
                "bin": example.bin.label,
                "control_token": example.control_token,
            }
            handle.write(json.dumps(record, ensure_ascii=False))
            handle.write("\n")


def load_examples(path: str | Path) -> list[TrainingExample]:
    path = Path(path)
    examples = []
    with open(path, encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            if not raw.strip():
                continue
            try:
                record = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}:{lineno}: invalid JSON: {exc.msg}") from None
            try:
                examples.append(
                    TrainingExample(
                        context=record["context"],
                        response=record["response"],
                        bin=GenderednessBin.from_label(record["bin"]),
                        control_token=record.get("control_token", ""),
                    )
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise ValueError(f"{path}:{lineno}: bad example record: {exc}") from None
    return examples
