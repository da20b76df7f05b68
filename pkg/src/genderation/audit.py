"""Corpus bias measurements: gendered-word rates, male-bias percentage,
character census, persona reference counts, and genderedness-bin shares."""
from __future__ import annotations

import json
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import reduce
from typing import Iterable

from .bins import GenderednessBin, classify
from .corpus import Dialogue, DialogueCorpus, GenderLabel, tokenize
from .lexicon import Gender, GenderedLexicon


@dataclass
class BiasReport:
    """Raw counts; all percentages are derived so partial reports merge by
    adding counts and recomputing."""

    total_tokens: int = 0
    female_tokens: int = 0
    male_tokens: int = 0
    census: Counter = field(default_factory=Counter)       # GenderLabel -> count
    ref_female: int = 0                                    # lexicon hits in personas
    ref_male: int = 0
    bin_counts: Counter = field(default_factory=Counter)   # GenderednessBin -> count

    @property
    def gendered_tokens(self) -> int:
        return self.female_tokens + self.male_tokens

    @property
    def pct_gendered_words(self) -> float | None:
        """Gendered share of all tokens; None (ABSENT) for an empty corpus."""
        if self.total_tokens == 0:
            return None
        return 100.0 * self.gendered_tokens / self.total_tokens

    @property
    def pct_male_bias(self) -> float | None:
        """Male share of gendered tokens; None (ABSENT) when none exist."""
        if self.gendered_tokens == 0:
            return None
        return 100.0 * self.male_tokens / self.gendered_tokens

    @property
    def pct_female_bias(self) -> float | None:
        if self.gendered_tokens == 0:
            return None
        return 100.0 * self.female_tokens / self.gendered_tokens

    @property
    def response_count(self) -> int:
        return sum(self.bin_counts.values())

    @property
    def bin_distribution(self) -> dict[GenderednessBin, float] | None:
        """Percent of responses per bin, or None when nothing was binned."""
        total = self.response_count
        if total == 0:
            return None
        return {b: 100.0 * self.bin_counts[b] / total for b in GenderednessBin}

    def merge(self, other: "BiasReport") -> "BiasReport":
        return BiasReport(
            total_tokens=self.total_tokens + other.total_tokens,
            female_tokens=self.female_tokens + other.female_tokens,
            male_tokens=self.male_tokens + other.male_tokens,
            census=self.census + other.census,
            ref_female=self.ref_female + other.ref_female,
            ref_male=self.ref_male + other.ref_male,
            bin_counts=self.bin_counts + other.bin_counts,
        )


def count_gendered(texts: Iterable[str], lexicon: GenderedLexicon) -> tuple[int, int, int]:
    """(total, female, male) token counts over an iterable of texts."""
    total = female = male = 0
    for text in texts:
        for token in tokenize(text):
            total += 1
            gender = lexicon.gender_of(token)
            if gender is Gender.FEMALE:
                female += 1
            elif gender is Gender.MALE:
                male += 1
    return total, female, male


def audit_dialogue_utterances(dialogue: Dialogue, lexicon: GenderedLexicon) -> BiasReport:
    texts = [t.text for t in dialogue.turns]
    total, female, male = count_gendered(texts, lexicon)
    bin_counts = Counter(classify(text, lexicon) for text in texts)
    return BiasReport(
        total_tokens=total,
        female_tokens=female,
        male_tokens=male,
        bin_counts=bin_counts,
    )


def audit_dialogue_personas(dialogue: Dialogue, lexicon: GenderedLexicon) -> BiasReport:
    total, female, male = count_gendered(
        (c.persona for c in dialogue.characters), lexicon
    )
    census = Counter(c.gender_label for c in dialogue.characters)
    return BiasReport(
        total_tokens=total,
        female_tokens=female,
        male_tokens=male,
        census=census,
        ref_female=female,
        ref_male=male,
    )


def _map_merge(fn, corpus: DialogueCorpus, lexicon: GenderedLexicon, jobs: int) -> BiasReport:
    # Merge is associative and order-fixed, so the result is identical for
    # any worker count.
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            reports = list(pool.map(lambda d: fn(d, lexicon), corpus))
    else:
        reports = [fn(d, lexicon) for d in corpus]
    return reduce(BiasReport.merge, reports, BiasReport())


def audit_utterances(
    corpus: DialogueCorpus, lexicon: GenderedLexicon, jobs: int = 1
) -> BiasReport:
    """Gendered-word counts over all turn texts, plus per-turn bin counts."""
    return _map_merge(audit_dialogue_utterances, corpus, lexicon, jobs)


def audit_personas(
    corpus: DialogueCorpus, lexicon: GenderedLexicon, jobs: int = 1
) -> BiasReport:
    """Gendered-word counts over persona texts plus the character census."""
    return _map_merge(audit_dialogue_personas, corpus, lexicon, jobs)


def bin_distribution(
    corpus: DialogueCorpus, lexicon: GenderedLexicon
) -> dict[GenderednessBin, float]:
    """Percent of turns per genderedness bin (every turn counts as a response)."""
    report = audit_utterances(corpus, lexicon)
    distribution = report.bin_distribution
    if distribution is None:
        raise ValueError("no responses: corpus has no turns to bin")
    return distribution


def top_words(
    utterances: Iterable[str], stopword_list: frozenset[str] | set[str], k: int
) -> list[tuple[str, int]]:
    """k most frequent non-stopword tokens, ties broken lexicographically."""
    if k < 1:
        raise ValueError("k must be >= 1")
    counts: Counter[str] = Counter()
    for text in utterances:
        for token in tokenize(text):
            if token not in stopword_list:
                counts[token] += 1
    ranked = sorted(counts.items(), key=lambda item: (-item[1], item[0]))
    return ranked[:k]


# --- report rendering ------------------------------------------------------

def report_to_dict(report: BiasReport) -> dict:
    """JSON-ready form; ABSENT percentages are null, full float precision."""
    distribution = report.bin_distribution
    return {
        "total_tokens": report.total_tokens,
        "female_tokens": report.female_tokens,
        "male_tokens": report.male_tokens,
        "pct_gendered_words": report.pct_gendered_words,
        "pct_male_bias": report.pct_male_bias,
        "census": {g.value: report.census.get(g, 0) for g in GenderLabel},
        "persona_references": {"F": report.ref_female, "M": report.ref_male},
        "bin_counts": {b.label: report.bin_counts.get(b, 0) for b in GenderednessBin},
        "bin_distribution": None
        if distribution is None
        else {b.label: distribution[b] for b in GenderednessBin},
    }


def render_json(
    utterances: BiasReport, personas: BiasReport | None = None, label: str = "corpus"
) -> str:
    payload: dict = {"label": label, "utterances": report_to_dict(utterances)}
    if personas is not None:
        payload["personas"] = report_to_dict(personas)
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _pct(value: float | None) -> str:
    # ABSENT prints as 0 in tables; JSON keeps the null distinction.
    return "0" if value is None else f"{value:.2f}"


def render_markdown(
    utterances: BiasReport, personas: BiasReport | None = None, label: str = "corpus"
) -> str:
    lines = [
        "## Gendered word counts (utterances)",
        "",
        "| corpus | % gend. words | % male bias |",
        "|---|---|---|",
        f"| {label} | {_pct(utterances.pct_gendered_words)} |"
        f" {_pct(utterances.pct_male_bias)} |",
        "",
    ]
    if personas is not None:
        lines += [
            "## Character census and persona references",
            "",
            "| corpus | F | M | N | U | All | Ref F | Ref M |",
            "|---|---|---|---|---|---|---|---|",
            "| {} | {} | {} | {} | {} | {} | {} | {} |".format(
                label,
                personas.census.get(GenderLabel.FEMALE, 0),
                personas.census.get(GenderLabel.MALE, 0),
                personas.census.get(GenderLabel.NEUTRAL, 0),
                personas.census.get(GenderLabel.UNKNOWN, 0),
                sum(personas.census.values()),
                personas.ref_female,
                personas.ref_male,
            ),
            "",
        ]
    lines += [
        "## Genderedness bins (% of responses)",
        "",
        "| corpus | " + " | ".join(b.label for b in GenderednessBin) + " |",
        "|---|---|---|---|---|",
    ]
    distribution = utterances.bin_distribution
    cells = [
        _pct(None if distribution is None else distribution[b]) for b in GenderednessBin
    ]
    lines.append(f"| {label} | " + " | ".join(cells) + " |")
    lines.append("")
    return "\n".join(lines)
