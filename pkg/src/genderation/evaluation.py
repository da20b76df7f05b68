"""Evaluation protocol: per-bin test splits, unigram F1 against gold
responses, genderedness of generations, forced-bin sweeps, and top-word
reports."""
from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .audit import count_gendered, top_words
from .bins import GenderednessBin, TrainingExample
from .corpus import tokenize
from .lexicon import Gender, GenderedLexicon, load_stopwords
from .ngram_lm import ConditionalNGramModel, GenerationConfig


def f1_overlap(generated: str, gold: str) -> float:
    """Bag-of-tokens F1 between two texts.

    2*o/(|gen|+|gold|) where o is the multiset token overlap; 1.0 when both
    are empty, 0.0 when exactly one is.
    """
    gen = list(tokenize(generated))
    ref = list(tokenize(gold))
    if not gen and not ref:
        return 1.0
    if not gen or not ref:
        return 0.0
    overlap = sum((Counter(gen) & Counter(ref)).values())
    return 2.0 * overlap / (len(gen) + len(ref))


@dataclass(frozen=True)
class GenerationRecord:
    """One evaluated example; reports re-derive every aggregate from these."""

    context: str
    gold: str
    generated: str
    true_bin: GenderednessBin
    used_bin: GenderednessBin
    f1: float


@dataclass(frozen=True)
class BinMetrics:
    n_examples: int
    pct_gendered_words: float | None
    pct_male_bias: float | None
    f1_score: float


@dataclass(frozen=True)
class TopWord:
    word: str
    count: int
    gendered: bool


@dataclass(frozen=True)
class EvalReport:
    per_bin: dict[GenderednessBin, BinMetrics]
    overall_f1: float
    top_words: tuple[TopWord, ...]
    records: tuple[GenerationRecord, ...]


def _mean(values: Sequence[float]) -> float:
    # fsum is correctly rounded, so aggregation is order-insensitive.
    return math.fsum(values) / len(values)


def score_generations(
    records: Sequence[GenerationRecord],
    lexicon: GenderedLexicon,
    stopword_list: frozenset[str] | set[str] | None = None,
    top_k: int = 20,
) -> EvalReport:
    """Aggregate per-example records into the per-true-bin report."""
    if not records:
        raise ValueError("no generation records to score")
    if stopword_list is None:
        stopword_list = load_stopwords()

    per_bin: dict[GenderednessBin, BinMetrics] = {}
    for bin_ in GenderednessBin:
        group = [r for r in records if r.true_bin is bin_]
        if not group:
            continue
        total, female, male = count_gendered((r.generated for r in group), lexicon)
        gendered = female + male
        per_bin[bin_] = BinMetrics(
            n_examples=len(group),
            pct_gendered_words=None if total == 0 else 100.0 * gendered / total,
            pct_male_bias=None if gendered == 0 else 100.0 * male / gendered,
            f1_score=_mean([r.f1 for r in group]),
        )

    ranked = top_words((r.generated for r in records), stopword_list, top_k)
    annotated = tuple(
        TopWord(word, count, lexicon.gender_of(word) is not Gender.NEUTRAL)
        for word, count in ranked
    )
    return EvalReport(
        per_bin=per_bin,
        overall_f1=_mean([r.f1 for r in records]),
        top_words=annotated,
        records=tuple(records),
    )


def evaluate(
    model: ConditionalNGramModel,
    test: Sequence[TrainingExample],
    config: GenerationConfig,
    lexicon: GenderedLexicon,
    forced_bin: GenderednessBin | None = None,
    stopword_list: frozenset[str] | set[str] | None = None,
    top_k: int = 20,
) -> EvalReport:
    """Generate one response per test example (its true bin, or `forced_bin`
    for every example) and aggregate metrics per true-bin split."""
    if not test:
        raise ValueError("empty test set")
    # generate() depends only on (bin, config), so decode each bin once.
    cache: dict[GenderednessBin, str] = {}
    records = []
    for example in test:
        used = forced_bin if forced_bin is not None else example.bin
        if used not in cache:
            cache[used] = " ".join(model.generate(used, config))
        generated = cache[used]
        records.append(
            GenerationRecord(
                context=example.context,
                gold=example.response,
                generated=generated,
                true_bin=example.bin,
                used_bin=used,
                f1=f1_overlap(generated, example.response),
            )
        )
    return score_generations(records, lexicon, stopword_list, top_k)


# --- rendering and persistence ---------------------------------------------

def report_to_dict(report: EvalReport) -> dict:
    return {
        "per_bin": {
            bin_.label: {
                "n_examples": metrics.n_examples,
                "pct_gendered_words": metrics.pct_gendered_words,
                "pct_male_bias": metrics.pct_male_bias,
                "f1_score": metrics.f1_score,
            }
            for bin_, metrics in report.per_bin.items()
        },
        "overall_f1": report.overall_f1,
        "top_words": [
            {"word": w.word, "count": w.count, "gendered": w.gendered}
            for w in report.top_words
        ],
        "records": [
            {
                "context": r.context,
                "gold": r.gold,
                "generated": r.generated,
                "true_bin": r.true_bin.label,
                "used_bin": r.used_bin.label,
                "f1": r.f1,
            }
            for r in report.records
        ],
    }


def _pct(value: float | None) -> str:
    return "0" if value is None else f"{value:.2f}"


def render_report(report: EvalReport, format: str = "markdown") -> str:
    """Render as 'json' (full precision) or 'markdown' (tabular, 2/4 dp)."""
    if format == "json":
        return json.dumps(report_to_dict(report), indent=2, sort_keys=True) + "\n"
    if format != "markdown":
        raise ValueError(f"unknown report format {format!r}")

    lines = [
        "## Per-bin metrics (split by gold-response bin)",
        "",
        "| split | n | % gend. words | % male bias | F1 score |",
        "|---|---|---|---|---|",
    ]
    for bin_ in GenderednessBin:
        metrics = report.per_bin.get(bin_)
        if metrics is None:
            continue
        lines.append(
            f"| {bin_.label} | {metrics.n_examples} | "
            f"{_pct(metrics.pct_gendered_words)} | {_pct(metrics.pct_male_bias)} | "
            f"{metrics.f1_score:.4f} |"
        )
    lines += [
        f"| All | {len(report.records)} |  |  | {report.overall_f1:.4f} |",
        "",
        "## Top generated words (* marks gendered words)",
        "",
    ]
    rendered = [
        f"{w.word}{'*' if w.gendered else ''} ({w.count})" for w in report.top_words
    ]
    lines.append(", ".join(rendered) if rendered else "(none)")
    lines.append("")
    return "\n".join(lines)


def write_generations(records: Iterable[GenerationRecord], path: str | Path) -> None:
    """Persist per-example generation records as JSONL."""
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for r in records:
            row = {
                "context": r.context,
                "gold": r.gold,
                "generated": r.generated,
                "true_bin": r.true_bin.label,
                "used_bin": r.used_bin.label,
                "f1": r.f1,
            }
            handle.write(json.dumps(row, ensure_ascii=False))
            handle.write("\n")
