"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines; plain `pytest` reports the same pass/fail via test outcomes.
"""
from __future__ import annotations

import os
import random
import time
from collections import Counter
from functools import reduce
from itertools import product
from pathlib import Path

import pytest

from genderation._words import WORD_RE
from genderation.audit import (
    BiasReport,
    audit_personas,
    audit_utterances,
    count_gendered,
)
from genderation.bins import GenderednessBin, classify, extract_examples
from genderation.cda import Fields, augment
from genderation.cli import main as cli_main
from genderation.corpus import DialogueCorpus, load_corpus, tokenize
from genderation.demo import load_demo_corpus
from genderation.evaluation import evaluate, f1_overlap
from genderation.lexicon import (
    Gender,
    bundled_lexicon_path,
    load_default_lexicon,
    load_lexicon,
)
from genderation.ngram_lm import GenerationConfig, train

from oracles import naive_bin_counts, naive_census, naive_corpus_counts, raw_gender_sets
from test_cda import random_corpus


def check(number: int, name: str, failures: list[str]) -> None:
    status = "FAIL" if failures else "PASS"
    print(f"[acceptance] criterion {number} ({name}): {status}")
    assert not failures, f"criterion {number} ({name}): " + "; ".join(failures[:10])


@pytest.fixture(scope="module")
def lexicon():
    return load_default_lexicon()


@pytest.fixture(scope="module")
def demo_corpus():
    return load_demo_corpus()


def test_criterion_1_lexicon_properties(lexicon):
    started = time.monotonic()
    failures = []
    unambiguous = lexicon.unambiguous_pair_members()
    if not unambiguous:
        failures.append("no unambiguous pair members found")
    for word in unambiguous:
        if lexicon.swap(lexicon.swap(word)) != word:
            failures.append(f"involution broken for {word!r}")
    for word in lexicon.pair_members():
        flipped = lexicon.swap(word)
        if lexicon.gender_of(flipped) is not lexicon.gender_of(word).opposite:
            failures.append(f"gender flip broken for {word!r}")
        title = word[:1].upper() + word[1:]
        if not lexicon.swap(word).islower():
            failures.append(f"lowercase not preserved for {word!r}")
        if not lexicon.swap(title)[0].isupper():
            failures.append(f"titlecase not preserved for {word!r}")
        if not lexicon.swap(word.upper()).isupper():
            failures.append(f"allcaps not preserved for {word!r}")
    for token in ("tavern", "road", "coin", "wall", "hag", "wench"):
        if lexicon.gender_of(token) is not Gender.NEUTRAL:
            failures.append(f"{token!r} should be neutral")
        if lexicon.swap(token) != token:
            failures.append(f"swap not identity on neutral {token!r}")
    elapsed = time.monotonic() - started
    if elapsed >= 1.0:
        failures.append(f"took {elapsed:.2f}s, limit 1s")
    check(1, "lexicon properties", failures)


def test_criterion_2_audit_oracle_equivalence(lexicon, demo_corpus):
    failures = []
    female, male = raw_gender_sets(bundled_lexicon_path())

    report = audit_utterances(demo_corpus, lexicon)
    total, f, m = naive_corpus_counts(demo_corpus, female, male)
    if (report.total_tokens, report.female_tokens, report.male_tokens) != (total, f, m):
        failures.append("utterance counts disagree with oracle")
    if report.pct_gendered_words != 100.0 * (f + m) / total:
        failures.append("pct_gendered_words disagrees with oracle")
    if report.pct_male_bias != 100.0 * m / (f + m):
        failures.append("pct_male_bias disagrees with oracle")

    personas = audit_personas(demo_corpus, lexicon)
    if personas.census != naive_census(demo_corpus):
        failures.append("census disagrees with oracle")
    ptotal, pf, pm = naive_corpus_counts(demo_corpus, female, male, personas=True)
    if (personas.ref_female, personas.ref_male) != (pf, pm):
        failures.append("persona references disagree with oracle")

    naive_bins = naive_bin_counts(demo_corpus, female, male)
    if {b.label: n for b, n in report.bin_counts.items() if n} != dict(naive_bins):
        failures.append("bin counts disagree with oracle")
    n_turns = sum(naive_bins.values())
    for bin_, pct in report.bin_distribution.items():
        if pct != 100.0 * naive_bins.get(bin_.label, 0) / n_turns:
            failures.append(f"bin percentage for {bin_.label} disagrees with oracle")

    rng = random.Random(20240809)
    dialogues = list(demo_corpus)
    for trial in range(100):
        k = rng.randint(1, 12)
        parts = [[] for _ in range(k)]
        for dialogue in dialogues:
            parts[rng.randrange(k)].append(dialogue)
        merged = reduce(
            BiasReport.merge,
            (audit_utterances(DialogueCorpus(tuple(p)), lexicon) for p in parts),
            BiasReport(),
        )
        if merged != report:
            failures.append(f"partition {trial} does not merge to the whole-corpus audit")
            break
    check(2, "audit oracle equivalence", failures)


def test_criterion_3_binning_brute_force(tmp_path):
    started = time.monotonic()
    failures = []
    path = tmp_path / "toy.txt"
    path.write_text("queen,king\nshe,he\n", encoding="utf-8")
    toy = load_lexicon(path)
    female_words = {"queen", "she"}
    male_words = {"king", "he"}
    vocabulary = ["queen", "she", "king", "he", "castle", "road"]
    checked = 0
    for length in range(1, 5):
        for words in product(vocabulary, repeat=length):
            expected = GenderednessBin.from_presence(
                any(w in female_words for w in words),
                any(w in male_words for w in words),
            )
            if classify(" ".join(words), toy) is not expected:
                failures.append(f"classify disagrees on {words!r}")
            checked += 1
    if checked != 1554:
        failures.append(f"expected 1554 strings, checked {checked}")
    elapsed = time.monotonic() - started
    if elapsed >= 1.0:
        failures.append(f"took {elapsed:.2f}s, limit 1s")
    check(3, "binning brute force", failures)


def test_criterion_4_cda_laws(lexicon):
    failures = []
    rng = random.Random(777)
    corpus = random_corpus(lexicon, rng, 1000)
    augmented, records = augment(corpus, lexicon, Fields.TURNS)

    def has_gendered(dialogue):
        return any(
            lexicon.gender_of(token) is not Gender.NEUTRAL
            for turn in dialogue.turns
            for token in tokenize(turn.text)
        )

    gendered = sum(1 for d in corpus if has_gendered(d))
    if len(augmented) != len(corpus) + gendered:
        failures.append(
            f"size law broken: {len(augmented)} != {len(corpus)} + {gendered}"
        )

    originals = {d.id: d for d in corpus}
    mirror = {
        GenderednessBin.NEUTRAL: GenderednessBin.NEUTRAL,
        GenderednessBin.MALE_ONLY: GenderednessBin.FEMALE_ONLY,
        GenderednessBin.FEMALE_ONLY: GenderednessBin.MALE_ONLY,
        GenderednessBin.BOTH: GenderednessBin.BOTH,
    }
    for record, copy in zip(records, augmented.dialogues[len(corpus):]):
        original = originals[record.original_id]
        for orig_turn, copy_turn in zip(original.turns, copy.turns):
            orig_tokens = tokenize(orig_turn.text)
            copy_tokens = tokenize(copy_turn.text)
            for orig_surface, orig_token, copy_surface in zip(
                orig_tokens.surface, orig_tokens.tokens, copy_tokens.surface
            ):
                if lexicon.gender_of(orig_token) is Gender.NEUTRAL:
                    if copy_surface != orig_surface:
                        failures.append(f"neutral token changed: {orig_surface!r}")
            # non-word separators must be byte-identical
            if WORD_RE.sub("", orig_turn.text) != WORD_RE.sub("", copy_turn.text):
                failures.append(f"separators changed in {original.id}")
            if classify(copy_turn.text, lexicon) is not mirror[
                classify(orig_turn.text, lexicon)
            ]:
                failures.append(f"bin mirror broken in {original.id}")
        if failures:
            break
    check(4, "cda laws", failures)


def test_criterion_5_toy_model_control(lexicon, demo_corpus):
    started = time.monotonic()
    failures = []
    train_examples = extract_examples(demo_corpus.filter_split("train"), lexicon)
    test_examples = extract_examples(demo_corpus.filter_split("test"), lexicon)
    model = train(train_examples)
    config = GenerationConfig()

    report = evaluate(model, test_examples, config, lexicon,
                      forced_bin=GenderednessBin.NEUTRAL)
    for bin_, metrics in report.per_bin.items():
        if not metrics.pct_gendered_words <= 1.0:
            failures.append(
                f"forced F0M0, split {bin_.label}: pct gendered "
                f"{metrics.pct_gendered_words} > 1.0"
            )

    report = evaluate(model, test_examples, config, lexicon,
                      forced_bin=GenderednessBin.MALE_ONLY)
    for bin_, metrics in report.per_bin.items():
        if metrics.pct_male_bias is None or not metrics.pct_male_bias >= 90.0:
            failures.append(
                f"forced F0M+, split {bin_.label}: male bias {metrics.pct_male_bias}"
            )

    report = evaluate(model, test_examples, config, lexicon,
                      forced_bin=GenderednessBin.FEMALE_ONLY)
    for bin_, metrics in report.per_bin.items():
        if metrics.pct_male_bias is None or not metrics.pct_male_bias <= 10.0:
            failures.append(
                f"forced F+M0, split {bin_.label}: male bias {metrics.pct_male_bias}"
            )

    elapsed = time.monotonic() - started
    if elapsed >= 60.0:
        failures.append(f"took {elapsed:.1f}s, limit 60s")
    check(5, "toy-model bin control", failures)


def test_criterion_6_amplification(lexicon, demo_corpus):
    started = time.monotonic()
    failures = []
    corpus_report = audit_utterances(demo_corpus, lexicon)
    corpus_bias = corpus_report.pct_male_bias
    if not 70.0 <= corpus_bias <= 76.0:
        failures.append(f"synthetic corpus male bias {corpus_bias:.2f} not near 73")

    examples = extract_examples(demo_corpus, lexicon)
    model = train(examples, interpolation_lambda=0.0)
    config = GenerationConfig()
    generations = [
        " ".join(model.generate(GenderednessBin.NEUTRAL, config)) for _ in range(100)
    ]
    total, female, male = count_gendered(generations, lexicon)
    if female + male == 0:
        failures.append("unconditioned generations contain no gendered tokens")
    else:
        generation_bias = 100.0 * male / (female + male)
        if not generation_bias >= 73.0:
            failures.append(f"generation male bias {generation_bias:.2f} < 73")
        if not generation_bias >= corpus_bias:
            failures.append(
                f"generation male bias {generation_bias:.2f} below corpus "
                f"{corpus_bias:.2f}: no amplification"
            )
    elapsed = time.monotonic() - started
    if elapsed >= 60.0:
        failures.append(f"took {elapsed:.1f}s, limit 60s")
    check(6, "bias amplification", failures)


def test_criterion_7_f1_unit_values():
    failures = []
    if f1_overlap("the queen rules", "the queen rules") != 1.0:
        failures.append("identical texts != 1.0")
    if f1_overlap("alpha beta", "gamma delta") != 0.0:
        failures.append("disjoint texts != 0.0")
    if f1_overlap("a b b", "b c") != 0.4:
        failures.append("hand-derived case != 0.4")
    check(7, "f1 unit values", failures)


LIGHT_DIR = os.environ.get("GENDERATION_LIGHT_DIR")


@pytest.mark.skipif(
    not LIGHT_DIR,
    reason="set GENDERATION_LIGHT_DIR to a directory with train.jsonl/test.jsonl "
    "in the canonical corpus format to run the dataset reproduction check",
)
def test_criterion_8_light_reproduction(lexicon):
    failures = []
    train_path = Path(LIGHT_DIR) / "train.jsonl"
    test_path = Path(LIGHT_DIR) / "test.jsonl"
    train_corpus = load_corpus(train_path)
    test_corpus = load_corpus(test_path)

    report = audit_utterances(train_corpus, lexicon)
    expected_gendered, expected_bias = 0.94, 73.4
    if abs(report.pct_gendered_words - expected_gendered) > 0.5:
        failures.append(
            f"pct gendered words {report.pct_gendered_words:.3f} vs {expected_gendered}"
        )
    if abs(report.pct_male_bias - expected_bias) > 0.5:
        failures.append(f"pct male bias {report.pct_male_bias:.2f} vs {expected_bias}")

    expected_bins = {"F0M0": 60.65, "F0M+": 27.21, "F+M0": 7.61, "F+M+": 4.63}
    distribution = audit_utterances(test_corpus, lexicon).bin_distribution
    for bin_, pct in distribution.items():
        if abs(pct - expected_bins[bin_.label]) > 2.0:
            failures.append(
                f"bin {bin_.label}: {pct:.2f} vs {expected_bins[bin_.label]}"
            )

    if failures:
        print("[acceptance] tokenization diff diagnostic (train split):")
        print(f"  total tokens: {report.total_tokens}")
        print(f"  female/male tokens: {report.female_tokens}/{report.male_tokens}")
        frequencies: Counter = Counter()
        for dialogue in train_corpus:
            for turn in dialogue.turns:
                for token in tokenize(turn.text):
                    if lexicon.gender_of(token) is not Gender.NEUTRAL:
                        frequencies[token] += 1
        for token, n in frequencies.most_common(30):
            print(f"  {token}: {n} ({lexicon.gender_of(token).name})")
    check(8, "dataset reproduction", failures)


def test_criterion_9_demo_determinism(tmp_path):
    failures = []
    runs = {
        "first": ["demo", "--out-dir", str(tmp_path / "first")],
        "second": ["demo", "--out-dir", str(tmp_path / "second")],
        "jobs4": ["demo", "--out-dir", str(tmp_path / "jobs4"), "--jobs", "4"],
    }
    for name, argv in runs.items():
        if cli_main(argv) != 0:
            failures.append(f"demo run {name} failed")

    def tree(root: Path) -> dict[str, bytes]:
        return {
            str(p.relative_to(root)): p.read_bytes()
            for p in sorted(root.rglob("*"))
            if p.is_file()
        }

    first = tree(tmp_path / "first")
    if not first:
        failures.append("demo produced no files")
    for other in ("second", "jobs4"):
        if tree(tmp_path / other) != first:
            failures.append(f"{other} run differs from first run")
    check(9, "demo determinism", failures)
