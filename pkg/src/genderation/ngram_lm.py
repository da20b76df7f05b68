"""Conditional n-gram language model over responses: per-bin counts
interpolated with a shared model, add-k smoothing with recursive backoff, and
deterministic beam-search decoding.

A prepended control token would fall out of an n-gram window after n tokens,
so conditioning is carried by interpolation instead: per-bin counts weighted
by `interpolation_lambda` against the bin-agnostic shared counts."""
from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .bins import GenderednessBin, TrainingExample
from .corpus import tokenize

BOS = "<bos>"
EOS = "<eos>"
UNK = "<unk>"

DEFAULT_SEED = 1234

MODEL_FORMAT = "genderation-ngram-1"

# context tuple -> token -> count, with contexts of every length 0..order-1
CountTable = dict[tuple[str, ...], Counter]


@dataclass(frozen=True)
class GenerationConfig:
    beam_width: int = 5
    max_length: int = 30
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        if self.beam_width < 1:
            raise ValueError("beam_width must be >= 1")
        if self.max_length < 1:
            raise ValueError("max_length must be >= 1")


@dataclass
class ConditionalNGramModel:
    order: int
    interpolation_lambda: float
    smoothing_k: float
    vocab: frozenset[str]
    per_bin_counts: dict[GenderednessBin, CountTable]
    shared_counts: CountTable

    def _lookup(self, token: str) -> str:
        return token if token in self.vocab else UNK

    def _prepare_context(self, context: Sequence[str]) -> tuple[str, ...]:
        ctx = tuple(context)[max(0, len(context) - (self.order - 1)):] if self.order > 1 else ()
        if len(ctx) < self.order - 1:
            ctx = (BOS,) * (self.order - 1 - len(ctx)) + ctx
        return tuple(self._lookup(t) for t in ctx)

    def _resolve(self, table: CountTable, context: tuple[str, ...]) -> tuple[Counter, int]:
        """Back off to shorter contexts until one has been observed."""
        while context:
            counter = table.get(context)
            if counter:
                return counter, sum(counter.values())
            context = context[1:]
        counter = table.get((), _EMPTY)
        return counter, sum(counter.values())

    def _side_prob(self, table: CountTable, context: tuple[str, ...], token: str) -> float:
        counter, total = self._resolve(table, context)
        k = self.smoothing_k
        return (counter.get(token, 0) + k) / (total + k * len(self.vocab))

    def prob(self, bin: GenderednessBin, context: Sequence[str], token: str) -> float:
        """lambda * P_bin + (1 - lambda) * P_shared, each add-k smoothed."""
        ctx = self._prepare_context(context)
        tok = self._lookup(token)
        lam = self.interpolation_lambda
        p_bin = self._side_prob(self.per_bin_counts.get(bin, {}), ctx, tok)
        p_shared = self._side_prob(self.shared_counts, ctx, tok)
        return lam * p_bin + (1.0 - lam) * p_shared

    def next_logprobs(
        self, bin: GenderednessBin, context: Sequence[str], candidates: Sequence[str]
    ) -> list[float]:
        """Log prob of each candidate token; backoff resolved once per side."""
        ctx = self._prepare_context(context)
        bin_counter, bin_total = self._resolve(self.per_bin_counts.get(bin, {}), ctx)
        shared_counter, shared_total = self._resolve(self.shared_counts, ctx)
        k = self.smoothing_k
        kv = k * len(self.vocab)
        lam = self.interpolation_lambda
        bin_denom = bin_total + kv
        shared_denom = shared_total + kv
        out = []
        for token in candidates:
            p = lam * (bin_counter.get(token, 0) + k) / bin_denom
            p += (1.0 - lam) * (shared_counter.get(token, 0) + k) / shared_denom
            out.append(math.log(p))
        return out

    def generate(self, bin: GenderednessBin, config: GenerationConfig) -> list[str]:
        """Beam search over prob(.|bin); deterministic, ties resolved by
        lexicographic token order. Returns the best complete sequence.

        <eos> is not a candidate for the first step, so generations are
        never empty."""
        candidates = sorted(self.vocab - {BOS})
        first_candidates = [t for t in candidates if t != EOS]
        start = (BOS,) * (self.order - 1)
        beams: list[tuple[tuple[str, ...], float]] = [((), 0.0)]
        completed: list[tuple[tuple[str, ...], float]] = []
        while beams:
            expansions: list[tuple[float, tuple[str, ...]]] = []
            for tokens, score in beams:
                context = start + tokens
                step_candidates = candidates if tokens else first_candidates
                logps = self.next_logprobs(bin, context, step_candidates)
                for token, logp in zip(step_candidates, logps):
                    expansions.append((score + logp, tokens + (token,)))
            expansions.sort(key=lambda item: (-item[0], item[1]))
            beams = []
            for score, tokens in expansions[: config.beam_width]:
                if tokens[-1] == EOS:
                    completed.append((tokens[:-1], score))
                elif len(tokens) >= config.max_length:
                    completed.append((tokens, score))
                else:
                    beams.append((tokens, score))
        best = min(completed, key=lambda item: (-item[1], item[0]))
        return list(best[0])


_EMPTY = Counter()


def train(
    examples: Iterable[TrainingExample],
    order: int = 3,
    interpolation_lambda: float = 0.7,
    smoothing_k: float = 0.01,
    min_count: int = 2,
) -> ConditionalNGramModel:
    """Count response n-grams into per-bin and shared tables.

    Tokens seen fewer than `min_count` times across all training responses
    are mapped to <unk>; responses are wrapped in <bos>/<eos> markers.
    """
    examples = list(examples)
    if not examples:
        raise ValueError("cannot train on an empty example list")
    if order < 1:
        raise ValueError("order must be >= 1")
    if not 0.0 <= interpolation_lambda <= 1.0:
        raise ValueError("interpolation_lambda must be in [0, 1]")
    if smoothing_k <= 0.0:
        raise ValueError("smoothing_k must be > 0")
    if min_count < 1:
        raise ValueError("min_count must be >= 1")

    streams = [list(tokenize(e.response)) for e in examples]
    frequencies = Counter(token for stream in streams for token in stream)
    kept = {token for token, n in frequencies.items() if n >= min_count}
    vocab = frozenset(kept | {BOS, EOS, UNK})

    per_bin: dict[GenderednessBin, CountTable] = {b: {} for b in GenderednessBin}
    shared: CountTable = {}

    def bump(table: CountTable, context: tuple[str, ...], token: str) -> None:
        counter = table.get(context)
        if counter is None:
            counter = table[context] = Counter()
        counter[token] += 1

    for example, stream in zip(examples, streams):
        padded = [BOS] * (order - 1) + [t if t in kept else UNK for t in stream] + [EOS]
        for i in range(order - 1, len(padded)):
            target = padded[i]
            for length in range(order):
                context = tuple(padded[i - length:i])
                bump(per_bin[example.bin], context, target)
                bump(shared, context, target)

    return ConditionalNGramModel(
        order=order,
        interpolation_lambda=interpolation_lambda,
        smoothing_k=smoothing_k,
        vocab=vocab,
        per_bin_counts=per_bin,
        shared_counts=shared,
    )


def _table_to_json(table: CountTable) -> dict:
    return {
        " ".join(context): {token: int(n) for token, n in sorted(counter.items())}
        for context, counter in sorted(table.items())
    }


def _table_from_json(obj: dict) -> CountTable:
    table: CountTable = {}
    for key, counts in obj.items():
        context = tuple(key.split(" ")) if key else ()
        table[context] = Counter({token: int(n) for token, n in counts.items()})
    return table


def save_model(model: ConditionalNGramModel, path: str | Path) -> None:
    payload = {
        "format": MODEL_FORMAT,
        "order": model.order,
        "interpolation_lambda": model.interpolation_lambda,
        "smoothing_k": model.smoothing_k,
        "vocab": sorted(model.vocab),
        "per_bin_counts": {
            b.label: _table_to_json(model.per_bin_counts.get(b, {}))
            for b in GenderednessBin
        },
        "shared_counts": _table_to_json(model.shared_counts),
    }
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        json.dump(payload, handle, indent=2, sort_keys=True)
        handle.write("\n")


def load_model(path: str | Path) -> ConditionalNGramModel:
    with open(path, encoding="utf-8") as handle:
        payload = json.load(handle)
    if payload.get("format") != MODEL_FORMAT:
        raise ValueError(
            f"not a {MODEL_FORMAT} model file: format={payload.get('format')!r}"
        )
    return ConditionalNGramModel(
        order=int(payload["order"]),
        interpolation_lambda=float(payload["interpolation_lambda"]),
        smoothing_k=float(payload["smoothing_k"]),
        vocab=frozenset(payload["vocab"]),
        per_bin_counts={
            GenderednessBin.from_label(label): _table_from_json(table)
            for label, table in payload["per_bin_counts"].items()
        },
        shared_counts=_table_from_json(payload["shared_counts"]),
    )
