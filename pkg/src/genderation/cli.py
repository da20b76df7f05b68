"""Command-line interface: audit, cda, bin, train, generate, eval, and an
end-to-end demo on the bundled synthetic corpus.

Exit codes: 0 success, 1 validation error, 2 I/O error. Diagnostics go to
stderr; machine-readable output goes to stdout or files."""
from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import audit, cda, demo, evaluation, ngram_lm
from .bins import GenderednessBin, extract_examples, load_examples, write_examples
from .corpus import CorpusError, DialogueCorpus, load_corpora, write_corpus
from .lexicon import (
    GenderedLexicon,
    LexiconError,
    bundled_lexicon_path,
    load_lexicon,
    load_stopwords,
)
from .ngram_lm import DEFAULT_SEED, GenerationConfig

LEXICON_ENV_VAR = "GENDERATION_LEXICON"


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; the CLI contract reserves 2 for I/O.
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def resolve_lexicon_path(flag_value: str) -> Path:
    """'default' resolves to $GENDERATION_LEXICON or the bundled list."""
    if flag_value != "default":
        return Path(flag_value)
    env = os.environ.get(LEXICON_ENV_VAR)
    return Path(env) if env else bundled_lexicon_path()


def _load_lexicon(args) -> GenderedLexicon:
    return load_lexicon(resolve_lexicon_path(args.lexicon))


def _load_corpus(args) -> DialogueCorpus:
    corpus = load_corpora(args.corpus)
    split = getattr(args, "split", None)
    if split is not None:
        corpus = corpus.filter_split(split)
        if not len(corpus):
            raise ValueError(f"no dialogues with split tag {split!r}")
    return corpus


def _write_or_print(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _add_corpus_options(parser, with_split=True):
    parser.add_argument(
        "--corpus", action="append", required=True,
        help="corpus JSONL file; repeat to concatenate several",
    )
    parser.add_argument("--lexicon", default="default",
                        help="lexicon file path, or 'default'")
    if with_split:
        parser.add_argument("--split", default=None,
                            help="only dialogues carrying this split tag")


def _add_generation_options(parser):
    parser.add_argument("--beam", type=int, default=5, help="beam width")
    parser.add_argument("--max-len", type=int, default=30, help="max generated tokens")
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED)


def cmd_audit(args) -> int:
    lexicon = _load_lexicon(args)
    corpus = _load_corpus(args)
    utterances = audit.audit_utterances(corpus, lexicon, jobs=args.jobs)
    personas = audit.audit_personas(corpus, lexicon, jobs=args.jobs)
    render = audit.render_json if args.format == "json" else audit.render_markdown
    _write_or_print(render(utterances, personas, args.label), args.out)
    return 0


def cmd_cda(args) -> int:
    lexicon = _load_lexicon(args)
    corpus = _load_corpus(args)
    augmented, records = cda.augment(corpus, lexicon, cda.Fields(args.fields))
    write_corpus(augmented, args.out)
    if args.records is None:
        sys.stderr.write(cda.records_to_json(records))
    else:
        cda.write_records(records, args.records)
    print(
        f"augmented {len(records)} of {len(corpus)} dialogues -> {args.out}",
        file=sys.stderr,
    )
    return 0


def cmd_bin(args) -> int:
    lexicon = _load_lexicon(args)
    corpus = _load_corpus(args)
    examples = extract_examples(corpus, lexicon, annotate=not args.no_annotate)
    write_examples(examples, args.out)
    print(f"wrote {len(examples)} examples -> {args.out}", file=sys.stderr)
    return 0


def cmd_train(args) -> int:
    examples = load_examples(args.examples)
    model = ngram_lm.train(
        examples,
        order=args.order,
        interpolation_lambda=args.interpolation_lambda,
        smoothing_k=args.k,
        min_count=args.min_count,
    )
    ngram_lm.save_model(model, args.out)
    print(
        f"trained order-{model.order} model on {len(examples)} examples "
        f"(vocab {len(model.vocab)}) -> {args.out}",
        file=sys.stderr,
    )
    return 0


def cmd_generate(args) -> int:
    model = ngram_lm.load_model(args.model)
    config = GenerationConfig(beam_width=args.beam, max_length=args.max_len, seed=args.seed)
    target = GenderednessBin.from_label(args.bin)
    for _ in range(args.count):
        print(" ".join(model.generate(target, config)))
    return 0


def _run_eval(model, examples, config, lexicon, forced, out_dir: Path) -> None:
    report = evaluation.evaluate(model, examples, config, lexicon, forced_bin=forced)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "eval_report.json").write_text(
        evaluation.render_report(report, "json"), encoding="utf-8"
    )
    (out_dir / "eval_report.md").write_text(
        evaluation.render_report(report, "markdown"), encoding="utf-8"
    )
    evaluation.write_generations(report.records, out_dir / "generations.jsonl")


def cmd_eval(args) -> int:
    lexicon = _load_lexicon(args)
    model = ngram_lm.load_model(args.model)
    examples = load_examples(args.examples)
    config = GenerationConfig(beam_width=args.beam, max_length=args.max_len, seed=args.seed)
    forced = None if args.bin is None else GenderednessBin.from_label(args.bin)
    _run_eval(model, examples, config, lexicon, forced, Path(args.out_dir))
    print(f"eval reports -> {args.out_dir}", file=sys.stderr)
    return 0


def cmd_demo(args) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    lexicon = load_lexicon(resolve_lexicon_path(args.lexicon))
    stopwords = load_stopwords()
    corpus = demo.build_demo_corpus(seed=args.seed)
    write_corpus(corpus, out_dir / "demo_corpus.jsonl")

    # audit
    utterances = audit.audit_utterances(corpus, lexicon, jobs=args.jobs)
    personas = audit.audit_personas(corpus, lexicon, jobs=args.jobs)
    (out_dir / "audit_report.json").write_text(
        audit.render_json(utterances, personas, "demo"), encoding="utf-8"
    )
    (out_dir / "audit_report.md").write_text(
        audit.render_markdown(utterances, personas, "demo"), encoding="utf-8"
    )

    # cda
    augmented, records = cda.augment(corpus, lexicon, cda.Fields.BOTH)
    write_corpus(augmented, out_dir / "demo_corpus_cda.jsonl")
    cda.write_records(records, out_dir / "cda_records.json")

    # bin-annotated training examples per split
    train_examples = extract_examples(corpus.filter_split("train"), lexicon)
    test_examples = extract_examples(corpus.filter_split("test"), lexicon)
    write_examples(train_examples, out_dir / "examples_train.jsonl")
    write_examples(test_examples, out_dir / "examples_test.jsonl")

    # train and evaluate: oracle bins plus all four forced bins
    model = ngram_lm.train(train_examples)
    ngram_lm.save_model(model, out_dir / "model.json")
    config = GenerationConfig(seed=args.seed)
    _run_eval(model, test_examples, config, lexicon, None, out_dir / "eval_oracle")
    for bin_ in GenderednessBin:
        _run_eval(
            model, test_examples, config, lexicon, bin_,
            out_dir / f"eval_forced_{bin_.label.replace('+', 'p')}",
        )
    print(f"demo pipeline complete -> {out_dir}", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="genderation", description=__doc__)
    sub = parser.add_subparsers(dest="command", metavar="subcommand")

    p = sub.add_parser("audit", help="measure gendered-word bias in a corpus")
    _add_corpus_options(p)
    p.add_argument("--format", choices=("markdown", "json"), default="markdown")
    p.add_argument("--out", default=None, help="output file (default stdout)")
    p.add_argument("--label", default="corpus", help="row label in reports")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("cda", help="counterfactual data augmentation")
    _add_corpus_options(p)
    p.add_argument("--out", required=True, help="augmented corpus JSONL")
    p.add_argument("--fields", choices=[f.value for f in cda.Fields], default="both")
    p.add_argument("--records", default=None,
                   help="augmentation record JSON file (default stderr)")
    p.set_defaults(func=cmd_cda)

    p = sub.add_parser("bin", help="extract bin-annotated training examples")
    _add_corpus_options(p)
    p.add_argument("--out", required=True, help="examples JSONL")
    p.add_argument("--no-annotate", action="store_true",
                   help="leave control tokens empty")
    p.set_defaults(func=cmd_bin)

    p = sub.add_parser("train", help="train the conditional n-gram model")
    p.add_argument("--examples", required=True)
    p.add_argument("--out", required=True, help="model JSON file")
    p.add_argument("--order", type=int, default=3)
    p.add_argument("--lambda", dest="interpolation_lambda", type=float, default=0.7,
                   help="per-bin vs shared interpolation weight")
    p.add_argument("--k", type=float, default=0.01, help="add-k smoothing constant")
    p.add_argument("--min-count", type=int, default=2,
                   help="tokens seen fewer times become <unk>")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("generate", help="decode utterances for a bin")
    p.add_argument("--model", required=True)
    p.add_argument("--bin", required=True,
                   choices=[b.label for b in GenderednessBin])
    p.add_argument("--count", type=int, default=1, help="utterances to print")
    _add_generation_options(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("eval", help="evaluate a model on annotated examples")
    p.add_argument("--model", required=True)
    p.add_argument("--examples", required=True)
    p.add_argument("--lexicon", default="default")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--bin", default=None, choices=[b.label for b in GenderednessBin],
                   help="force this bin for every example (default: true bins)")
    _add_generation_options(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("demo", help="run the full pipeline on the bundled corpus")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--lexicon", default="default")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_demo)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    if getattr(args, "command", None) is None:
        parser.print_usage(sys.stderr)
        return 1
    try:
        return args.func(args)
    except (LexiconError, CorpusError, ValueError) as exc:
        print(f"genderation {args.command}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"genderation {args.command}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
