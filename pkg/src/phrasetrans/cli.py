"""Command-line entry point: ``phrasetrans {index,translate,eval}``.

Exit codes
----------
0 - success
1 - usage or configuration error
2 - I/O or data format error
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from typing import Any, Sequence, TextIO

from .errors import FormatError, PhraseTransError
from .evalharness import load_cases, run_eval
from .lexicon import Lexicon, load_dictionary
from .ngram_index import NgramIndex, load_index, load_ngrams, save_index
from .pipeline import (
    DEFAULT_PRODUCT_CAP,
    DEFAULT_TOP_K,
    TranslateOptions,
    TranslationResult,
    translate,
)
from .textnorm import DEFAULT_MAX_SYLLABLES, normalize_source

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    data = argparse.ArgumentParser(add_help=False)
    data.add_argument("--dict", dest="dict_path", help="bilingual dictionary (TSV)")
    data.add_argument(
        "--ngrams", dest="ngram_paths", action="append", default=[],
        help="n-gram frequency list (TSV); repeatable",
    )
    data.add_argument("--index", dest="index_path", help="prebuilt binary n-gram index")
    data.add_argument("--top-k", type=_positive, default=DEFAULT_TOP_K)
    data.add_argument("--max-syllables", type=_positive, default=DEFAULT_MAX_SYLLABLES)
    data.add_argument("--product-cap", type=_positive, default=DEFAULT_PRODUCT_CAP)
    data.add_argument("--output", choices=("plain", "structured"), default="plain")

    parser = _Parser(
        prog="phrasetrans",
        description="Translate out-of-dictionary phrases with a dictionary and n-gram data.",
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("index", help="build a binary n-gram index")
    p.add_argument("--ngrams", dest="ngram_paths", action="append", required=True)
    p.add_argument("-o", "--out", dest="out_path", required=True)

    p = sub.add_parser("translate", parents=[data], help="translate phrases")
    p.add_argument("phrases", nargs="*", help="phrases; read from stdin when omitted")

    p = sub.add_parser("eval", parents=[data], help="evaluate against references")
    p.add_argument("cases_path", help="TSV file: phrase, reference[, reference...]")
    return parser


def _note(msg: str) -> None:
    print(msg, file=sys.stderr)


def _load_resources(args: argparse.Namespace) -> tuple[Lexicon, NgramIndex]:
    if not args.dict_path:
        raise UsageError("--dict is required")
    if not args.ngram_paths and not args.index_path:
        raise UsageError("one of --ngrams or --index is required")
    if args.ngram_paths and args.index_path:
        raise UsageError("--ngrams and --index are mutually exclusive")
    t0 = time.perf_counter()
    lex = load_dictionary(args.dict_path)
    if args.index_path:
        index = load_index(args.index_path)
    else:
        index = load_ngrams(args.ngram_paths)
    _note(
        f"loaded {len(lex)} headwords, {len(index)} n-grams "
        f"in {time.perf_counter() - t0:.2f}s"
    )
    return lex, index


def _options(args: argparse.Namespace) -> TranslateOptions:
    return TranslateOptions(args.top_k, args.max_syllables, args.product_cap)


def cmd_index(args: argparse.Namespace) -> int:
    t0 = time.perf_counter()
    index = load_ngrams(args.ngram_paths)
    with open(args.out_path, "wb") as fh:
        save_index(index, fh)
    _note(
        f"indexed {len(index)} n-grams ({index.vocabulary_size} words, "
        f"{index.malformed} malformed lines) in {time.perf_counter() - t0:.2f}s"
    )
    return EXIT_OK


def result_record(raw: str, result: TranslationResult | None, lex: Lexicon | None = None,
                  error: str | None = None) -> dict[str, Any]:
    """Machine-readable form of one translation, shared by structured output and tests."""
    if result is None:
        return {"phrase": raw, "status": "error", "error": error, "candidates": []}
    best = result.best_adhoc
    return {
        "phrase": raw,
        "normalized": result.phrase.text,
        "status": result.status.value,
        "error": None,
        "in_dictionary": lex.contains_phrase(result.phrase) if lex is not None else None,
        "best_adhoc": None if best is None else {
            "text": best.text,
            "score": best.score,
            "segmentation": list(best.segmentation.words),
        },
        "candidates": [
            {
                "rank": i,
                "text": c.text,
                "tier": c.tier.label,
                "rank_score": str(c.rank_score),
                "rank_score_float": float(c.rank_score),
                "frequency": c.frequency,
                "entry_id": c.source_entry_id,
            }
            for i, c in enumerate(result.candidates, 1)
        ],
        "diagnostics": vars(result.diagnostics).copy(),
    }


def _emit_plain(rec: dict[str, Any], out: TextIO) -> None:
    phrase = rec["phrase"]
    if rec["status"] == "error":
        print(f"{phrase}\t-\tERROR\t{rec['error']}", file=out)
    elif not rec["candidates"]:
        print(f"{phrase}\t-\tNO_TRANSLATION", file=out)
    for c in rec["candidates"]:
        print(
            f"{phrase}\t{c['rank']}\t{c['text']}\t{c['tier']}\t{c['rank_score']}\t{c['frequency']}",
            file=out,
        )


def _iter_phrases(args: argparse.Namespace) -> Sequence[str]:
    if args.phrases:
        return args.phrases
    return [line.rstrip("\r\n") for line in sys.stdin if line.strip()]


def cmd_translate(args: argparse.Namespace) -> int:
    lex, index = _load_resources(args)
    options = _options(args)
    out = sys.stdout
    for raw in _iter_phrases(args):
        try:
            result = translate(raw, lex, index, options)
        except PhraseTransError as exc:
            rec = result_record(raw, None, error=str(exc))
            _note(f"{raw!r}: {exc}")
        else:
            rec = result_record(raw, result, lex)
            d = result.diagnostics
            if rec["in_dictionary"]:
                _note(f"{result.phrase.text!r} is already a dictionary headword")
            best = result.best_adhoc
            _note(
                f"{result.phrase.text!r}: {d.segmentations_kept}/{d.segmentations_enumerated} "
                f"segmentations kept, {d.adhoc_generated} ad hoc translations, best "
                + (f"{best.text!r} (score {best.score})" if best else "none")
            )
        if args.output == "structured":
            print(json.dumps(rec, ensure_ascii=False), file=out)
        else:
            _emit_plain(rec, out)
    return EXIT_OK


def cmd_eval(args: argparse.Namespace) -> int:
    cases = load_cases(args.cases_path)
    lex, index = _load_resources(args)
    report = run_eval(cases, lex, index, _options(args))
    if args.output == "structured":
        print(json.dumps(report.to_dict(), ensure_ascii=False, indent=2))
    else:
        sys.stdout.write(report.to_text())
        sys.stdout.write(report.to_keyvalue())
    return EXIT_OK


COMMANDS = {"index": cmd_index, "translate": cmd_translate, "eval": cmd_eval}


def main(argv: Sequence[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        _note(f"phrasetrans: error: {exc}")
        return EXIT_USAGE
    except (OSError, FormatError) as exc:
        _note(f"phrasetrans: {exc}")
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
