"""Batch evaluation against reference translations.

A case matches when a candidate's text equals one of its references after
target-side tokenization. Precision and recall here are reference-based
(``top1 / answered`` and ``top1 / total``), not human judgements.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Any, Sequence

from ._io import Source, iter_text_lines
from .errors import FormatError, PhraseTransError
from .lexicon import Lexicon
from .ngram_index import NgramIndex
from .pipeline import TranslateOptions, translate
from .textnorm import tokenize_target


@dataclass(frozen=True)
class EvalCase:
    phrase: str
    references: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.phrase.strip():
            raise ValueError("eval case phrase is empty")
        if not self.references:
            raise ValueError("eval case needs at least one reference")


@dataclass
class CaseRecord:
    index: int
    phrase: str
    answered: bool
    top1_match: bool
    topk_match: bool
    candidates: list[str]
    error: str | None = None


def _ratio(num: int, den: int) -> float:
    return num / den if den else 0.0


@dataclass
class EvalReport:
    total: int = 0
    answered: int = 0
    top1_matches: int = 0
    topk_matches: int = 0
    top_k: int = 0
    cases: list[CaseRecord] = field(default_factory=list)

    @property
    def coverage(self) -> float:
        return _ratio(self.answered, self.total)

    @property
    def match_rate(self) -> float:
        return _ratio(self.top1_matches, self.answered)

    @property
    def topk_match_rate(self) -> float:
        return _ratio(self.topk_matches, self.answered)

    @property
    def precision(self) -> float:
        return _ratio(self.top1_matches, self.answered)

    @property
    def recall(self) -> float:
        return _ratio(self.top1_matches, self.total)

    def metrics(self) -> dict[str, Any]:
        return {
            "total": self.total,
            "answered": self.answered,
            "top1_matches": self.top1_matches,
            "topk_matches": self.topk_matches,
            "top_k": self.top_k,
            "coverage": self.coverage,
            "match_rate": self.match_rate,
            "topk_match_rate": self.topk_match_rate,
            "precision_ref": self.precision,
            "recall_ref": self.recall,
        }

    def to_keyvalue(self) -> str:
        return "".join(f"{k}={v}\n" for k, v in self.metrics().items())

    def to_dict(self) -> dict[str, Any]:
        return {"metrics": self.metrics(), "cases": [asdict(c) for c in self.cases]}

    def to_text(self) -> str:
        lines = []
        for c in self.cases:
            mark = "MATCH" if c.top1_match else ("topk" if c.topk_match else "-")
            if c.error:
                shown = f"error: {c.error}"
            else:
                shown = c.candidates[0] if c.candidates else "(no translation)"
            lines.append(f"[{mark:>5}] {c.phrase} -> {shown}")
        m = self.metrics()
        lines.append(
            f"cases {m['total']}, answered {m['answered']}, "
            f"top-1 matches {m['top1_matches']}, top-{self.top_k} matches {m['topk_matches']}"
        )
        lines.append(
            f"coverage {m['coverage']:.4f}  match rate {m['match_rate']:.4f}  "
            f"top-{self.top_k} match rate {m['topk_match_rate']:.4f}"
        )
        lines.append(
            f"reference-based precision {m['precision_ref']:.4f}  recall {m['recall_ref']:.4f}"
        )
        return "\n".join(lines) + "\n"


def load_cases(source: Source) -> list[EvalCase]:
    """Read ``phrase<TAB>ref_1[<TAB>ref_2...]`` lines.

    Raises:
        FormatError: the file has no valid case.
    """
    cases = []
    for _, text in iter_text_lines(source):
        if text is None or not text.strip() or text.startswith("#"):
            continue
        phrase, *refs = text.split("\t")
        refs = [r for r in refs if r.strip()]
        if not phrase.strip() or not refs:
            continue
        cases.append(EvalCase(phrase, tuple(refs)))
    if not cases:
        raise FormatError("evaluation file contains no valid cases")
    return cases


def _norm(text: str) -> str:
    return " ".join(tokenize_target(text))


def evaluate_case(
    i: int, case: EvalCase, lex: Lexicon, index: NgramIndex, options: TranslateOptions
) -> CaseRecord:
    refs = {_norm(r) for r in case.references}
    try:
        result = translate(case.phrase, lex, index, options)
    except PhraseTransError as exc:
        return CaseRecord(i, case.phrase, False, False, False, [], error=str(exc))
    texts = [c.text for c in result.candidates]
    return CaseRecord(
        i,
        case.phrase,
        answered=bool(texts),
        top1_match=bool(texts) and texts[0] in refs,
        topk_match=any(t in refs for t in texts),
        candidates=texts,
    )


def run_eval(
    cases: Sequence[EvalCase],
    lex: Lexicon,
    index: NgramIndex,
    options: TranslateOptions | None = None,
) -> EvalReport:
    options = options or TranslateOptions()
    report = EvalReport(top_k=options.top_k)
    for i, case in enumerate(cases):
        rec = evaluate_case(i, case, lex, index, options)
        report.cases.append(rec)
        report.total += 1
        report.answered += rec.answered
        report.top1_matches += rec.top1_match
        report.topk_matches += rec.topk_match
    return report
