"""Dictionary plus n-gram phrase translation without grammar rules."""

from .errors import (
    CandidateExplosion,
    EmptyInput,
    EmptyQuery,
    FormatError,
    NoMatches,
    PhraseTooLong,
    PhraseTransError,
    UnknownId,
    VersionMismatch,
)
from .evalharness import EvalCase, EvalReport, load_cases, run_eval
from .lexicon import DictEntry, Lexicon, load_dictionary
from .ngram_index import NgramEntry, NgramIndex, SupersetResult, load_index, load_ngrams, save_index
from .pipeline import (
    AdHocTranslation,
    RankedCandidate,
    Segmentation,
    Status,
    Tier,
    TranslateOptions,
    TranslationResult,
    enumerate_segmentations,
    filter_segmentations,
    generate_adhoc_translations,
    rank_candidates,
    score_bag,
    select_best_adhoc,
    translate,
)
from .textnorm import SourcePhrase, normalize_source, tokenize_target

__version__ = "0.1.0"
