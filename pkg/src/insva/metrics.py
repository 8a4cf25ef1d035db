"""Round-trip intelligibility metrics: WER, CER and bootstrap intervals.

Scoring contract:

* WER is word edit distance over reference word count, computed on
  normalized token sequences.
* CER is codepoint edit distance over reference codepoint count, computed
  on normalized text with spaces removed, so word segmentation errors are
  not double counted at the character level.
* Corpus rates are ratio-of-sums (total edits over total reference
  length), not averages of per-utterance rates, so short utterances do
  not dominate.
* The corpus WER interval is a percentile bootstrap over utterances with
  a seeded PCG64 generator; reruns with the same seed are bit-identical.

An utterance whose reference normalizes to nothing cannot be scored and
raises EmptyReference; callers exclude it with a reason instead of
letting a 0/0 slip through. An empty hypothesis against a non-empty
reference is a legitimate worst case (WER 1.0) and is scored normally.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .alignment import edit_distance
from .textnorm import NormalizedText

DEFAULT_RESAMPLES = 2000
LOW_ERROR_THRESHOLD = 0.10
RNG_NAME = "pcg64"


class EmptyReference(ValueError):
    """Reference text normalized to zero tokens; the utterance is unscorable."""


class EmptyScoreSet(ValueError):
    """summarize() needs at least one utterance score."""


@dataclass(frozen=True)
class UtteranceScore:
    prompt_id: str
    system_id: str
    source_set: str
    backend_id: str
    ref_word_count: int
    word_edits: int
    ref_char_count: int
    char_edits: int
    sfr: Optional[float] = None

    @property
    def wer(self) -> float:
        return self.word_edits / self.ref_word_count

    @property
    def cer(self) -> float:
        return self.char_edits / self.ref_char_count

    @property
    def perfect(self) -> bool:
        return self.word_edits == 0

    def is_low_error(self, threshold: float = LOW_ERROR_THRESHOLD) -> bool:
        # Rounded before comparison so a rate that prints as the threshold
        # is counted on the inclusive side.
        return round(self.wer, 6) <= threshold


def score_utterance(
    ref: NormalizedText,
    hyp: NormalizedText,
    *,
    prompt_id: str,
    system_id: str,
    source_set: str,
    backend_id: str,
    sfr: Optional[float] = None,
) -> UtteranceScore:
    if ref.is_empty:
        raise EmptyReference(f"prompt {prompt_id}: reference normalized to empty text")
    ref_chars = ref.chars
    hyp_chars = hyp.chars
    return UtteranceScore(
        prompt_id=prompt_id,
        system_id=system_id,
        source_set=source_set,
        backend_id=backend_id,
        ref_word_count=len(ref.tokens),
        word_edits=edit_distance(ref.tokens, hyp.tokens),
        ref_char_count=len(ref_chars),
        char_edits=edit_distance(ref_chars, hyp_chars),
        sfr=sfr,
    )


@dataclass(frozen=True)
class BootstrapCI:
    lo: float
    hi: float
    n_resamples: int
    seed: int
    rng_name: str = RNG_NAME
    statistic: str = "ratio_of_sums"
    percentile_method: str = "linear"

    @property
    def half_width(self) -> float:
        return (self.hi - self.lo) / 2.0


def bootstrap_ci(
    numerators: Sequence[float],
    denominators: Sequence[float],
    *,
    seed: int,
    n_resamples: int = DEFAULT_RESAMPLES,
) -> BootstrapCI:
    """95% percentile bootstrap of sum(numerators)/sum(denominators).

    Resampling draws utterance indices with ``Generator(PCG64(seed))``
    via a single ``integers(0, n, size=(n_resamples, n))`` call, which
    consumes the stream row by row: resample r uses draws r*n..(r+1)*n-1.
    Interval endpoints are the 2.5th and 97.5th percentiles with linear
    interpolation.
    """
    num = np.asarray(numerators, dtype=np.float64)
    den = np.asarray(denominators, dtype=np.float64)
    if num.ndim != 1 or num.shape != den.shape:
        raise ValueError("numerators and denominators must be 1-d and equal length")
    if num.size == 0:
        raise EmptyScoreSet("cannot bootstrap an empty score set")
    if np.any(den <= 0):
        raise ValueError("denominators must be positive")
    n = num.size
    rng = np.random.Generator(np.random.PCG64(seed))
    idx = rng.integers(0, n, size=(n_resamples, n))
    stats = num[idx].sum(axis=1) / den[idx].sum(axis=1)
    lo, hi = np.percentile(stats, (2.5, 97.5))
    return BootstrapCI(lo=float(lo), hi=float(hi), n_resamples=n_resamples, seed=seed)


@dataclass(frozen=True)
class IntelligibilitySummary:
    system_id: str
    source_set: str
    backend_id: str
    n_scored: int
    corpus_wer: float
    corpus_cer: float
    perfect_pct: float
    low_error_pct: float
    ci_lo: float
    ci_hi: float
    n_resamples: int
    seed: int
    rng_name: str = RNG_NAME

    @property
    def ci_half_width(self) -> float:
        return (self.ci_hi - self.ci_lo) / 2.0


def summarize(
    scores: Sequence[UtteranceScore],
    *,
    seed: int,
    n_resamples: int = DEFAULT_RESAMPLES,
    low_error_threshold: float = LOW_ERROR_THRESHOLD,
) -> IntelligibilitySummary:
    """Corpus-level intelligibility for one system/source/backend cell."""
    if not scores:
        raise EmptyScoreSet("no scored utterances to summarize")
    keys = {(s.system_id, s.source_set, s.backend_id) for s in scores}
    if len(keys) != 1:
        raise ValueError(f"summarize() got mixed score cells: {sorted(keys)}")
    ordered = sorted(scores, key=lambda s: s.prompt_id)
    word_edits = [s.word_edits for s in ordered]
    ref_words = [s.ref_word_count for s in ordered]
    ci = bootstrap_ci(word_edits, ref_words, seed=seed, n_resamples=n_resamples)
    n = len(ordered)
    (system_id, source_set, backend_id) = next(iter(keys))
    return IntelligibilitySummary(
        system_id=system_id,
        source_set=source_set,
        backend_id=backend_id,
        n_scored=n,
        corpus_wer=sum(word_edits) / sum(ref_words),
        corpus_cer=sum(s.char_edits for s in ordered) / sum(s.ref_char_count for s in ordered),
        perfect_pct=100.0 * sum(1 for s in ordered if s.perfect) / n,
        low_error_pct=100.0 * sum(1 for s in ordered if s.is_low_error(low_error_threshold)) / n,
        ci_lo=ci.lo,
        ci_hi=ci.hi,
        n_resamples=n_resamples,
        seed=seed,
    )
