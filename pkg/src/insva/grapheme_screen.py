"""Grapheme-class breakdowns and screens for suspicious error shapes.

Pashto extends the Perso-Arabic inventory with letters Arabic lacks
(retroflexes, lateral fricatives, affricates, dedicated vowel signs).
Systems trained mostly on Arabic or Urdu data tend to collapse exactly
those letters, so WER is broken down by classes of prompts containing
them, and two screens flag utterances worth a listener's time:

* phoneme-collapse screen: prompts containing target-unique letters that
  score notably worse than the rest of the corpus;
* grapheme-ambiguity screen (high CER/WER ratio): words are mostly right
  but codepoints inside them are not, the signature of systematic
  letter-level confusions rather than lexical errors.

A letter-level confusion is only reported as a consensus pattern when
independent recognition backends substitute the same codepoint pair on
the same prompt, which removes most single-model decoding noise.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence, Union

from .alignment import align, substitutions
from .metrics import UtteranceScore
from .textnorm import NormalizedText

logger = logging.getLogger(__name__)

RETROFLEX_STOPS = frozenset("ټډ")          # ټ ډ
RETROFLEX_NASAL_FLAP = frozenset("ڼړ")     # ڼ ړ
LATERAL_FRICATIVES = frozenset("ښږ")       # ښ ږ
AFFRICATES = frozenset("ځڅ")               # ځ څ
PASHTO_VOWEL_MARKERS = frozenset("ېۍ")     # ې ۍ

PASHTO_UNIQUE = (
    RETROFLEX_STOPS | RETROFLEX_NASAL_FLAP | LATERAL_FRICATIVES | AFFRICATES
)


@dataclass(frozen=True)
class GraphemeClass:
    """A prompt class keyed by letter membership.

    complement=True inverts the test: the class holds prompts containing
    none of the members (used for the common-Arabic-letters-only class).
    """

    class_id: str
    members: frozenset[str]
    complement: bool = False

    def matches(self, text: Union[str, NormalizedText]) -> bool:
        if isinstance(text, NormalizedText):
            text = text.text
        hit = any(ch in self.members for ch in text)
        return not hit if self.complement else hit


DEFAULT_CLASSES: tuple[GraphemeClass, ...] = (
    GraphemeClass("retroflex_stops", RETROFLEX_STOPS),
    GraphemeClass("retroflex_nasal_flap", RETROFLEX_NASAL_FLAP),
    GraphemeClass("lateral_fricatives", LATERAL_FRICATIVES),
    GraphemeClass("affricates", AFFRICATES),
    GraphemeClass("pashto_vowel_markers", PASHTO_VOWEL_MARKERS),
    GraphemeClass("pashto_unique", PASHTO_UNIQUE),
    GraphemeClass("common_arabic_only", PASHTO_UNIQUE, complement=True),
)

TARGET_UNIQUE_CLASS_IDS = (
    "retroflex_stops",
    "retroflex_nasal_flap",
    "lateral_fricatives",
    "affricates",
    "pashto_vowel_markers",
    "pashto_unique",
)


def classify_prompt(
    text: Union[str, NormalizedText],
    classes: Sequence[GraphemeClass] = DEFAULT_CLASSES,
) -> frozenset[str]:
    return frozenset(c.class_id for c in classes if c.matches(text))


def class_wer(
    scores: Sequence[UtteranceScore],
    memberships: Mapping[str, frozenset[str]],
    class_id: str,
) -> Optional[float]:
    """Length-weighted WER over prompts belonging to one class.

    None when the class is empty for this score set; that absence is
    logged rather than raised because sparse source sets legitimately
    miss rare classes.
    """
    edits = 0
    words = 0
    for s in scores:
        if class_id in memberships.get(s.prompt_id, frozenset()):
            edits += s.word_edits
            words += s.ref_word_count
    if words == 0:
        logger.info("class %s has no scored prompts in this set", class_id)
        return None
    return edits / words


@dataclass(frozen=True)
class F5Flag:
    prompt_id: str
    backend_id: str
    wer: float
    cer: float
    ratio: float


def f5_screen(
    scores: Iterable[UtteranceScore],
    *,
    ratio_threshold: float = 0.6,
) -> list[F5Flag]:
    """Flag utterances whose CER/WER ratio says errors live inside words.

    Utterances with zero WER carry no signal for this screen and are
    skipped (their ratio would be undefined).
    """
    flags = []
    for s in scores:
        wer = s.wer
        if wer <= 0.0:
            continue
        ratio = s.cer / wer
        if ratio >= ratio_threshold:
            flags.append(F5Flag(s.prompt_id, s.backend_id, wer, s.cer, ratio))
    flags.sort(key=lambda f: (-f.ratio, f.prompt_id, f.backend_id))
    return flags


@dataclass(frozen=True)
class SubstitutionPattern:
    ref_codepoint: str
    hyp_codepoint: str
    prompt_ids: tuple[str, ...]
    backends: tuple[str, ...]

    @property
    def count(self) -> int:
        return len(self.prompt_ids)


class InsufficientBackends(ValueError):
    """Codepoint consensus needs alignments from at least two backends."""


def codepoint_consensus(
    alignments: Mapping[str, Mapping[str, Sequence[tuple[Optional[str], Optional[str]]]]],
    *,
    min_backends: int = 2,
) -> list[SubstitutionPattern]:
    """Cross-backend agreement on codepoint substitutions.

    alignments maps backend_id -> prompt_id -> aligned (ref, hyp) pairs.
    A (ref, hyp) substitution becomes a pattern when at least
    min_backends backends produced it on the same prompt; the pattern
    lists every such prompt and count = number of prompts.
    """
    if len(alignments) < min_backends:
        raise InsufficientBackends(
            f"need alignments from >= {min_backends} backends, got {len(alignments)}"
        )
    # (ref, hyp, prompt) -> set of backends that saw it
    seen: dict[tuple[str, str, str], set[str]] = {}
    for backend_id, per_prompt in alignments.items():
        for prompt_id, pairs in per_prompt.items():
            subs = {
                (r, h)
                for r, h in pairs
                if r is not None and h is not None and r != h
            }
            for r, h in subs:
                seen.setdefault((r, h, prompt_id), set()).add(backend_id)

    grouped: dict[tuple[str, str], dict[str, set[str]]] = {}
    for (r, h, prompt_id), backends in seen.items():
        if len(backends) >= min_backends:
            grouped.setdefault((r, h), {})[prompt_id] = backends

    patterns = []
    for (r, h), prompts in grouped.items():
        all_backends: set[str] = set()
        for backends in prompts.values():
            all_backends |= backends
        patterns.append(
            SubstitutionPattern(
                ref_codepoint=r,
                hyp_codepoint=h,
                prompt_ids=tuple(sorted(prompts)),
                backends=tuple(sorted(all_backends)),
            )
        )
    patterns.sort(key=lambda p: (-p.count, p.ref_codepoint, p.hyp_codepoint))
    return patterns


def codepoint_alignment(
    ref: NormalizedText, hyp: NormalizedText
) -> list[tuple[Optional[str], Optional[str]]]:
    """Codepoint alignment of space-stripped normalized texts."""
    return align(list(ref.chars), list(hyp.chars))


def codepoint_substitutions(ref: NormalizedText, hyp: NormalizedText) -> list[tuple[str, str]]:
    return substitutions(list(ref.chars), list(hyp.chars))
