"""Text normalization for Perso-Arabic script ASR scoring.

Reference and hypothesis strings must pass through the same profile before
any metric is computed, otherwise orthographic noise (diacritics, tatweel,
punctuation, joiner characters) shows up as phantom edit operations.

The default profile ("pashto-v1") applies, in order:

1. Unicode NFC
2. tatweel (U+0640) removal
3. punctuation replaced by a space: any general category P* plus the
   Arabic marks U+060C, U+061B, U+061F and U+066A..U+066D
4. removal of combining diacritics in U+064B..U+065F and U+0670
5. removal of ZWNJ/ZWJ (U+200C, U+200D)
6. whitespace collapsed to single spaces, ends trimmed

Digits are kept exactly as written, including Arabic-Indic forms
(U+0660..U+0669, U+06F0..U+06F9); no digit folding or spelling-out is
attempted. Tokens are the space-separated fields of the result.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

_UNICODE_FORMS = ("NFC", "NFD", "NFKC", "NFKD")

TATWEEL = "ـ"
ZWNJ = "‌"
ZWJ = "‍"

# Explicitly listed so the intent survives even if a Unicode revision
# reclassifies them; all are punctuation-category today.
ARABIC_PUNCTUATION = frozenset("،؛؟٪٫٬٭")

DEFAULT_DIACRITIC_RANGES: tuple[tuple[int, int], ...] = ((0x064B, 0x065F), (0x0670, 0x0670))


@lru_cache(maxsize=4096)
def _is_punct(ch: str) -> bool:
    return ch in ARABIC_PUNCTUATION or unicodedata.category(ch).startswith("P")


@dataclass(frozen=True)
class NormalizationProfile:
    """A named, serializable description of the normalization pipeline."""

    name: str = "pashto-v1"
    unicode_form: str = "NFC"
    strip_tatweel: bool = True
    strip_punctuation: bool = True
    diacritic_ranges: tuple[tuple[int, int], ...] = DEFAULT_DIACRITIC_RANGES
    strip_joiners: bool = True

    def __post_init__(self) -> None:
        if self.unicode_form not in _UNICODE_FORMS:
            raise ValueError(f"unknown unicode form: {self.unicode_form!r}")
        for lo, hi in self.diacritic_ranges:
            if lo > hi:
                raise ValueError(f"empty diacritic range: {lo:#06x}-{hi:#06x}")

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "unicode_form": self.unicode_form,
            "strip_tatweel": self.strip_tatweel,
            "strip_punctuation": self.strip_punctuation,
            "diacritic_ranges": [[lo, hi] for lo, hi in self.diacritic_ranges],
            "strip_joiners": self.strip_joiners,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "NormalizationProfile":
        return cls(
            name=data["name"],
            unicode_form=data["unicode_form"],
            strip_tatweel=data["strip_tatweel"],
            strip_punctuation=data["strip_punctuation"],
            diacritic_ranges=tuple((int(lo), int(hi)) for lo, hi in data["diacritic_ranges"]),
            strip_joiners=data["strip_joiners"],
        )


PASHTO_V1 = NormalizationProfile()


@dataclass(frozen=True)
class NormalizedText:
    """Normalized text plus its token sequence; input to every metric."""

    text: str
    tokens: tuple[str, ...]
    profile_name: str
    source_id: Optional[str] = None

    @property
    def word_count(self) -> int:
        return len(self.tokens)

    @property
    def is_empty(self) -> bool:
        return not self.tokens

    @property
    def chars(self) -> str:
        """Codepoints scored by character-level metrics: spaces excluded."""
        return self.text.replace(" ", "")


def _in_ranges(cp: int, ranges: tuple[tuple[int, int], ...]) -> bool:
    return any(lo <= cp <= hi for lo, hi in ranges)


def normalize_text(
    raw: str,
    profile: NormalizationProfile = PASHTO_V1,
    source_id: Optional[str] = None,
) -> NormalizedText:
    text = unicodedata.normalize(profile.unicode_form, raw)
    if profile.strip_tatweel:
        text = text.replace(TATWEEL, "")
    if profile.strip_punctuation:
        text = "".join(" " if _is_punct(ch) else ch for ch in text)
    if profile.diacritic_ranges:
        ranges = profile.diacritic_ranges
        text = "".join(ch for ch in text if not _in_ranges(ord(ch), ranges))
    if profile.strip_joiners:
        text = text.replace(ZWNJ, "").replace(ZWJ, "")
    tokens = tuple(text.split())
    return NormalizedText(
        text=" ".join(tokens),
        tokens=tokens,
        profile_name=profile.name,
        source_id=source_id,
    )


def tokenize(text: str) -> tuple[str, ...]:
    """Whitespace tokenization matching normalize_text output exactly."""
    return tuple(text.split())
