"""Script Fidelity Rate: how much of a transcript stays in the target script.

A hypothesis produced for Pashto input that comes back in Latin or
Devanagari codepoints signals language substitution rather than mere
mis-recognition, so the rate is tracked per utterance alongside WER/CER.

Only "countable" codepoints participate: combining marks, whitespace,
control/format characters and ASCII punctuation are ignored. An utterance
with zero countable codepoints (an empty transcript, for instance) has an
undefined rate, reported as None and excluded from aggregates; mapping it
to 0.0 would fabricate a worst-case fidelity signal out of no evidence.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Union

from .textnorm import NormalizedText

PERSO_ARABIC_RANGES: tuple[tuple[int, int], ...] = (
    (0x0600, 0x06FF),
    (0xFB50, 0xFDFF),
    (0xFE70, 0xFEFF),
)

_ASCII_PUNCT = frozenset(r"""!"#$%&'()*+,-./:;<=>?@[\]^_`{|}~""")


@dataclass(frozen=True)
class ScriptSet:
    """Named set of codepoint ranges treated as in-script."""

    name: str
    ranges: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        if not self.ranges:
            raise ValueError("a script set needs at least one range")
        for lo, hi in self.ranges:
            if lo > hi:
                raise ValueError(f"empty script range: {lo:#06x}-{hi:#06x}")

    def contains(self, ch: str) -> bool:
        cp = ord(ch)
        return any(lo <= cp <= hi for lo, hi in self.ranges)

    def to_dict(self) -> dict:
        return {"name": self.name, "ranges": [[lo, hi] for lo, hi in self.ranges]}

    @classmethod
    def from_dict(cls, data: dict) -> "ScriptSet":
        return cls(name=data["name"], ranges=tuple((int(lo), int(hi)) for lo, hi in data["ranges"]))


SCRIPT_SETS: dict[str, ScriptSet] = {
    "pashto": ScriptSet("pashto", PERSO_ARABIC_RANGES),
    # Urdu shares the Perso-Arabic blocks; the separate name keeps run
    # configs explicit about which language a control system targets.
    "urdu-arabic": ScriptSet("urdu-arabic", PERSO_ARABIC_RANGES),
    "latin": ScriptSet("latin", ((0x0041, 0x005A), (0x0061, 0x007A), (0x00C0, 0x024F))),
}


@lru_cache(maxsize=4096)
def is_countable(ch: str) -> bool:
    if ch.isspace() or ch in _ASCII_PUNCT:
        return False
    if unicodedata.combining(ch) != 0:
        return False
    return not unicodedata.category(ch).startswith("C")


@dataclass(frozen=True)
class SfrResult:
    value: Optional[float]
    countable: int
    in_script: int
    script_name: str

    @property
    def defined(self) -> bool:
        return self.value is not None


def compute_sfr(text: Union[str, NormalizedText], script_set: ScriptSet) -> SfrResult:
    if isinstance(text, NormalizedText):
        text = text.text
    countable = 0
    in_script = 0
    for ch in text:
        if not is_countable(ch):
            continue
        countable += 1
        if script_set.contains(ch):
            in_script += 1
    value = in_script / countable if countable else None
    return SfrResult(value=value, countable=countable, in_script=in_script, script_name=script_set.name)
