"""Screening benchmark engine for low-resource non-Latin-script TTS.

Measures synthesized speech along four automatic axes (round-trip
intelligibility, script fidelity, language verification, synthesis
completion), screens for characteristic failure modes, and packages a
blinded listening survey for the one axis that still needs human ears.
"""

__version__ = "0.1.0"

from .alignment import align, backend_name, edit_distance
from .metrics import (
    BootstrapCI,
    EmptyReference,
    EmptyScoreSet,
    IntelligibilitySummary,
    UtteranceScore,
    bootstrap_ci,
    score_utterance,
    summarize,
)
from .script_fidelity import SCRIPT_SETS, ScriptSet, SfrResult, compute_sfr
from .textnorm import PASHTO_V1, NormalizationProfile, NormalizedText, normalize_text, tokenize

__all__ = [
    "__version__",
    "align",
    "backend_name",
    "edit_distance",
    "BootstrapCI",
    "EmptyReference",
    "EmptyScoreSet",
    "IntelligibilitySummary",
    "UtteranceScore",
    "bootstrap_ci",
    "score_utterance",
    "summarize",
    "SCRIPT_SETS",
    "ScriptSet",
    "SfrResult",
    "compute_sfr",
    "PASHTO_V1",
    "NormalizationProfile",
    "NormalizedText",
    "normalize_text",
    "tokenize",
]
