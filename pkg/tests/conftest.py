"""Shared fixtures: frozen worked examples with hand-checked metric values.

The two reference/transcript pairs below are real Pashto screening
examples kept verbatim. Their edit counts were derived by hand from a
1:1 alignment and double-checked against an independent recursive
implementation, so they anchor the metric conventions (word edits over
reference words; codepoint edits over space-stripped text).
"""

from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

# 21 reference words; 7 word edits; 66 reference codepoints (no spaces);
# 10 codepoint edits.
SAMPLE_A_REF = "د پړانګ غپیدا د یو زمري د بشپړ غپیدلو غږ په څیر نه دي بلکه ډیر د غوړمبهار چيغې جملو په"
SAMPLE_A_HYP = "د پړانک غپيدا د یو ځمری د بشپړ غپېدلو غږ په څیر نه دي بلکې ډیر د غوړبهار چèږي جملو په"

# 27 reference words; 7 word edits; 87 reference codepoints (no spaces);
# 17 codepoint edits. CER/WER ratio 0.75, above the 0.6 screen threshold.
SAMPLE_B_REF = "د عیش عشرت د اساسي مرکز کیدو شهرت په شاوخوا ۴۰۰ ad میلادي کال کې پیل شو او تر ۱۱۰۰ ad میلادي کال پورې یې دوام وکړ"
SAMPLE_B_HYP = "د اش عشرت د اساسي مرکز کېدو شهرت په شاوخوا څسرسفر میلادي کال کې پیل شو او تر سر سفر میلادي کال پورې دوام وکړ"


@pytest.fixture(scope="session")
def sample_a() -> tuple[str, str]:
    return SAMPLE_A_REF, SAMPLE_A_HYP


@pytest.fixture(scope="session")
def sample_b() -> tuple[str, str]:
    return SAMPLE_B_REF, SAMPLE_B_HYP
