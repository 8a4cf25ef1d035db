"""Edit distance and alignment over arbitrary token sequences.

A compiled kernel is preferred when the extension built; otherwise the
pure-Python twin is used. ``INSVA_EDITDIST_BACKEND=python|compiled``
forces the choice (``compiled`` raises if the extension is absent, so
benchmarks cannot silently compare the fallback against itself).
"""

from __future__ import annotations

import os
from typing import Hashable, Optional, Sequence

_FORCED = os.environ.get("INSVA_EDITDIST_BACKEND")
if _FORCED == "python":
    from . import _editdist_py as _impl

    BACKEND = "python"
elif _FORCED == "compiled":
    from . import _editdist as _impl  # type: ignore[no-redef]

    BACKEND = "compiled"
else:
    try:
        from . import _editdist as _impl  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:
        from . import _editdist_py as _impl  # type: ignore[no-redef]

        BACKEND = "python"

OP_MATCH = _impl.OP_MATCH
OP_SUB = _impl.OP_SUB
OP_DEL = _impl.OP_DEL
OP_INS = _impl.OP_INS

AlignedPair = tuple[Optional[Hashable], Optional[Hashable]]


def _encode(ref: Sequence[Hashable], hyp: Sequence[Hashable]) -> tuple[list, list]:
    # Kernels work on small ints; intern tokens through a shared table.
    table: dict = {}
    enc_ref = [table.setdefault(t, len(table)) for t in ref]
    enc_hyp = [table.setdefault(t, len(table)) for t in hyp]
    return enc_ref, enc_hyp


def edit_distance(ref: Sequence[Hashable], hyp: Sequence[Hashable]) -> int:
    """Levenshtein distance with unit insert/delete/substitute costs."""
    enc_ref, enc_hyp = _encode(ref, hyp)
    return _impl.distance(enc_ref, enc_hyp)


def align(ref: Sequence[Hashable], hyp: Sequence[Hashable]) -> list[AlignedPair]:
    """One minimum-cost alignment as (ref_token, hyp_token) pairs.

    Deletions pair the ref token with None, insertions pair None with the
    hyp token. Ties are broken the same way by both kernels, so the
    alignment is deterministic for a given input.
    """
    enc_ref, enc_hyp = _encode(ref, hyp)
    ops = _impl.alignment_ops(enc_ref, enc_hyp)
    pairs: list[AlignedPair] = []
    i = j = 0
    for op in ops:
        if op == OP_MATCH or op == OP_SUB:
            pairs.append((ref[i], hyp[j]))
            i += 1
            j += 1
        elif op == OP_DEL:
            pairs.append((ref[i], None))
            i += 1
        else:
            pairs.append((None, hyp[j]))
            j += 1
    return pairs


def substitutions(ref: Sequence[Hashable], hyp: Sequence[Hashable]) -> list[tuple[Hashable, Hashable]]:
    """Substituted (ref_token, hyp_token) pairs from one deterministic alignment."""
    return [(r, h) for r, h in align(ref, hyp) if r is not None and h is not None and r != h]


def backend_name() -> str:
    return BACKEND
