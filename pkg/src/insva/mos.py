"""Blinded MOS listening-survey export.

Naturalness is not scored automatically; instead a listening survey is
prepared from prompts that every core system actually synthesized:

* candidates are 5..25 words long and contain at least one letter from
  a target-unique grapheme class;
* a seeded, source-stratified draw picks the survey sentences;
* sentence i rated on form f comes from core system (i + f) mod 4, so
  each form hears every sentence once and every system equally often;
* each form appends other-language control clips and repeated items as
  attention and consistency checks, then shuffles;
* audio is renamed to mos_<digest12>.mp3 where the digest hashes
  seed|system|source|prompt, so neither filename order nor content leaks
  the system.

Survey-facing rows never carry system ids or item kinds; that mapping
lives only in the blind key, which is emitted separately.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

MIN_WORDS = 5
MAX_WORDS = 25
N_SENTENCES = 50
N_FORMS = 4
N_CONTROLS_PER_FORM = 2
N_REPEATS_PER_FORM = 3

KIND_RATED = "rated"
KIND_CONTROL = "control"
KIND_REPEAT = "repeat"


class InsufficientEligible(ValueError):
    """Fewer eligible sentences than the survey needs."""


@dataclass(frozen=True)
class MosCandidate:
    prompt_id: str
    source_set: str
    word_count: int
    has_target_unique: bool

    @property
    def eligible(self) -> bool:
        return MIN_WORDS <= self.word_count <= MAX_WORDS and self.has_target_unique


@dataclass(frozen=True)
class MosItem:
    form_id: int
    position: int
    blinded_file: str
    kind: str
    system_id: str
    source_set: str
    prompt_id: str


@dataclass(frozen=True)
class MosExport:
    seed: int
    core_systems: tuple[str, ...]
    control_system: str
    items: tuple[MosItem, ...]

    def form(self, form_id: int) -> tuple[MosItem, ...]:
        return tuple(i for i in self.items if i.form_id == form_id)

    @property
    def form_ids(self) -> tuple[int, ...]:
        return tuple(sorted({i.form_id for i in self.items}))

    def survey_rows(self, form_id: int) -> list[tuple[int, str]]:
        """(position, blinded_file) only; nothing that could unblind a rater."""
        return [(i.position, i.blinded_file) for i in sorted(self.form(form_id), key=lambda x: x.position)]

    def key_rows(self) -> list[tuple[int, int, str, str, str, str, str]]:
        return [
            (i.form_id, i.position, i.blinded_file, i.kind, i.system_id, i.source_set, i.prompt_id)
            for i in self.items
        ]

    def audio_jobs(self) -> list[tuple[str, str, str, str]]:
        """Unique (blinded_file, system, source, prompt) tuples for audio prep."""
        seen = {}
        for i in self.items:
            seen.setdefault(i.blinded_file, (i.blinded_file, i.system_id, i.source_set, i.prompt_id))
        return [seen[k] for k in sorted(seen)]


def blinded_name(seed: int, system_id: str, source_set: str, prompt_id: str, ext: str = ".mp3") -> str:
    digest = hashlib.sha256(f"{seed}|{system_id}|{source_set}|{prompt_id}".encode("utf-8")).hexdigest()
    return f"mos_{digest[:12]}{ext}"


def _stratified_quota(counts: dict[str, int], total: int) -> dict[str, int]:
    """Proportional quotas with largest-remainder rounding."""
    pool = sum(counts.values())
    raw = {k: total * v / pool for k, v in counts.items()}
    quota = {k: int(raw[k]) for k in counts}
    short = total - sum(quota.values())
    by_remainder = sorted(counts, key=lambda k: (-(raw[k] - quota[k]), k))
    for k in by_remainder[:short]:
        quota[k] += 1
    return quota


def select_sentences(
    candidates: Iterable[MosCandidate],
    *,
    seed: int,
    n_sentences: int = N_SENTENCES,
    rng: Optional[np.random.Generator] = None,
) -> list[MosCandidate]:
    """Source-stratified seeded draw of eligible sentences."""
    eligible = sorted(
        (c for c in candidates if c.eligible), key=lambda c: (c.source_set, c.prompt_id)
    )
    if len(eligible) < n_sentences:
        raise InsufficientEligible(
            f"need {n_sentences} eligible sentences, found {len(eligible)}"
        )
    if rng is None:
        rng = np.random.Generator(np.random.PCG64(seed))
    by_set: dict[str, list[MosCandidate]] = {}
    for c in eligible:
        by_set.setdefault(c.source_set, []).append(c)
    quota = _stratified_quota({k: len(v) for k, v in by_set.items()}, n_sentences)
    chosen: list[MosCandidate] = []
    for source_set in sorted(by_set):
        stratum = by_set[source_set]
        take = min(quota[source_set], len(stratum))
        picks = rng.choice(len(stratum), size=take, replace=False)
        chosen.extend(stratum[i] for i in sorted(picks))
    # Rounding can leave a stratum short when quota exceeds its size;
    # top up from the leftover pool deterministically.
    if len(chosen) < n_sentences:
        leftover = [c for c in eligible if c not in chosen]
        extra = rng.choice(len(leftover), size=n_sentences - len(chosen), replace=False)
        chosen.extend(leftover[i] for i in sorted(extra))
    chosen.sort(key=lambda c: (c.source_set, c.prompt_id))
    return chosen


def export_mos(
    candidates: Iterable[MosCandidate],
    *,
    core_systems: Sequence[str],
    control_system: str,
    seed: int,
    n_sentences: int = N_SENTENCES,
    n_controls: int = N_CONTROLS_PER_FORM,
    n_repeats: int = N_REPEATS_PER_FORM,
    audio_ext: str = ".mp3",
) -> MosExport:
    """Build the four survey forms.

    The caller must pass candidates whose audio exists for every core
    system; eligibility here only covers length and grapheme content.
    All randomness flows from one PCG64 generator in a fixed order
    (selection, then per form: controls, repeats, shuffle), so a seed
    pins the entire export.
    """
    core_systems = tuple(core_systems)
    if len(core_systems) != N_FORMS:
        raise ValueError(
            f"the {N_FORMS}-form Latin square needs exactly {N_FORMS} core systems, got {len(core_systems)}"
        )
    if control_system in core_systems:
        raise ValueError("control system cannot be one of the core systems")
    rng = np.random.Generator(np.random.PCG64(seed))
    sentences = select_sentences(candidates, seed=seed, n_sentences=n_sentences, rng=rng)

    items: list[MosItem] = []
    for form_id in range(N_FORMS):
        form_items: list[tuple[str, str, str, str]] = []  # (kind, system, source, prompt)
        for i, sentence in enumerate(sentences):
            system = core_systems[(i + form_id) % N_FORMS]
            form_items.append((KIND_RATED, system, sentence.source_set, sentence.prompt_id))
        control_picks = rng.choice(len(sentences), size=n_controls, replace=False)
        for i in sorted(control_picks):
            sentence = sentences[i]
            form_items.append((KIND_CONTROL, control_system, sentence.source_set, sentence.prompt_id))
        repeat_picks = rng.choice(len(form_items), size=n_repeats, replace=False)
        for i in sorted(repeat_picks):
            kind, system, source_set, prompt_id = form_items[i]
            form_items.append((KIND_REPEAT, system, source_set, prompt_id))
        order = rng.permutation(len(form_items))
        for position, idx in enumerate(order, start=1):
            kind, system, source_set, prompt_id = form_items[idx]
            items.append(
                MosItem(
                    form_id=form_id + 1,
                    position=position,
                    blinded_file=blinded_name(seed, system, source_set, prompt_id, audio_ext),
                    kind=kind,
                    system_id=system,
                    source_set=source_set,
                    prompt_id=prompt_id,
                )
            )
    return MosExport(
        seed=seed,
        core_systems=core_systems,
        control_system=control_system,
        items=tuple(items),
    )
