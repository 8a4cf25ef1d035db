"""Run orchestration: load and validate inputs, score, report, export.

The pipeline composes the metric modules over the wire formats in a
fixed, deterministic order. Given identical inputs, every emitted file
is byte-identical across runs and across --jobs settings: scoring work
may be parallelized, but results are keyed, collected and sorted before
anything is written.

Exclusion policy (the missing-file rule): a prompt is scored for a
backend only when the reference normalizes to something, the synthesis
manifest marks its audio ok (after optional hash verification), and the
backend produced an ok transcript. Everything else becomes an Exclusion
with the narrowest applicable reason and is reported, never silently
dropped; n_scored always equals prompts minus exclusions for that cell.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .alignment import align, edit_distance
from .config import RunConfig, SystemConfig
from .corpus import (
    KIND_DANGLING_REFERENCE,
    KIND_DUPLICATE_KEY,
    KIND_EMPTY_REFERENCE,
    KIND_HASH_MISMATCH,
    KIND_MISSING_FILE,
    KIND_MISSING_HYPOTHESIS,
    SEVERITY_ERROR,
    SEVERITY_WARNING,
    STATUS_OK,
    Exclusion,
    HashReport,
    Hypothesis,
    Issue,
    Prompt,
    SynthesisManifest,
    ValidationReport,
    read_hypotheses,
    read_lid_labels,
    read_manifest,
    read_prompts,
    verify_hashes,
)
from .grapheme_screen import (
    TARGET_UNIQUE_CLASS_IDS,
    F5Flag,
    SubstitutionPattern,
    class_wer,
    classify_prompt,
    codepoint_consensus,
    f5_screen,
)
from .lid_audit import LidLabel, VerificationDecision, aggregate_lid, verify_language
from .metrics import IntelligibilitySummary, UtteranceScore, summarize
from .mos import MosCandidate, MosExport, export_mos
from .script_fidelity import compute_sfr
from .taxonomy import (
    F1Result,
    FailureStatus,
    ReportCard,
    ScreeningEvidence,
    build_report_card,
    classify_failures,
    f1_status,
)
from .textnorm import NormalizedText, normalize_text

Cell = tuple[str, str]  # (system_id, source_set)
ScoreKey = tuple[str, str, str]  # (system_id, source_set, backend_id)


@dataclass
class RunBundle:
    cfg: RunConfig
    prompts: dict[str, dict[str, Prompt]] = field(default_factory=dict)
    refs: dict[str, dict[str, NormalizedText]] = field(default_factory=dict)
    memberships: dict[str, dict[str, frozenset[str]]] = field(default_factory=dict)
    manifests: dict[Cell, SynthesisManifest] = field(default_factory=dict)
    hash_reports: dict[Cell, HashReport] = field(default_factory=dict)
    hypotheses: dict[ScoreKey, dict[str, Hypothesis]] = field(default_factory=dict)
    hyp_meta: dict[str, dict] = field(default_factory=dict)
    lid_labels: dict[Cell, list[LidLabel]] = field(default_factory=dict)

    def backends_for(self, system_id: str, source_set: str) -> tuple[str, ...]:
        return tuple(
            sorted(b for (sys, src, b) in self.hypotheses if sys == system_id and src == source_set)
        )

    def cells(self) -> list[tuple[SystemConfig, str]]:
        """Every configured (system, source) pair with any input, config order."""
        out = []
        for system in self.cfg.systems:
            sources = set(system.manifests)
            sources.update(src for (sys, src) in self.manifests if sys == system.system_id)
            sources.update(src for (sys, src, _) in self.hypotheses if sys == system.system_id)
            sources.update(src for (sys, src) in self.lid_labels if sys == system.system_id)
            for source_set in sorted(sources):
                out.append((system, source_set))
        return out

    def primary_backend(self) -> Optional[str]:
        if self.cfg.primary_backend is not None:
            return self.cfg.primary_backend
        backends = sorted({b for (_, _, b) in self.hypotheses})
        return backends[0] if backends else None


def load_run(cfg: RunConfig) -> tuple[RunBundle, ValidationReport]:
    report = ValidationReport()
    bundle = RunBundle(cfg=cfg)

    for source_set in sorted(cfg.prompts):
        prompts, issues = read_prompts(cfg.prompts[source_set])
        report.extend(issues)
        table: dict[str, Prompt] = {}
        refs: dict[str, NormalizedText] = {}
        members: dict[str, frozenset[str]] = {}
        for p in prompts:
            if p.source_set != source_set:
                report.issues.append(
                    Issue(
                        SEVERITY_ERROR,
                        KIND_DANGLING_REFERENCE,
                        f"prompt {p.prompt_id} declares source_set {p.source_set!r}, file is configured as {source_set!r}",
                        str(cfg.prompts[source_set]),
                    )
                )
                continue
            table[p.prompt_id] = p
            ref = normalize_text(p.text, cfg.profile, source_id=p.prompt_id)
            refs[p.prompt_id] = ref
            members[p.prompt_id] = classify_prompt(ref, cfg.grapheme_classes)
            if ref.is_empty:
                report.issues.append(
                    Issue(
                        SEVERITY_WARNING,
                        KIND_EMPTY_REFERENCE,
                        f"prompt {p.prompt_id} normalizes to empty text; it will be excluded",
                        str(cfg.prompts[source_set]),
                    )
                )
        bundle.prompts[source_set] = table
        bundle.refs[source_set] = refs
        bundle.memberships[source_set] = members

    audio_root = cfg.effective_audio_root()
    for system in cfg.systems:
        for source_set, path in sorted(system.manifests.items()):
            manifest, issues = read_manifest(path)
            report.extend(issues)
            if manifest is None:
                continue
            if manifest.system_id != system.system_id or manifest.source_set != source_set:
                report.issues.append(
                    Issue(
                        SEVERITY_ERROR,
                        KIND_DANGLING_REFERENCE,
                        f"manifest is for {manifest.system_id}/{manifest.source_set}, "
                        f"config expects {system.system_id}/{source_set}",
                        str(path),
                    )
                )
                continue
            known = bundle.prompts.get(source_set, {})
            for entry in manifest.entries:
                if entry.prompt_id not in known:
                    report.issues.append(
                        Issue(
                            SEVERITY_ERROR,
                            KIND_DANGLING_REFERENCE,
                            f"manifest entry references unknown prompt {entry.prompt_id!r}",
                            str(path),
                        )
                    )
            if cfg.verify_audio_hashes and audio_root is not None:
                hash_report = verify_hashes(manifest, audio_root)
                bundle.hash_reports[(system.system_id, source_set)] = hash_report
                overrides = {}
                for check in hash_report.failures():
                    demoted = "missing" if check.status == "missing" else "hash_mismatch"
                    overrides[check.prompt_id] = demoted
                    report.issues.append(
                        Issue(
                            SEVERITY_WARNING,
                            KIND_MISSING_FILE if check.status == "missing" else KIND_HASH_MISMATCH,
                            f"{check.file_path}: {check.status}; entry demoted to {demoted!r}",
                            str(path),
                        )
                    )
                manifest = manifest.with_statuses(overrides)
            bundle.manifests[(system.system_id, source_set)] = manifest

    system_ids = {s.system_id for s in cfg.systems}
    for path in cfg.hypotheses:
        hyps, meta, issues = read_hypotheses(path)
        report.extend(issues)
        if meta is not None:
            bundle.hyp_meta[str(path)] = meta
        for hyp in hyps:
            if hyp.system_id not in system_ids:
                report.issues.append(
                    Issue(
                        SEVERITY_ERROR,
                        KIND_DANGLING_REFERENCE,
                        f"hypothesis references unconfigured system {hyp.system_id!r}",
                        str(path),
                    )
                )
                continue
            if hyp.source_set not in bundle.prompts or hyp.prompt_id not in bundle.prompts[hyp.source_set]:
                report.issues.append(
                    Issue(
                        SEVERITY_ERROR,
                        KIND_DANGLING_REFERENCE,
                        f"hypothesis references unknown prompt {hyp.source_set}/{hyp.prompt_id}",
                        str(path),
                    )
                )
                continue
            key = (hyp.system_id, hyp.source_set, hyp.backend_id)
            cell = bundle.hypotheses.setdefault(key, {})
            if hyp.prompt_id in cell:
                report.issues.append(
                    Issue(
                        SEVERITY_ERROR,
                        KIND_DUPLICATE_KEY,
                        f"hypothesis for {key + (hyp.prompt_id,)} appears in multiple files",
                        str(path),
                    )
                )
                continue
            cell[hyp.prompt_id] = hyp

    models = cfg.models_by_id()
    for path in cfg.lid_labels:
        labels, _meta, issues = read_lid_labels(path)
        report.extend(issues)
        for label in labels:
            if label.system_id not in system_ids:
                report.issues.append(
                    Issue(
                        SEVERITY_ERROR,
                        KIND_DANGLING_REFERENCE,
                        f"LID label references unconfigured system {label.system_id!r}",
                        str(path),
                    )
                )
                continue
            if label.source_set not in bundle.prompts or label.prompt_id not in bundle.prompts[label.source_set]:
                report.issues.append(
                    Issue(
                        SEVERITY_ERROR,
                        KIND_DANGLING_REFERENCE,
                        f"LID label references unknown prompt {label.source_set}/{label.prompt_id}",
                        str(path),
                    )
                )
                continue
            if label.model_id not in models:
                report.issues.append(
                    Issue(
                        SEVERITY_ERROR,
                        KIND_DANGLING_REFERENCE,
                        f"LID label references unregistered model {label.model_id!r}",
                        str(path),
                    )
                )
                continue
            bundle.lid_labels.setdefault((label.system_id, label.source_set), []).append(label)

    for system, source_set in bundle.cells():
        backends = bundle.backends_for(system.system_id, source_set)
        if not backends:
            report.issues.append(
                Issue(
                    SEVERITY_WARNING,
                    KIND_MISSING_HYPOTHESIS,
                    f"no transcripts for {system.system_id}/{source_set}; intelligibility will be unmeasured",
                )
            )
            continue
        for backend_id in backends:
            cell = bundle.hypotheses[(system.system_id, source_set, backend_id)]
            for prompt_id in _scoreable_prompts(bundle, system.system_id, source_set):
                if prompt_id not in cell:
                    report.issues.append(
                        Issue(
                            SEVERITY_WARNING,
                            KIND_MISSING_HYPOTHESIS,
                            f"no transcript for {system.system_id}/{source_set}/{backend_id} prompt {prompt_id}",
                        )
                    )
    return bundle, report


def _scoreable_prompts(bundle: RunBundle, system_id: str, source_set: str) -> list[str]:
    """Prompts with a usable reference and (if a manifest exists) ok audio."""
    refs = bundle.refs.get(source_set, {})
    manifest = bundle.manifests.get((system_id, source_set))
    out = []
    for prompt_id in sorted(refs):
        if refs[prompt_id].is_empty:
            continue
        if manifest is not None:
            entry = manifest.entry(prompt_id)
            if entry is None or entry.status != STATUS_OK:
                continue
        out.append(prompt_id)
    return out


CharAlignment = list[tuple[Optional[str], Optional[str]]]


@dataclass
class ScoreResult:
    scores: dict[ScoreKey, list[UtteranceScore]] = field(default_factory=dict)
    exclusions: list[Exclusion] = field(default_factory=list)
    summaries: dict[ScoreKey, IntelligibilitySummary] = field(default_factory=dict)
    class_wers: dict[Cell, dict[str, Optional[float]]] = field(default_factory=dict)
    class_sizes: dict[Cell, dict[str, int]] = field(default_factory=dict)
    f5_flags: dict[Cell, list[F5Flag]] = field(default_factory=dict)
    consensus: dict[Cell, Optional[list[SubstitutionPattern]]] = field(default_factory=dict)
    verifications: dict[Cell, Optional[VerificationDecision]] = field(default_factory=dict)
    f1: dict[Cell, Optional[F1Result]] = field(default_factory=dict)
    sfr_values: dict[Cell, list[float]] = field(default_factory=dict)
    primary_backend: Optional[str] = None

    def mean_sfr(self, cell: Cell) -> Optional[float]:
        values = self.sfr_values.get(cell, [])
        return sum(values) / len(values) if values else None


def _score_one_cell(
    bundle: RunBundle, system: SystemConfig, source_set: str, backend_id: str
) -> tuple[list[UtteranceScore], list[Exclusion], dict[str, CharAlignment]]:
    cfg = bundle.cfg
    refs = bundle.refs[source_set]
    hyps = bundle.hypotheses.get((system.system_id, source_set, backend_id), {})
    manifest = bundle.manifests.get((system.system_id, source_set))
    scores: list[UtteranceScore] = []
    exclusions: list[Exclusion] = []
    alignments: dict[str, CharAlignment] = {}
    for prompt_id in sorted(bundle.prompts[source_set]):
        ref = refs[prompt_id]
        entry = manifest.entry(prompt_id) if manifest is not None else None
        if manifest is not None and (entry is None or entry.status != STATUS_OK):
            # Synthesis-level exclusions are emitted once per cell by the
            # caller (they are backend-independent); skip quietly here.
            continue
        if ref.is_empty:
            exclusions.append(
                Exclusion(system.system_id, source_set, prompt_id, "empty_reference", backend_id)
            )
            continue
        hyp_record = hyps.get(prompt_id)
        if hyp_record is None:
            exclusions.append(
                Exclusion(system.system_id, source_set, prompt_id, "missing_hypothesis", backend_id)
            )
            continue
        if hyp_record.status != STATUS_OK:
            exclusions.append(
                Exclusion(system.system_id, source_set, prompt_id, hyp_record.status, backend_id)
            )
            continue
        hyp = normalize_text(hyp_record.text, cfg.profile, source_id=prompt_id)
        ref_chars = list(ref.chars)
        hyp_chars = list(hyp.chars)
        pairs = align(ref_chars, hyp_chars)
        char_edits = sum(1 for r, h in pairs if r != h)
        sfr = compute_sfr(hyp, cfg.script_set)
        scores.append(
            UtteranceScore(
                prompt_id=prompt_id,
                system_id=system.system_id,
                source_set=source_set,
                backend_id=backend_id,
                ref_word_count=len(ref.tokens),
                word_edits=edit_distance(ref.tokens, hyp.tokens),
                ref_char_count=len(ref_chars),
                char_edits=char_edits,
                sfr=sfr.value,
            )
        )
        alignments[prompt_id] = pairs
    return scores, exclusions, alignments


def score_run(bundle: RunBundle, jobs: int = 1) -> ScoreResult:
    cfg = bundle.cfg
    result = ScoreResult(primary_backend=bundle.primary_backend())

    work: list[tuple[SystemConfig, str, str]] = []
    for system, source_set in bundle.cells():
        for backend_id in bundle.backends_for(system.system_id, source_set):
            work.append((system, source_set, backend_id))

    def run(task: tuple[SystemConfig, str, str]):
        system, source_set, backend_id = task
        return task, _score_one_cell(bundle, system, source_set, backend_id)

    if jobs > 1 and len(work) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(run, work))
    else:
        outcomes = [run(task) for task in work]

    cell_alignments: dict[Cell, dict[str, dict[str, CharAlignment]]] = {}
    for (system, source_set, backend_id), (scores, exclusions, alignments) in outcomes:
        key = (system.system_id, source_set, backend_id)
        result.scores[key] = scores
        result.exclusions.extend(exclusions)
        cell_alignments.setdefault((system.system_id, source_set), {})[backend_id] = alignments
        if scores:
            result.summaries[key] = summarize(
                scores,
                seed=cfg.seed,
                n_resamples=cfg.n_resamples,
                low_error_threshold=cfg.low_error_threshold,
            )

    for system, source_set in bundle.cells():
        cell = (system.system_id, source_set)
        manifest = bundle.manifests.get(cell)

        # Synthesis-level exclusions, once per cell.
        if manifest is not None:
            known = bundle.prompts.get(source_set, {})
            for prompt_id in sorted(known):
                entry = manifest.entry(prompt_id)
                if entry is None:
                    result.exclusions.append(
                        Exclusion(system.system_id, source_set, prompt_id, "not_in_manifest")
                    )
                elif entry.status != STATUS_OK:
                    result.exclusions.append(
                        Exclusion(system.system_id, source_set, prompt_id, entry.status)
                    )
            result.f1[cell] = (
                f1_status(len(manifest.ok_entries()), len(known)) if known else None
            )
        else:
            result.f1[cell] = None

        labels = bundle.lid_labels.get(cell)
        if labels:
            rates = aggregate_lid(labels, cfg.models_by_id())
            result.verifications[cell] = verify_language(
                rates,
                system_id=system.system_id,
                source_set=source_set,
                expected_other_language=system.control,
                adjudication=cfg.adjudication_for(system.system_id, source_set),
            )
        else:
            result.verifications[cell] = None

        primary = result.primary_backend
        primary_scores = result.scores.get((system.system_id, source_set, primary or ""), [])
        memberships = bundle.memberships.get(source_set, {})
        if primary_scores:
            wers: dict[str, Optional[float]] = {}
            sizes: dict[str, int] = {}
            for cls in cfg.grapheme_classes:
                wers[cls.class_id] = class_wer(primary_scores, memberships, cls.class_id)
                sizes[cls.class_id] = sum(
                    1
                    for s in primary_scores
                    if cls.class_id in memberships.get(s.prompt_id, frozenset())
                )
            result.class_wers[cell] = wers
            result.class_sizes[cell] = sizes
            result.sfr_values[cell] = [s.sfr for s in primary_scores if s.sfr is not None]
        else:
            result.sfr_values[cell] = []

        all_scores: list[UtteranceScore] = []
        for backend_id in bundle.backends_for(system.system_id, source_set):
            all_scores.extend(result.scores.get((system.system_id, source_set, backend_id), []))
        result.f5_flags[cell] = f5_screen(all_scores, ratio_threshold=cfg.f5_ratio_threshold)

        backend_aligns = cell_alignments.get(cell, {})
        if len(backend_aligns) >= 2:
            result.consensus[cell] = codepoint_consensus(backend_aligns)
        else:
            result.consensus[cell] = None

    return result


@dataclass
class ReportResult:
    cards: dict[Cell, ReportCard] = field(default_factory=dict)
    matrix: dict[Cell, tuple[FailureStatus, ...]] = field(default_factory=dict)


def build_reports(bundle: RunBundle, result: ScoreResult) -> ReportResult:
    cfg = bundle.cfg
    out = ReportResult()
    for system, source_set in bundle.cells():
        cell = (system.system_id, source_set)
        summaries = [
            result.summaries[(system.system_id, source_set, b)]
            for b in bundle.backends_for(system.system_id, source_set)
            if (system.system_id, source_set, b) in result.summaries
        ]
        primary = result.primary_backend
        primary_summary = next((s for s in summaries if s.backend_id == primary), None)
        evidence = ScreeningEvidence(
            system_id=system.system_id,
            source_set=source_set,
            f1=result.f1.get(cell),
            verification=result.verifications.get(cell),
            expected_other_language=system.control,
            explicit_locale=system.explicit_locale,
            overall_wer=primary_summary.corpus_wer if primary_summary else None,
            class_wers=result.class_wers.get(cell),
            f5_flags=result.f5_flags.get(cell) if summaries else None,
            consensus=result.consensus.get(cell) or (),
        )
        out.matrix[cell] = classify_failures(evidence, f3_margin=cfg.f3_margin)
        out.cards[cell] = build_report_card(
            system_id=system.system_id,
            source_set=source_set,
            f1=result.f1.get(cell),
            verification=result.verifications.get(cell),
            sfr_values=result.sfr_values.get(cell, []),
            summaries=summaries,
            baselines=cfg.baselines.get(source_set, {}),
            sfr_gate_min=cfg.sfr_gate_min,
        )
    return out


def mos_candidates(bundle: RunBundle) -> list[MosCandidate]:
    """Prompts whose audio every core system synthesized, with eligibility data."""
    cfg = bundle.cfg
    if cfg.mos is None:
        raise ValueError("run config has no mos section")
    core = cfg.mos.core_systems
    target_unique = set(TARGET_UNIQUE_CLASS_IDS)
    candidates = []
    for source_set in sorted(bundle.prompts):
        for prompt_id in sorted(bundle.prompts[source_set]):
            ref = bundle.refs[source_set][prompt_id]
            if ref.is_empty:
                continue
            ok_everywhere = True
            for system_id in core:
                manifest = bundle.manifests.get((system_id, source_set))
                entry = manifest.entry(prompt_id) if manifest is not None else None
                if entry is None or entry.status != STATUS_OK:
                    ok_everywhere = False
                    break
            if not ok_everywhere:
                continue
            membership = bundle.memberships[source_set].get(prompt_id, frozenset())
            candidates.append(
                MosCandidate(
                    prompt_id=prompt_id,
                    source_set=source_set,
                    word_count=ref.word_count,
                    has_target_unique=bool(membership & target_unique),
                )
            )
    return candidates


def run_mos_export(bundle: RunBundle) -> MosExport:
    cfg = bundle.cfg
    if cfg.mos is None:
        raise ValueError("run config has no mos section")
    return export_mos(
        mos_candidates(bundle),
        core_systems=cfg.mos.core_systems,
        control_system=cfg.mos.control_system,
        seed=cfg.seed,
        n_sentences=cfg.mos.n_sentences,
    )
