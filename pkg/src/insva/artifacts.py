"""Named output artifacts for a screening run.

One function per command stage; each returns the list of files it wrote.
File names are stable contracts (downstream tooling and the listening
survey build consume them), so changes here are breaking changes:

* per_sentence_{system}_{source}.csv
* intelligibility_summary.csv
* phoneme_class_wer_{system}_{source}.csv
* f5_candidates_{system}_{source}.csv
* consensus_patterns_{system}_{source}.csv
* lid_audit.csv and lid_audit_{system}_{source}.csv
* report_card_{system}_{source}.csv
* failure_matrix.csv
* summary_table.csv
* tts_audio_hashes.csv, tts_system_metadata.json, {system}_failure.json
* run_metadata.json, validation_report.json
* mos_export/form_{n}.csv with the blind key under mos_export/key/
"""

from __future__ import annotations

from pathlib import Path
from typing import Optional

from . import __version__
from .alignment import backend_name
from .corpus import ValidationReport
from .emit import format_float, sanitize_token, write_csv, write_json, write_tsv
from .metrics import RNG_NAME
from .mos import MosExport
from .pipeline import ReportResult, RunBundle, ScoreResult


def _cell_name(system_id: str, source_set: str) -> str:
    return f"{sanitize_token(system_id)}_{sanitize_token(source_set)}"


def emit_validation_report(report: ValidationReport, out_dir: Path) -> Path:
    return write_json(Path(out_dir) / "validation_report.json", report.to_dict())


def emit_run_metadata(bundle: RunBundle, out_dir: Path) -> Path:
    cfg = bundle.cfg
    payload = {
        "schema_version": 1,
        "engine_version": __version__,
        "seed": cfg.seed,
        "n_resamples": cfg.n_resamples,
        "rng": RNG_NAME,
        "edit_distance_backend": backend_name(),
        "normalization_profile": cfg.profile.to_dict(),
        "script_set": cfg.script_set.to_dict(),
        "f5_ratio_threshold": cfg.f5_ratio_threshold,
        "f3_margin": cfg.f3_margin,
        "low_error_threshold": cfg.low_error_threshold,
        "sfr_gate_min": cfg.sfr_gate_min,
        "primary_backend": cfg.primary_backend,
    }
    return write_json(Path(out_dir) / "run_metadata.json", payload)


def emit_score_artifacts(bundle: RunBundle, result: ScoreResult, out_dir: Path) -> list[Path]:
    out_dir = Path(out_dir)
    written: list[Path] = []

    exclusions_by_cell: dict[tuple[str, str], list] = {}
    for exc in result.exclusions:
        exclusions_by_cell.setdefault((exc.system_id, exc.source_set), []).append(exc)

    for system, source_set in bundle.cells():
        cell = (system.system_id, source_set)
        rows: list[tuple] = []
        for backend_id in bundle.backends_for(*cell):
            for s in result.scores.get((system.system_id, source_set, backend_id), []):
                rows.append(
                    (
                        s.prompt_id,
                        backend_id,
                        format_float(s.wer),
                        format_float(s.cer),
                        format_float(s.sfr),
                        "scored",
                    )
                )
        for exc in exclusions_by_cell.get(cell, []):
            rows.append((exc.prompt_id, exc.backend_id or "", "", "", "", exc.reason))
        rows.sort(key=lambda r: (r[0], r[1]))
        written.append(
            write_csv(
                out_dir / f"per_sentence_{_cell_name(*cell)}.csv",
                ("prompt_id", "backend", "wer", "cer", "sfr", "status"),
                rows,
            )
        )

        class_wers = result.class_wers.get(cell)
        if class_wers is not None:
            class_rows = []
            for cls in bundle.cfg.grapheme_classes:
                class_rows.append(
                    (
                        cls.class_id,
                        result.primary_backend or "",
                        result.class_sizes.get(cell, {}).get(cls.class_id, 0),
                        format_float(class_wers.get(cls.class_id)),
                    )
                )
            written.append(
                write_csv(
                    out_dir / f"phoneme_class_wer_{_cell_name(*cell)}.csv",
                    ("class_id", "backend", "n_prompts", "wer"),
                    class_rows,
                )
            )

        flags = result.f5_flags.get(cell)
        if flags is not None:
            written.append(
                write_csv(
                    out_dir / f"f5_candidates_{_cell_name(*cell)}.csv",
                    ("prompt_id", "backend", "wer", "cer", "ratio"),
                    [
                        (f.prompt_id, f.backend_id, format_float(f.wer), format_float(f.cer), format_float(f.ratio))
                        for f in flags
                    ],
                )
            )

        patterns = result.consensus.get(cell)
        if patterns is not None:
            written.append(
                write_csv(
                    out_dir / f"consensus_patterns_{_cell_name(*cell)}.csv",
                    ("ref_codepoint", "hyp_codepoint", "ref_char", "hyp_char", "n_prompts", "prompt_ids", "backends"),
                    [
                        (
                            f"U+{ord(p.ref_codepoint):04X}",
                            f"U+{ord(p.hyp_codepoint):04X}",
                            p.ref_codepoint,
                            p.hyp_codepoint,
                            p.count,
                            ";".join(p.prompt_ids),
                            ";".join(p.backends),
                        )
                        for p in patterns
                    ],
                )
            )

    summary_rows = []
    for system, source_set in bundle.cells():
        for backend_id in bundle.backends_for(system.system_id, source_set):
            summary = result.summaries.get((system.system_id, source_set, backend_id))
            if summary is None:
                continue
            summary_rows.append(
                (
                    summary.system_id,
                    summary.source_set,
                    summary.backend_id,
                    summary.n_scored,
                    format_float(summary.corpus_wer),
                    format_float(summary.corpus_cer),
                    format_float(summary.ci_lo),
                    format_float(summary.ci_hi),
                    format_float(summary.perfect_pct),
                    format_float(summary.low_error_pct),
                    summary.n_resamples,
                    summary.seed,
                    summary.rng_name,
                )
            )
    written.append(
        write_csv(
            out_dir / "intelligibility_summary.csv",
            (
                "system",
                "source_set",
                "backend",
                "n_scored",
                "wer",
                "cer",
                "ci95_lo",
                "ci95_hi",
                "perfect_pct",
                "low_error_pct",
                "n_resamples",
                "seed",
                "rng",
            ),
            summary_rows,
        )
    )

    hash_rows = []
    metadata_systems = []
    for system, source_set in bundle.cells():
        manifest = bundle.manifests.get((system.system_id, source_set))
        if manifest is None:
            continue
        for entry in sorted(manifest.entries, key=lambda e: e.prompt_id):
            hash_rows.append(
                (
                    manifest.system_id,
                    manifest.source_set,
                    entry.prompt_id,
                    entry.file_path,
                    entry.sha256,
                    "" if entry.duration_s is None else format_float(entry.duration_s, 3),
                    entry.status,
                )
            )
        metadata_systems.append(
            {
                "system_id": manifest.system_id,
                "source_set": manifest.source_set,
                "voice_id": manifest.voice_id,
                "provider_version": manifest.provider_version,
                "run_date": manifest.run_date,
                "n_entries": len(manifest.entries),
                "n_ok": len(manifest.ok_entries()),
            }
        )
    written.append(
        write_csv(
            out_dir / "tts_audio_hashes.csv",
            ("system", "source_set", "prompt_id", "file_path", "sha256", "duration_s", "status"),
            hash_rows,
        )
    )
    written.append(
        write_json(
            out_dir / "tts_system_metadata.json",
            {"schema_version": 1, "systems": metadata_systems},
        )
    )

    by_system: dict[str, list] = {}
    for exc in result.exclusions:
        by_system.setdefault(exc.system_id, []).append(exc)
    for system_id in sorted(by_system):
        excs = sorted(
            by_system[system_id], key=lambda e: (e.source_set, e.prompt_id, e.backend_id or "")
        )
        written.append(
            write_json(
                out_dir / f"{sanitize_token(system_id)}_failure.json",
                {
                    "schema_version": 1,
                    "system_id": system_id,
                    "n_exclusions": len(excs),
                    "exclusions": [e.to_dict() for e in excs],
                },
            )
        )
    return written


def emit_lid_artifacts(bundle: RunBundle, result: ScoreResult, out_dir: Path) -> list[Path]:
    out_dir = Path(out_dir)
    written: list[Path] = []
    header = (
        "system",
        "source_set",
        "model_id",
        "role",
        "n_labeled",
        "n_target",
        "rate",
        "decision",
        "f2_candidate",
    )
    all_rows = []
    for system, source_set in bundle.cells():
        decision = result.verifications.get((system.system_id, source_set))
        if decision is None:
            continue
        rows = [
            (
                system.system_id,
                source_set,
                r.model_id,
                r.role,
                r.n_labeled,
                r.n_target,
                format_float(r.rate),
                decision.status,
                str(decision.f2_candidate).lower(),
            )
            for r in decision.rates
        ]
        all_rows.extend(rows)
        written.append(
            write_csv(out_dir / f"lid_audit_{_cell_name(system.system_id, source_set)}.csv", header, rows)
        )
    written.append(write_csv(out_dir / "lid_audit.csv", header, all_rows))
    return written


def emit_report_artifacts(
    bundle: RunBundle, result: ScoreResult, reports: ReportResult, out_dir: Path
) -> list[Path]:
    out_dir = Path(out_dir)
    written: list[Path] = []

    for system, source_set in bundle.cells():
        card = reports.cards.get((system.system_id, source_set))
        if card is None:
            continue
        written.append(
            write_csv(
                out_dir / f"report_card_{_cell_name(system.system_id, source_set)}.csv",
                ("gate", "status", "value", "detail"),
                [
                    (g.gate, g.status, "" if g.value is None else format_float(g.value), g.detail)
                    for g in card.gates
                ],
            )
        )

    matrix_rows = []
    for system, source_set in bundle.cells():
        cells = reports.matrix.get((system.system_id, source_set))
        if cells is None:
            continue
        for status in cells:
            matrix_rows.append((system.system_id, source_set, status.mode, status.status, status.evidence))
    written.append(
        write_csv(
            out_dir / "failure_matrix.csv",
            ("system", "source_set", "mode", "status", "evidence"),
            matrix_rows,
        )
    )

    model_ids = sorted(m.model_id for m in bundle.cfg.lid_models)
    header = (
        "system",
        "source_set",
        "backend",
        "n_scored",
        "wer_pct",
        "ci95_lo_pct",
        "ci95_hi_pct",
        "cer_pct",
        "perfect_pct",
        "low_error_pct",
        "mean_sfr",
    ) + tuple(f"lid_{m}_rate" for m in model_ids)
    table_rows = []
    for system, source_set in bundle.cells():
        cell = (system.system_id, source_set)
        decision = result.verifications.get(cell)
        for backend_id in bundle.backends_for(*cell):
            summary = result.summaries.get((system.system_id, source_set, backend_id))
            if summary is None:
                continue
            mean_sfr = result.mean_sfr(cell)
            row = [
                system.system_id,
                source_set,
                backend_id,
                summary.n_scored,
                format_float(100 * summary.corpus_wer, 1),
                format_float(100 * summary.ci_lo, 1),
                format_float(100 * summary.ci_hi, 1),
                format_float(100 * summary.corpus_cer, 1),
                format_float(summary.perfect_pct, 1),
                format_float(summary.low_error_pct, 1),
                "" if mean_sfr is None else format_float(mean_sfr, 3),
            ]
            for model_id in model_ids:
                rate = decision.rate_of(model_id) if decision is not None else None
                row.append("" if rate is None else format_float(rate, 3))
            table_rows.append(tuple(row))
    written.append(write_csv(out_dir / "summary_table.csv", header, table_rows))
    return written


def emit_mos_artifacts(bundle: RunBundle, export: MosExport, out_dir: Path) -> list[Path]:
    out_dir = Path(out_dir) / "mos_export"
    written: list[Path] = []
    for form_id in export.form_ids:
        written.append(
            write_csv(
                out_dir / f"form_{form_id}.csv",
                ("position", "audio_file"),
                export.survey_rows(form_id),
            )
        )
    written.append(
        write_csv(
            out_dir / "key" / "blind_key.csv",
            ("form", "position", "audio_file", "kind", "system", "source_set", "prompt_id"),
            export.key_rows(),
        )
    )
    job_rows = []
    for blinded_file, system_id, source_set, prompt_id in export.audio_jobs():
        manifest = bundle.manifests.get((system_id, source_set))
        entry = manifest.entry(prompt_id) if manifest is not None else None
        job_rows.append(
            (blinded_file, system_id, source_set, prompt_id, entry.file_path if entry else "")
        )
    written.append(
        write_tsv(
            out_dir / "key" / "audio_jobs.tsv",
            ("audio_file", "system", "source_set", "prompt_id", "source_audio"),
            job_rows,
        )
    )
    return written
