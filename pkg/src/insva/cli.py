"""Command-line interface.

Subcommands mirror the run stages: validate inputs, score, audit
language identification, build report cards, export the listening
survey, and filter prompt lists. Exit codes: 0 success, 1 strict-mode
findings (warnings, or an unresolved verification under report
--strict), 2 invalid inputs.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .artifacts import (
    emit_lid_artifacts,
    emit_mos_artifacts,
    emit_report_artifacts,
    emit_run_metadata,
    emit_score_artifacts,
    emit_validation_report,
)
from .config import ConfigError, RunConfig, load_config
from .corpus import ValidationReport, probe_wav, read_prompts, write_prompts
from .grapheme_screen import TARGET_UNIQUE_CLASS_IDS, classify_prompt
from .lid_audit import STATUS_UNRESOLVED
from .mos import InsufficientEligible
from .pipeline import RunBundle, build_reports, load_run, run_mos_export, score_run
from .textnorm import PASHTO_V1, normalize_text

EXIT_OK = 0
EXIT_STRICT = 1
EXIT_INVALID = 2

SCORE_ARTIFACTS = ("intelligibility_summary.csv", "tts_audio_hashes.csv")


def _print_issues(report: ValidationReport) -> None:
    for issue in report.issues:
        print(issue.render(), file=sys.stderr)


def _load(args) -> tuple[RunConfig, RunBundle, ValidationReport]:
    cfg = load_config(args.config)
    if getattr(args, "seed", None) is not None:
        cfg = dataclasses.replace(cfg, seed=args.seed)
    bundle, report = load_run(cfg)
    return cfg, bundle, report


def _gate(report: ValidationReport, strict: bool) -> Optional[int]:
    """Exit code implied by validation findings, or None to continue."""
    if not report.ok:
        return EXIT_INVALID
    if strict and report.warnings:
        return EXIT_STRICT
    return None


def cmd_validate(args) -> int:
    try:
        cfg, bundle, report = _load(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    _print_issues(report)
    if args.out_dir:
        emit_validation_report(report, Path(args.out_dir))
    n_prompts = sum(len(p) for p in bundle.prompts.values())
    print(
        f"validate: {n_prompts} prompts, {len(bundle.manifests)} manifests, "
        f"{len(bundle.hypotheses)} transcript cells, "
        f"{len(report.errors)} errors, {len(report.warnings)} warnings"
    )
    code = _gate(report, args.strict)
    return EXIT_OK if code is None else code


def cmd_score(args) -> int:
    try:
        cfg, bundle, report = _load(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    _print_issues(report)
    if not report.ok:
        return EXIT_INVALID
    out_dir = Path(args.out_dir)
    result = score_run(bundle, jobs=args.jobs)
    emit_validation_report(report, out_dir)
    emit_run_metadata(bundle, out_dir)
    written = emit_score_artifacts(bundle, result, out_dir)
    written += emit_lid_artifacts(bundle, result, out_dir)
    for key in sorted(result.summaries):
        s = result.summaries[key]
        print(
            f"score: {s.system_id}/{s.source_set}/{s.backend_id}: "
            f"n={s.n_scored} wer={100 * s.corpus_wer:.1f}% "
            f"ci95=[{100 * s.ci_lo:.1f}%, {100 * s.ci_hi:.1f}%] cer={100 * s.corpus_cer:.1f}%"
        )
    print(f"score: wrote {len(written)} files to {out_dir}")
    if args.strict and report.warnings:
        return EXIT_STRICT
    return EXIT_OK


def cmd_lid_audit(args) -> int:
    try:
        cfg, bundle, report = _load(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    _print_issues(report)
    if not report.ok:
        return EXIT_INVALID
    result = score_run(bundle, jobs=args.jobs)
    written = emit_lid_artifacts(bundle, result, Path(args.out_dir))
    for (system_id, source_set), decision in sorted(result.verifications.items()):
        if decision is None:
            continue
        rates = ", ".join(f"{r.model_id}={r.rate:.3f}" for r in decision.rates)
        print(f"lid-audit: {system_id}/{source_set}: {decision.status} ({rates})")
    print(f"lid-audit: wrote {len(written)} files to {args.out_dir}")
    if args.strict and report.warnings:
        return EXIT_STRICT
    return EXIT_OK


def cmd_report(args) -> int:
    try:
        cfg, bundle, report = _load(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    _print_issues(report)
    if not report.ok:
        return EXIT_INVALID
    out_dir = Path(args.out_dir)
    missing = [name for name in SCORE_ARTIFACTS if not (out_dir / name).exists()]
    if missing:
        print(
            f"report: score artifacts not found in {out_dir} ({', '.join(missing)}); "
            "regenerating from inputs",
            file=sys.stderr,
        )
    result = score_run(bundle, jobs=args.jobs)
    if missing:
        emit_run_metadata(bundle, out_dir)
        emit_score_artifacts(bundle, result, out_dir)
        emit_lid_artifacts(bundle, result, out_dir)
    reports = build_reports(bundle, result)
    written = emit_report_artifacts(bundle, result, reports, out_dir)
    unresolved = []
    for (system_id, source_set), card in sorted(reports.cards.items()):
        gates = " ".join(f"{g.gate}={g.status}" for g in card.gates)
        print(f"report: {system_id}/{source_set}: {gates}")
        decision = result.verifications.get((system_id, source_set))
        if decision is not None and decision.status == STATUS_UNRESOLVED:
            unresolved.append(f"{system_id}/{source_set}")
    print(f"report: wrote {len(written)} files to {out_dir}")
    if args.strict and unresolved:
        print(
            f"report: unresolved language verification: {', '.join(unresolved)}",
            file=sys.stderr,
        )
        return EXIT_STRICT
    if args.strict and report.warnings:
        return EXIT_STRICT
    return EXIT_OK


def cmd_mos_export(args) -> int:
    try:
        cfg, bundle, report = _load(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    _print_issues(report)
    if not report.ok:
        return EXIT_INVALID
    try:
        export = run_mos_export(bundle)
    except (InsufficientEligible, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    written = emit_mos_artifacts(bundle, export, Path(args.out_dir))
    n_rated = sum(1 for i in export.items if i.kind == "rated")
    print(
        f"mos-export: {len(export.form_ids)} forms, {n_rated // len(export.form_ids)} rated "
        f"sentences per form, seed {export.seed}"
    )
    print(f"mos-export: wrote {len(written)} files to {Path(args.out_dir) / 'mos_export'}")
    return EXIT_OK


def cmd_filter_prompts(args) -> int:
    prompts, issues = read_prompts(args.prompts)
    for issue in issues:
        print(issue.render(), file=sys.stderr)
    if any(i.severity == "error" for i in issues):
        return EXIT_INVALID
    kept = []
    target_unique = set(TARGET_UNIQUE_CLASS_IDS)
    for p in prompts:
        norm = normalize_text(p.text, PASHTO_V1)
        if not args.min_words <= norm.word_count <= args.max_words:
            continue
        if args.require_target_unique and not (classify_prompt(norm) & target_unique):
            continue
        if args.audio_dir is not None:
            wav = Path(args.audio_dir) / f"{p.prompt_id}.wav"
            if not wav.is_file():
                continue
            probe = probe_wav(wav)
            if probe.duration_s < args.min_duration or probe.rms < args.min_rms:
                continue
        kept.append(p)
    write_prompts(args.out, kept)
    print(f"filter-prompts: kept {len(kept)} of {len(prompts)} prompts -> {args.out}")
    return EXIT_OK


def _add_common(parser: argparse.ArgumentParser, *, out_required: bool) -> None:
    parser.add_argument("--config", required=True, help="run config JSON")
    parser.add_argument("--out-dir", required=out_required, help="artifact output directory")
    parser.add_argument("--seed", type=int, default=None, help="override the config seed")
    parser.add_argument("--strict", action="store_true", help="treat findings as failures")
    parser.add_argument("--jobs", type=int, default=1, help="parallel scoring workers")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="insva",
        description="Screening benchmark engine for low-resource non-Latin-script TTS.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="validate run inputs against the schemas")
    _add_common(p, out_required=False)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("score", help="score intelligibility and script fidelity")
    _add_common(p, out_required=True)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("lid-audit", help="aggregate LID labels into verification decisions")
    _add_common(p, out_required=True)
    p.set_defaults(func=cmd_lid_audit)

    p = sub.add_parser("report", help="build failure matrix and report cards")
    _add_common(p, out_required=True)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("mos-export", help="export the blinded listening survey")
    _add_common(p, out_required=True)
    p.set_defaults(func=cmd_mos_export)

    p = sub.add_parser("filter-prompts", help="filter a prompt TSV by length/content/audio")
    p.add_argument("--prompts", required=True, help="input prompt TSV")
    p.add_argument("--out", required=True, help="output prompt TSV")
    p.add_argument("--min-words", type=int, default=5)
    p.add_argument("--max-words", type=int, default=25)
    p.add_argument("--require-target-unique", action="store_true",
                   help="keep only prompts containing a target-unique letter")
    p.add_argument("--audio-dir", default=None,
                   help="directory of <prompt_id>.wav recordings to gate on")
    p.add_argument("--min-duration", type=float, default=1.0, help="seconds")
    p.add_argument("--min-rms", type=float, default=0.01, help="normalized RMS floor")
    p.set_defaults(func=cmd_filter_prompts)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
