"""Corpus wire formats, schema validation, audio hashing and probing.

On-disk formats (all UTF-8 without BOM):

* prompts: TSV with header ``prompt_id  source_set  text``
* synthesis manifest: JSON object with ``schema_version`` 1, system
  metadata, and one entry per prompt (file path, sha256, duration,
  status)
* hypotheses and LID labels: JSONL, one record per line; an optional
  first line holding a ``meta`` object carries backend/model revision
  info and is ignored by scoring

Readers never raise on malformed content; they return what parsed plus
a list of Issue records so a single bad line is reported with its file
and line number instead of aborting a 4000-file validation run. Writers
are the exact inverses of the readers and go through atomic emission.
"""

from __future__ import annotations

import hashlib
import json
import struct
import wave
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

from .emit import PathLike, atomic_write_text, write_json
from .lid_audit import LidLabel

SCHEMA_VERSION = 1

PROMPT_COLUMNS = ("prompt_id", "source_set", "text")

STATUS_OK = "ok"
STATUS_ASR_FAILED = "asr_failed"

SEVERITY_ERROR = "error"
SEVERITY_WARNING = "warning"

KIND_SCHEMA = "schema"
KIND_DUPLICATE_KEY = "duplicate_key"
KIND_DANGLING_REFERENCE = "dangling_reference"
KIND_MISSING_FILE = "missing_file"
KIND_HASH_MISMATCH = "hash_mismatch"
KIND_MISSING_HYPOTHESIS = "missing_hypothesis"
KIND_EMPTY_REFERENCE = "empty_reference"


@dataclass(frozen=True)
class Issue:
    severity: str
    kind: str
    message: str
    file: Optional[str] = None
    line: Optional[int] = None

    def render(self) -> str:
        where = self.file or "<input>"
        if self.line is not None:
            where += f":{self.line}"
        return f"{self.severity}: {self.kind}: {where}: {self.message}"


@dataclass
class ValidationReport:
    issues: list[Issue] = field(default_factory=list)

    def extend(self, issues: Iterable[Issue]) -> None:
        self.issues.extend(issues)

    @property
    def errors(self) -> list[Issue]:
        return [i for i in self.issues if i.severity == SEVERITY_ERROR]

    @property
    def warnings(self) -> list[Issue]:
        return [i for i in self.issues if i.severity == SEVERITY_WARNING]

    @property
    def ok(self) -> bool:
        return not self.errors

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "n_errors": len(self.errors),
            "n_warnings": len(self.warnings),
            "issues": [
                {
                    "severity": i.severity,
                    "kind": i.kind,
                    "message": i.message,
                    "file": i.file,
                    "line": i.line,
                }
                for i in self.issues
            ],
        }


@dataclass(frozen=True)
class Exclusion:
    """A prompt dropped from scoring, with the reason it was dropped."""

    system_id: str
    source_set: str
    prompt_id: str
    reason: str
    backend_id: Optional[str] = None

    def to_dict(self) -> dict:
        return {
            "system_id": self.system_id,
            "source_set": self.source_set,
            "prompt_id": self.prompt_id,
            "backend_id": self.backend_id,
            "reason": self.reason,
        }


@dataclass(frozen=True)
class Prompt:
    prompt_id: str
    source_set: str
    text: str


@dataclass(frozen=True)
class ManifestEntry:
    prompt_id: str
    file_path: str
    sha256: str
    duration_s: Optional[float]
    status: str


@dataclass(frozen=True)
class SynthesisManifest:
    system_id: str
    voice_id: str
    provider_version: str
    run_date: str
    source_set: str
    entries: tuple[ManifestEntry, ...]

    def ok_entries(self) -> tuple[ManifestEntry, ...]:
        return tuple(e for e in self.entries if e.status == STATUS_OK)

    def entry(self, prompt_id: str) -> Optional[ManifestEntry]:
        for e in self.entries:
            if e.prompt_id == prompt_id:
                return e
        return None

    def with_statuses(self, overrides: dict[str, str]) -> "SynthesisManifest":
        if not overrides:
            return self
        entries = tuple(
            ManifestEntry(
                e.prompt_id,
                e.file_path,
                e.sha256,
                e.duration_s,
                overrides.get(e.prompt_id, e.status),
            )
            for e in self.entries
        )
        return SynthesisManifest(
            self.system_id,
            self.voice_id,
            self.provider_version,
            self.run_date,
            self.source_set,
            entries,
        )


@dataclass(frozen=True)
class Hypothesis:
    prompt_id: str
    system_id: str
    source_set: str
    backend_id: str
    text: str
    status: str = STATUS_OK


def _read_text(path: PathLike, issues: list[Issue]) -> Optional[str]:
    path = Path(path)
    try:
        raw = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        issues.append(Issue(SEVERITY_ERROR, KIND_MISSING_FILE, "file not found", str(path)))
        return None
    except UnicodeDecodeError as exc:
        issues.append(Issue(SEVERITY_ERROR, KIND_SCHEMA, f"not valid UTF-8: {exc}", str(path)))
        return None
    if raw.startswith("﻿"):
        issues.append(Issue(SEVERITY_ERROR, KIND_SCHEMA, "UTF-8 BOM is not allowed", str(path), 1))
        return None
    return raw


def read_prompts(path: PathLike) -> tuple[list[Prompt], list[Issue]]:
    issues: list[Issue] = []
    raw = _read_text(path, issues)
    if raw is None:
        return [], issues
    name = str(path)
    lines = raw.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        issues.append(Issue(SEVERITY_ERROR, KIND_SCHEMA, "empty prompts file", name, 1))
        return [], issues
    header = tuple(lines[0].split("\t"))
    if header != PROMPT_COLUMNS:
        issues.append(
            Issue(
                SEVERITY_ERROR,
                KIND_SCHEMA,
                f"expected header {PROMPT_COLUMNS}, got {header}",
                name,
                1,
            )
        )
        return [], issues
    prompts: list[Prompt] = []
    seen: set[str] = set()
    for lineno, line in enumerate(lines[1:], start=2):
        cells = line.split("\t")
        if len(cells) != 3:
            issues.append(
                Issue(SEVERITY_ERROR, KIND_SCHEMA, f"expected 3 columns, got {len(cells)}", name, lineno)
            )
            continue
        prompt_id, source_set, text = cells
        if not prompt_id or not source_set:
            issues.append(
                Issue(SEVERITY_ERROR, KIND_SCHEMA, "prompt_id and source_set must be non-empty", name, lineno)
            )
            continue
        if prompt_id in seen:
            issues.append(
                Issue(SEVERITY_ERROR, KIND_DUPLICATE_KEY, f"duplicate prompt_id {prompt_id!r}", name, lineno)
            )
            continue
        seen.add(prompt_id)
        prompts.append(Prompt(prompt_id=prompt_id, source_set=source_set, text=text))
    return prompts, issues


def write_prompts(path: PathLike, prompts: Sequence[Prompt]) -> Path:
    lines = ["\t".join(PROMPT_COLUMNS)]
    for p in prompts:
        if "\t" in p.text or "\n" in p.text:
            raise ValueError(f"prompt {p.prompt_id}: text contains tab or newline")
        lines.append(f"{p.prompt_id}\t{p.source_set}\t{p.text}")
    return atomic_write_text(path, "\n".join(lines) + "\n")


_MANIFEST_KEYS = {"schema_version", "system_id", "voice_id", "provider_version", "run_date", "source_set", "entries"}
_ENTRY_KEYS = {"prompt_id", "file_path", "sha256", "duration_s", "status"}


def read_manifest(path: PathLike) -> tuple[Optional[SynthesisManifest], list[Issue]]:
    issues: list[Issue] = []
    raw = _read_text(path, issues)
    if raw is None:
        return None, issues
    name = str(path)
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        issues.append(Issue(SEVERITY_ERROR, KIND_SCHEMA, f"invalid JSON: {exc}", name, exc.lineno))
        return None, issues
    if not isinstance(data, dict):
        issues.append(Issue(SEVERITY_ERROR, KIND_SCHEMA, "manifest must be a JSON object", name))
        return None, issues
    missing = _MANIFEST_KEYS - set(data)
    if missing:
        issues.append(
            Issue(SEVERITY_ERROR, KIND_SCHEMA, f"missing keys: {sorted(missing)}", name)
        )
        return None, issues
    if data["schema_version"] != SCHEMA_VERSION:
        issues.append(
            Issue(
                SEVERITY_ERROR,
                KIND_SCHEMA,
                f"unsupported schema_version {data['schema_version']!r} (expected {SCHEMA_VERSION})",
                name,
            )
        )
        return None, issues
    if not isinstance(data["entries"], list):
        issues.append(Issue(SEVERITY_ERROR, KIND_SCHEMA, "entries must be a list", name))
        return None, issues

    entries: list[ManifestEntry] = []
    seen: set[str] = set()
    for pos, item in enumerate(data["entries"]):
        if not isinstance(item, dict) or not _ENTRY_KEYS <= set(item):
            issues.append(
                Issue(SEVERITY_ERROR, KIND_SCHEMA, f"entry {pos}: missing keys (need {sorted(_ENTRY_KEYS)})", name)
            )
            continue
        prompt_id = item["prompt_id"]
        if prompt_id in seen:
            issues.append(
                Issue(SEVERITY_ERROR, KIND_DUPLICATE_KEY, f"entry {pos}: duplicate prompt_id {prompt_id!r}", name)
            )
            continue
        seen.add(prompt_id)
        duration = item["duration_s"]
        if duration is not None and not isinstance(duration, (int, float)):
            issues.append(
                Issue(SEVERITY_ERROR, KIND_SCHEMA, f"entry {pos}: duration_s must be a number or null", name)
            )
            continue
        status = item["status"]
        if not isinstance(status, str) or not status:
            issues.append(
                Issue(SEVERITY_ERROR, KIND_SCHEMA, f"entry {pos}: status must be a non-empty string", name)
            )
            continue
        entries.append(
            ManifestEntry(
                prompt_id=str(prompt_id),
                file_path=str(item["file_path"]),
                sha256=str(item["sha256"]),
                duration_s=None if duration is None else float(duration),
                status=status,
            )
        )
    manifest = SynthesisManifest(
        system_id=str(data["system_id"]),
        voice_id=str(data["voice_id"]),
        provider_version=str(data["provider_version"]),
        run_date=str(data["run_date"]),
        source_set=str(data["source_set"]),
        entries=tuple(entries),
    )
    return manifest, issues


def write_manifest(path: PathLike, manifest: SynthesisManifest) -> Path:
    payload = {
        "schema_version": SCHEMA_VERSION,
        "system_id": manifest.system_id,
        "voice_id": manifest.voice_id,
        "provider_version": manifest.provider_version,
        "run_date": manifest.run_date,
        "source_set": manifest.source_set,
        "entries": [
            {
                "prompt_id": e.prompt_id,
                "file_path": e.file_path,
                "sha256": e.sha256,
                "duration_s": e.duration_s,
                "status": e.status,
            }
            for e in manifest.entries
        ],
    }
    return write_json(path, payload)


def _read_jsonl(path: PathLike) -> tuple[list[tuple[int, dict]], Optional[dict], list[Issue]]:
    """Parsed (lineno, record) pairs, plus the optional leading meta object."""
    issues: list[Issue] = []
    raw = _read_text(path, issues)
    if raw is None:
        return [], None, issues
    name = str(path)
    records: list[tuple[int, dict]] = []
    meta: Optional[dict] = None
    for lineno, line in enumerate(raw.split("\n"), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            issues.append(Issue(SEVERITY_ERROR, KIND_SCHEMA, f"invalid JSON: {exc}", name, lineno))
            continue
        if not isinstance(obj, dict):
            issues.append(Issue(SEVERITY_ERROR, KIND_SCHEMA, "line must be a JSON object", name, lineno))
            continue
        if "meta" in obj and "prompt_id" not in obj:
            if lineno == 1 and meta is None:
                meta = obj["meta"] if isinstance(obj["meta"], dict) else {"value": obj["meta"]}
            else:
                issues.append(
                    Issue(SEVERITY_ERROR, KIND_SCHEMA, "meta object only allowed on the first line", name, lineno)
                )
            continue
        records.append((lineno, obj))
    return records, meta, issues


_HYP_KEYS = {"prompt_id", "system_id", "source_set", "backend_id", "text"}


def read_hypotheses(path: PathLike) -> tuple[list[Hypothesis], Optional[dict], list[Issue]]:
    records, meta, issues = _read_jsonl(path)
    name = str(path)
    out: list[Hypothesis] = []
    seen: set[tuple[str, str, str, str]] = set()
    for lineno, obj in records:
        missing = _HYP_KEYS - set(obj)
        if missing:
            issues.append(
                Issue(SEVERITY_ERROR, KIND_SCHEMA, f"missing keys: {sorted(missing)}", name, lineno)
            )
            continue
        if not isinstance(obj["text"], str):
            issues.append(Issue(SEVERITY_ERROR, KIND_SCHEMA, "text must be a string", name, lineno))
            continue
        hyp = Hypothesis(
            prompt_id=str(obj["prompt_id"]),
            system_id=str(obj["system_id"]),
            source_set=str(obj["source_set"]),
            backend_id=str(obj["backend_id"]),
            text=obj["text"],
            status=str(obj.get("status", STATUS_OK)),
        )
        key = (hyp.prompt_id, hyp.system_id, hyp.source_set, hyp.backend_id)
        if key in seen:
            issues.append(
                Issue(SEVERITY_ERROR, KIND_DUPLICATE_KEY, f"duplicate hypothesis for {key}", name, lineno)
            )
            continue
        seen.add(key)
        out.append(hyp)
    return out, meta, issues


def write_hypotheses(path: PathLike, hyps: Sequence[Hypothesis], meta: Optional[dict] = None) -> Path:
    lines = []
    if meta is not None:
        lines.append(json.dumps({"meta": meta}, ensure_ascii=False, sort_keys=True))
    for h in hyps:
        lines.append(
            json.dumps(
                {
                    "prompt_id": h.prompt_id,
                    "system_id": h.system_id,
                    "source_set": h.source_set,
                    "backend_id": h.backend_id,
                    "text": h.text,
                    "status": h.status,
                },
                ensure_ascii=False,
                sort_keys=True,
            )
        )
    return atomic_write_text(path, "\n".join(lines) + ("\n" if lines else ""))


_LID_KEYS = {"prompt_id", "system_id", "source_set", "model_id", "predicted_label"}


def read_lid_labels(path: PathLike) -> tuple[list[LidLabel], Optional[dict], list[Issue]]:
    records, meta, issues = _read_jsonl(path)
    name = str(path)
    out: list[LidLabel] = []
    seen: set[tuple[str, str, str, str]] = set()
    for lineno, obj in records:
        missing = _LID_KEYS - set(obj)
        if missing:
            issues.append(
                Issue(SEVERITY_ERROR, KIND_SCHEMA, f"missing keys: {sorted(missing)}", name, lineno)
            )
            continue
        confidence = obj.get("confidence")
        if confidence is not None and not isinstance(confidence, (int, float)):
            issues.append(
                Issue(SEVERITY_ERROR, KIND_SCHEMA, "confidence must be a number or null", name, lineno)
            )
            continue
        label = LidLabel(
            prompt_id=str(obj["prompt_id"]),
            system_id=str(obj["system_id"]),
            source_set=str(obj["source_set"]),
            model_id=str(obj["model_id"]),
            predicted_label=str(obj["predicted_label"]),
            confidence=None if confidence is None else float(confidence),
        )
        key = (label.prompt_id, label.system_id, label.source_set, label.model_id)
        if key in seen:
            issues.append(
                Issue(SEVERITY_ERROR, KIND_DUPLICATE_KEY, f"duplicate LID label for {key}", name, lineno)
            )
            continue
        seen.add(key)
        out.append(label)
    return out, meta, issues


def write_lid_labels(path: PathLike, labels: Sequence[LidLabel], meta: Optional[dict] = None) -> Path:
    lines = []
    if meta is not None:
        lines.append(json.dumps({"meta": meta}, ensure_ascii=False, sort_keys=True))
    for l in labels:
        lines.append(
            json.dumps(
                {
                    "prompt_id": l.prompt_id,
                    "system_id": l.system_id,
                    "source_set": l.source_set,
                    "model_id": l.model_id,
                    "predicted_label": l.predicted_label,
                    "confidence": l.confidence,
                },
                ensure_ascii=False,
                sort_keys=True,
            )
        )
    return atomic_write_text(path, "\n".join(lines) + ("\n" if lines else ""))


def file_sha256(path: PathLike) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


@dataclass(frozen=True)
class HashCheck:
    prompt_id: str
    file_path: str
    status: str  # "match" | "mismatch" | "missing"


@dataclass(frozen=True)
class HashReport:
    system_id: str
    source_set: str
    checks: tuple[HashCheck, ...]

    @property
    def ok(self) -> bool:
        return all(c.status == "match" for c in self.checks)

    def failures(self) -> tuple[HashCheck, ...]:
        return tuple(c for c in self.checks if c.status != "match")


def verify_hashes(manifest: SynthesisManifest, audio_root: PathLike) -> HashReport:
    """Recompute sha256 for every ok entry; absent files are 'missing'.

    Entries the manifest already marks as failed are not checked; they
    never reached disk in the first place.
    """
    root = Path(audio_root)
    checks = []
    for entry in manifest.ok_entries():
        target = root / entry.file_path
        if not target.is_file():
            checks.append(HashCheck(entry.prompt_id, entry.file_path, "missing"))
            continue
        actual = file_sha256(target)
        status = "match" if actual == entry.sha256 else "mismatch"
        checks.append(HashCheck(entry.prompt_id, entry.file_path, status))
    return HashReport(manifest.system_id, manifest.source_set, tuple(checks))


@dataclass(frozen=True)
class WavProbe:
    duration_s: float
    rms: float
    sample_rate: int


def probe_wav(path: PathLike) -> WavProbe:
    """Duration and RMS amplitude (normalized to 0..1) of a PCM WAV file."""
    with wave.open(str(path), "rb") as wav:
        n_frames = wav.getnframes()
        rate = wav.getframerate()
        width = wav.getsampwidth()
        channels = wav.getnchannels()
        frames = wav.readframes(n_frames)
    duration = n_frames / rate if rate else 0.0
    if width != 2:
        raise ValueError(f"only 16-bit PCM is supported, got sample width {width}")
    count = n_frames * channels
    if count == 0:
        return WavProbe(duration_s=duration, rms=0.0, sample_rate=rate)
    samples = struct.unpack(f"<{count}h", frames[: count * 2])
    mean_square = sum(s * s for s in samples) / count
    return WavProbe(duration_s=duration, rms=(mean_square**0.5) / 32768.0, sample_rate=rate)
