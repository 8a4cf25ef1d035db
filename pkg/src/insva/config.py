"""Run configuration: one JSON file describing a whole screening run.

The config names every input (prompt TSVs, synthesis manifests,
hypothesis and LID label files), the models and thresholds, and the
seed. Relative paths are resolved against the directory containing the
config file, so a run directory can be moved or archived wholesale.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional, Sequence, Union

from .grapheme_screen import DEFAULT_CLASSES, GraphemeClass
from .lid_audit import LidModelConfig
from .metrics import DEFAULT_RESAMPLES, LOW_ERROR_THRESHOLD
from .script_fidelity import SCRIPT_SETS, ScriptSet
from .taxonomy import DEFAULT_F3_MARGIN, SFR_GATE_MIN
from .textnorm import PASHTO_V1, NormalizationProfile

AUDIO_ROOT_ENV = "INSVA_AUDIO_ROOT"

_TOP_KEYS = {
    "schema_version",
    "seed",
    "n_resamples",
    "prompts",
    "systems",
    "hypotheses",
    "lid_labels",
    "lid_models",
    "normalization_profile",
    "script_set",
    "grapheme_classes",
    "baselines",
    "primary_backend",
    "audio_root",
    "verify_audio_hashes",
    "f5_ratio_threshold",
    "f3_margin",
    "low_error_threshold",
    "sfr_gate_min",
    "adjudications",
    "mos",
}

_SYSTEM_KEYS = {"system_id", "manifests", "control", "explicit_locale", "core"}


@dataclass(frozen=True)
class SystemConfig:
    system_id: str
    manifests: Mapping[str, Path]  # source_set -> manifest path
    control: bool = False
    explicit_locale: bool = False
    core: bool = True


@dataclass(frozen=True)
class MosConfig:
    core_systems: tuple[str, ...]
    control_system: str
    n_sentences: int = 50


@dataclass(frozen=True)
class RunConfig:
    base_dir: Path
    seed: int
    prompts: Mapping[str, Path]  # source_set -> TSV path
    systems: tuple[SystemConfig, ...]
    hypotheses: tuple[Path, ...]
    lid_labels: tuple[Path, ...]
    lid_models: tuple[LidModelConfig, ...]
    profile: NormalizationProfile = PASHTO_V1
    script_set: ScriptSet = SCRIPT_SETS["pashto"]
    grapheme_classes: tuple[GraphemeClass, ...] = DEFAULT_CLASSES
    n_resamples: int = DEFAULT_RESAMPLES
    baselines: Mapping[str, Mapping[str, float]] = field(default_factory=dict)
    primary_backend: Optional[str] = None
    audio_root: Optional[Path] = None
    verify_audio_hashes: bool = False
    f5_ratio_threshold: float = 0.6
    f3_margin: float = DEFAULT_F3_MARGIN
    low_error_threshold: float = LOW_ERROR_THRESHOLD
    sfr_gate_min: float = SFR_GATE_MIN
    adjudications: Mapping[str, Mapping[str, str]] = field(default_factory=dict)
    mos: Optional[MosConfig] = None

    def system(self, system_id: str) -> SystemConfig:
        for s in self.systems:
            if s.system_id == system_id:
                return s
        raise KeyError(system_id)

    def adjudication_for(self, system_id: str, source_set: str) -> Optional[str]:
        return self.adjudications.get(system_id, {}).get(source_set)

    def effective_audio_root(self) -> Optional[Path]:
        env = os.environ.get(AUDIO_ROOT_ENV)
        if env:
            return Path(env)
        return self.audio_root

    def models_by_id(self) -> dict[str, LidModelConfig]:
        return {m.model_id: m for m in self.lid_models}


class ConfigError(ValueError):
    """The run config file is malformed."""


def _require(data: Mapping, key: str, where: str):
    if key not in data:
        raise ConfigError(f"{where}: missing required key {key!r}")
    return data[key]


def _resolve(base: Path, value: str) -> Path:
    p = Path(value)
    return p if p.is_absolute() else base / p


def _parse_profile(value: Union[str, dict, None]) -> NormalizationProfile:
    if value is None or value == "pashto-v1":
        return PASHTO_V1
    if isinstance(value, str):
        raise ConfigError(f"unknown normalization profile {value!r}")
    return NormalizationProfile.from_dict(value)


def _parse_script_set(value: Union[str, dict, None]) -> ScriptSet:
    if value is None:
        return SCRIPT_SETS["pashto"]
    if isinstance(value, str):
        if value not in SCRIPT_SETS:
            raise ConfigError(f"unknown script set {value!r} (presets: {sorted(SCRIPT_SETS)})")
        return SCRIPT_SETS[value]
    return ScriptSet.from_dict(value)


def _parse_classes(value) -> tuple[GraphemeClass, ...]:
    if value is None:
        return DEFAULT_CLASSES
    classes = []
    for item in value:
        classes.append(
            GraphemeClass(
                class_id=item["class_id"],
                members=frozenset(item["members"]),
                complement=bool(item.get("complement", False)),
            )
        )
    return tuple(classes)


def load_config(path: Union[str, Path]) -> RunConfig:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}")
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: config must be a JSON object")
    unknown = set(data) - _TOP_KEYS
    if unknown:
        raise ConfigError(f"{path}: unknown keys: {sorted(unknown)}")
    if data.get("schema_version", 1) != 1:
        raise ConfigError(f"{path}: unsupported schema_version {data.get('schema_version')!r}")

    base = path.parent

    prompts_raw = _require(data, "prompts", str(path))
    if not isinstance(prompts_raw, dict) or not prompts_raw:
        raise ConfigError(f"{path}: prompts must map source_set to a TSV path")
    prompts = {k: _resolve(base, v) for k, v in prompts_raw.items()}

    systems_raw = _require(data, "systems", str(path))
    systems = []
    seen_ids = set()
    for item in systems_raw:
        unknown = set(item) - _SYSTEM_KEYS
        if unknown:
            raise ConfigError(f"{path}: system entry has unknown keys: {sorted(unknown)}")
        system_id = _require(item, "system_id", f"{path} systems")
        if system_id in seen_ids:
            raise ConfigError(f"{path}: duplicate system_id {system_id!r}")
        seen_ids.add(system_id)
        manifests = {
            source: _resolve(base, p)
            for source, p in _require(item, "manifests", f"{path} system {system_id}").items()
        }
        systems.append(
            SystemConfig(
                system_id=system_id,
                manifests=manifests,
                control=bool(item.get("control", False)),
                explicit_locale=bool(item.get("explicit_locale", False)),
                core=bool(item.get("core", True)),
            )
        )
    if not systems:
        raise ConfigError(f"{path}: at least one system is required")

    lid_models = tuple(
        LidModelConfig(
            model_id=m["model_id"],
            role=m.get("role", "scoring"),
            target_label=m.get("target_label", "ps"),
        )
        for m in data.get("lid_models", [])
    )

    mos_raw = data.get("mos")
    mos = None
    if mos_raw is not None:
        mos = MosConfig(
            core_systems=tuple(_require(mos_raw, "core_systems", f"{path} mos")),
            control_system=_require(mos_raw, "control_system", f"{path} mos"),
            n_sentences=int(mos_raw.get("n_sentences", 50)),
        )

    audio_root_raw = data.get("audio_root")

    return RunConfig(
        base_dir=base,
        seed=int(_require(data, "seed", str(path))),
        prompts=prompts,
        systems=tuple(systems),
        hypotheses=tuple(_resolve(base, p) for p in data.get("hypotheses", [])),
        lid_labels=tuple(_resolve(base, p) for p in data.get("lid_labels", [])),
        lid_models=lid_models,
        profile=_parse_profile(data.get("normalization_profile")),
        script_set=_parse_script_set(data.get("script_set")),
        grapheme_classes=_parse_classes(data.get("grapheme_classes")),
        n_resamples=int(data.get("n_resamples", DEFAULT_RESAMPLES)),
        baselines={k: dict(v) for k, v in data.get("baselines", {}).items()},
        primary_backend=data.get("primary_backend"),
        audio_root=None if audio_root_raw is None else _resolve(base, audio_root_raw),
        verify_audio_hashes=bool(data.get("verify_audio_hashes", False)),
        f5_ratio_threshold=float(data.get("f5_ratio_threshold", 0.6)),
        f3_margin=float(data.get("f3_margin", DEFAULT_F3_MARGIN)),
        low_error_threshold=float(data.get("low_error_threshold", LOW_ERROR_THRESHOLD)),
        sfr_gate_min=float(data.get("sfr_gate_min", SFR_GATE_MIN)),
        adjudications={k: dict(v) for k, v in data.get("adjudications", {}).items()},
        mos=mos,
    )
