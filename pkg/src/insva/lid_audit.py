"""Language verification from spoken language identification labels.

Per-utterance LID labels from several models are aggregated into
per-model target-language rates, then folded into one decision per
system and source set:

* pass        every scoring model recognizes the target language in at
              least 90% of utterances
* fail        some scoring model lands below 50%; systems that were not
              deliberately fed another language become language
              substitution candidates
* unresolved  anything in between, typically when models disagree;
              the rate is reported with a caveat instead of a verdict

Models registered as diagnostic_only contribute columns to the audit
table but never participate in the thresholds. A native-listener
adjudication, when present, overrides the automatic decision.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Optional

PASS_MIN_RATE = 0.90
FAIL_BELOW_RATE = 0.50

STATUS_PASS = "pass"
STATUS_FAIL = "fail"
STATUS_UNRESOLVED = "unresolved"

ADJUDICATION_TARGET = "target"
ADJUDICATION_NON_TARGET = "non_target"


class UnknownModel(ValueError):
    """A label references a model_id missing from the model registry."""


class NoScoringModels(ValueError):
    """Verification needs at least one model with role 'scoring'."""


@dataclass(frozen=True)
class LidModelConfig:
    model_id: str
    role: str = "scoring"  # "scoring" | "diagnostic_only"
    target_label: str = "ps"

    def __post_init__(self) -> None:
        if self.role not in ("scoring", "diagnostic_only"):
            raise ValueError(f"unknown LID model role: {self.role!r}")


@dataclass(frozen=True)
class LidLabel:
    prompt_id: str
    system_id: str
    source_set: str
    model_id: str
    predicted_label: str
    confidence: Optional[float] = None


@dataclass(frozen=True)
class ModelRate:
    model_id: str
    role: str
    n_labeled: int
    n_target: int

    @property
    def rate(self) -> float:
        return self.n_target / self.n_labeled


@dataclass(frozen=True)
class VerificationDecision:
    system_id: str
    source_set: str
    status: str
    rates: tuple[ModelRate, ...]
    f2_candidate: bool
    adjudicated: bool = False

    def rate_of(self, model_id: str) -> Optional[float]:
        for r in self.rates:
            if r.model_id == model_id:
                return r.rate
        return None


def aggregate_lid(
    labels: Iterable[LidLabel],
    models: Mapping[str, LidModelConfig],
) -> tuple[ModelRate, ...]:
    """Per-model target-language rates for one system/source cell."""
    labeled: dict[str, int] = {}
    hits: dict[str, int] = {}
    cells = set()
    for label in labels:
        cfg = models.get(label.model_id)
        if cfg is None:
            raise UnknownModel(f"label for unregistered LID model {label.model_id!r}")
        cells.add((label.system_id, label.source_set))
        labeled[label.model_id] = labeled.get(label.model_id, 0) + 1
        if label.predicted_label == cfg.target_label:
            hits[label.model_id] = hits.get(label.model_id, 0) + 1
    if len(cells) > 1:
        raise ValueError(f"labels span multiple system/source cells: {sorted(cells)}")
    return tuple(
        ModelRate(
            model_id=model_id,
            role=models[model_id].role,
            n_labeled=n,
            n_target=hits.get(model_id, 0),
        )
        for model_id, n in sorted(labeled.items())
    )


def verify_language(
    rates: Iterable[ModelRate],
    *,
    system_id: str,
    source_set: str,
    expected_other_language: bool = False,
    adjudication: Optional[str] = None,
    pass_min: float = PASS_MIN_RATE,
    fail_below: float = FAIL_BELOW_RATE,
) -> VerificationDecision:
    """Fold per-model rates into a pass/fail/unresolved decision.

    expected_other_language marks systems deliberately driven in another
    language (locale controls, explicit non-target voices); their failures
    are expected behaviour, not substitution candidates.
    """
    rates = tuple(rates)
    scoring = [r for r in rates if r.role == "scoring"]
    if not scoring:
        raise NoScoringModels(f"{system_id}/{source_set}: no scoring-model LID rates")

    if adjudication is not None:
        if adjudication not in (ADJUDICATION_TARGET, ADJUDICATION_NON_TARGET):
            raise ValueError(f"unknown adjudication: {adjudication!r}")
        status = STATUS_PASS if adjudication == ADJUDICATION_TARGET else STATUS_FAIL
        return VerificationDecision(
            system_id=system_id,
            source_set=source_set,
            status=status,
            rates=rates,
            f2_candidate=status == STATUS_FAIL and not expected_other_language,
            adjudicated=True,
        )

    if all(r.rate >= pass_min for r in scoring):
        status = STATUS_PASS
    elif any(r.rate < fail_below for r in scoring):
        status = STATUS_FAIL
    else:
        status = STATUS_UNRESOLVED
    return VerificationDecision(
        system_id=system_id,
        source_set=source_set,
        status=status,
        rates=rates,
        f2_candidate=status == STATUS_FAIL and not expected_other_language,
    )
