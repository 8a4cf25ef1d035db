"""Failure taxonomy and gated report cards.

Five screening failure modes are tracked per system and source set:

* F1 pre-synthesis rejection: the system refused or silently dropped
  prompts, measured from the synthesis manifest.
* F2 language substitution: audio is fluent speech in the wrong
  language, measured by the verification decision.
* F3 phoneme collapse: prompts containing target-unique letters score
  worse than the corpus overall.
* F4 prosodic disfluency: no automated measure exists here; always
  reported as unmeasured so nobody mistakes silence for a pass.
* F5 grapheme ambiguity: within-word codepoint errors dominate,
  measured by the CER/WER screen and cross-backend consensus.

Every cell carries a status plus a short evidence string, because a
screening verdict without its evidence cannot be audited. Automatic
screens can only produce candidates; "confirmed" requires either a
designed control or a native-listener adjudication.

The report card condenses the same evidence into five gates (synthesis
completion, verification, script fidelity, intelligibility, naturalness)
with fixed wording so cards from different runs diff cleanly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

from .grapheme_screen import TARGET_UNIQUE_CLASS_IDS, F5Flag, SubstitutionPattern
from .lid_audit import (
    STATUS_FAIL,
    STATUS_PASS,
    STATUS_UNRESOLVED,
    VerificationDecision,
)
from .metrics import IntelligibilitySummary

CONFIRMED_FAIL = "confirmed_fail"
CONFIRMED_PASS = "confirmed_pass"
CANDIDATE = "candidate"
UNMEASURED = "unmeasured"
NOT_APPLICABLE = "not_applicable"

FAILURE_MODES = ("F1", "F2", "F3", "F4", "F5")

F1_PASS_MIN_RATIO = 0.99
SFR_GATE_MIN = 0.95
DEFAULT_F3_MARGIN = 0.05

N_GATE_DEFERRED = "full INSV only"
V_UNRESOLVED_CAVEAT = "language verification unresolved; interpret WER with caution"
I_SUB_BASELINE_NOTE = "sub-baseline WER reflects acoustic cleanliness, not phonological quality"


@dataclass(frozen=True)
class F1Result:
    """Synthesis completion: ok files over expected prompts."""

    ok: int
    expected: int

    def __post_init__(self) -> None:
        if self.expected <= 0:
            raise ValueError("expected prompt count must be positive")
        if not 0 <= self.ok <= self.expected:
            raise ValueError(f"ok count {self.ok} outside 0..{self.expected}")

    @property
    def ratio(self) -> float:
        return self.ok / self.expected

    @property
    def status(self) -> str:
        if self.ratio >= F1_PASS_MIN_RATIO:
            return "pass"
        if self.ok == 0:
            return "fail"
        return "partial"


def f1_status(ok: int, expected: int) -> F1Result:
    return F1Result(ok=ok, expected=expected)


@dataclass(frozen=True)
class FailureStatus:
    mode: str
    status: str
    evidence: str


@dataclass(frozen=True)
class ScreeningEvidence:
    """Everything classify_failures needs for one system/source cell.

    None for a field means the corresponding screen did not run; that is
    distinct from a screen that ran and found nothing.
    """

    system_id: str
    source_set: str
    f1: Optional[F1Result] = None
    verification: Optional[VerificationDecision] = None
    expected_other_language: bool = False
    explicit_locale: bool = False
    overall_wer: Optional[float] = None
    class_wers: Optional[Mapping[str, Optional[float]]] = None
    f5_flags: Optional[Sequence[F5Flag]] = None
    consensus: Optional[Sequence[SubstitutionPattern]] = None


def _format_rates(decision: VerificationDecision) -> str:
    return "; ".join(f"{r.model_id}={r.rate:.3f}" for r in decision.rates)


def _classify_f1(f1: Optional[F1Result]) -> FailureStatus:
    if f1 is None:
        return FailureStatus("F1", UNMEASURED, "no synthesis manifest")
    evidence = f"{f1.ok}/{f1.expected} files synthesized (ratio {f1.ratio:.3f})"
    status = {
        "pass": CONFIRMED_PASS,
        "partial": CANDIDATE,
        "fail": CONFIRMED_FAIL,
    }[f1.status]
    return FailureStatus("F1", status, evidence)


def _classify_f2(ev: ScreeningEvidence) -> FailureStatus:
    decision = ev.verification
    if decision is None:
        return FailureStatus("F2", UNMEASURED, "no language verification labels")
    rates = _format_rates(decision)
    if decision.status == STATUS_PASS:
        return FailureStatus("F2", CONFIRMED_PASS, f"verification pass ({rates})")
    if decision.status == STATUS_FAIL:
        if decision.adjudicated:
            return FailureStatus(
                "F2", CONFIRMED_FAIL, f"native adjudication: non-target language ({rates})"
            )
        if ev.expected_other_language:
            return FailureStatus(
                "F2",
                CONFIRMED_FAIL,
                f"verification fail ({rates}); other-language control, substitution by design",
            )
        return FailureStatus(
            "F2", CANDIDATE, f"verification fail ({rates}); awaiting native adjudication"
        )
    # unresolved
    if ev.explicit_locale:
        return FailureStatus(
            "F2",
            NOT_APPLICABLE,
            f"explicit target-language voice; disagreement ({rates}) attributed to model coverage",
        )
    return FailureStatus(
        "F2", CANDIDATE, f"verification unresolved ({rates}); awaiting native adjudication"
    )


def _classify_f3(ev: ScreeningEvidence, margin: float) -> FailureStatus:
    if ev.class_wers is None or ev.overall_wer is None:
        return FailureStatus("F3", UNMEASURED, "no grapheme-class breakdown")
    offenders = []
    for class_id in TARGET_UNIQUE_CLASS_IDS:
        wer = ev.class_wers.get(class_id)
        if wer is not None and wer > ev.overall_wer + margin:
            offenders.append(f"{class_id} {100 * wer:.1f}%")
    overall_pct = 100 * ev.overall_wer
    if offenders:
        return FailureStatus(
            "F3",
            CANDIDATE,
            f"{', '.join(offenders)} vs overall {overall_pct:.1f}% (margin {margin:.2f})",
        )
    return FailureStatus(
        "F3", CONFIRMED_PASS, f"no target-unique class exceeds overall {overall_pct:.1f}% by {margin:.2f}"
    )


def _classify_f5(ev: ScreeningEvidence) -> FailureStatus:
    if ev.f5_flags is None:
        return FailureStatus("F5", UNMEASURED, "screen not run")
    if not ev.f5_flags:
        return FailureStatus("F5", CONFIRMED_PASS, "no utterance crossed the CER/WER threshold")
    evidence = f"{len(ev.f5_flags)} flagged utterances"
    if ev.consensus:
        top = ", ".join(
            f"U+{ord(p.ref_codepoint):04X}->U+{ord(p.hyp_codepoint):04X} ({p.count} prompts)"
            for p in list(ev.consensus)[:3]
        )
        evidence += f"; cross-backend substitutions: {top}"
    return FailureStatus("F5", CANDIDATE, evidence)


def classify_failures(
    ev: ScreeningEvidence,
    *,
    f3_margin: float = DEFAULT_F3_MARGIN,
) -> tuple[FailureStatus, ...]:
    """One status+evidence cell per failure mode, in F1..F5 order."""
    return (
        _classify_f1(ev.f1),
        _classify_f2(ev),
        _classify_f3(ev, f3_margin),
        FailureStatus("F4", UNMEASURED, "no automated prosody measure; requires listening"),
        _classify_f5(ev),
    )


@dataclass(frozen=True)
class GateResult:
    gate: str
    status: str
    value: Optional[float]
    detail: str


@dataclass(frozen=True)
class ReportCard:
    system_id: str
    source_set: str
    gates: tuple[GateResult, ...]

    def gate(self, name: str) -> GateResult:
        for g in self.gates:
            if g.gate == name:
                return g
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "system_id": self.system_id,
            "source_set": self.source_set,
            "gates": [
                {"gate": g.gate, "status": g.status, "value": g.value, "detail": g.detail}
                for g in self.gates
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ReportCard":
        return cls(
            system_id=data["system_id"],
            source_set=data["source_set"],
            gates=tuple(
                GateResult(g["gate"], g["status"], g["value"], g["detail"])
                for g in data["gates"]
            ),
        )


def _intelligibility_text(
    summaries: Sequence[IntelligibilitySummary],
    baselines: Mapping[str, float],
    verification: Optional[VerificationDecision],
) -> str:
    """Descriptive I-gate line; baselines are natural-speech WER percents."""
    parts = []
    for s in sorted(summaries, key=lambda s: s.backend_id):
        wer_pct = 100 * s.corpus_wer
        baseline_pct = baselines.get(s.backend_id)
        if baseline_pct is None:
            parts.append(f"WER {wer_pct:.1f}% ({s.backend_id}); no natural-speech baseline")
            continue
        line = f"WER {wer_pct:.1f}% vs natural-speech baseline {baseline_pct:.1f}% ({s.backend_id})"
        if wer_pct <= baseline_pct:
            line += f"; {I_SUB_BASELINE_NOTE}"
        parts.append(line)
    text = " | ".join(parts) if parts else "no scored utterances"
    if verification is not None and verification.status == STATUS_UNRESOLVED:
        text += f" [{V_UNRESOLVED_CAVEAT}]"
    return text


def build_report_card(
    *,
    system_id: str,
    source_set: str,
    f1: Optional[F1Result],
    verification: Optional[VerificationDecision],
    sfr_values: Sequence[float],
    summaries: Sequence[IntelligibilitySummary],
    baselines: Mapping[str, float],
    sfr_gate_min: float = SFR_GATE_MIN,
) -> ReportCard:
    """Condense screening evidence into the five-gate card.

    sfr_values holds the defined per-utterance rates only; baselines map
    backend_id to the natural-speech WER percent for this source set.
    """
    if f1 is None:
        f1_gate = GateResult("F1", "unmeasured", None, "no synthesis manifest")
    else:
        f1_gate = GateResult(
            "F1", f1.status, f1.ratio, f"{f1.ok}/{f1.expected} files synthesized"
        )

    if verification is None:
        v_gate = GateResult("V", "unmeasured", None, "no language verification labels")
    else:
        scoring = [r.rate for r in verification.rates if r.role == "scoring"]
        v_gate = GateResult(
            "V",
            verification.status,
            min(scoring) if scoring else None,
            _format_rates(verification),
        )

    if sfr_values:
        mean_sfr = sum(sfr_values) / len(sfr_values)
        s_gate = GateResult(
            "S",
            "pass" if mean_sfr >= sfr_gate_min else "fail",
            mean_sfr,
            f"mean SFR {mean_sfr:.3f} over {len(sfr_values)} utterances",
        )
    else:
        s_gate = GateResult("S", "unmeasured", None, "no utterance had countable codepoints")

    i_gate = GateResult(
        "I", "descriptive", None, _intelligibility_text(summaries, baselines, verification)
    )
    n_gate = GateResult("N", "deferred", None, N_GATE_DEFERRED)

    return ReportCard(
        system_id=system_id,
        source_set=source_set,
        gates=(f1_gate, v_gate, s_gate, i_gate, n_gate),
    )
