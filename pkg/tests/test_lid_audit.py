"""Language verification decision rule."""

from __future__ import annotations

import pytest

from insva.lid_audit import (
    LidLabel,
    LidModelConfig,
    ModelRate,
    NoScoringModels,
    UnknownModel,
    aggregate_lid,
    verify_language,
)

MODELS = {
    "mms": LidModelConfig("mms", "scoring", "ps"),
    "sb": LidModelConfig("sb", "scoring", "ps"),
    "diag": LidModelConfig("diag", "diagnostic_only", "ps"),
}


def _labels(model_id: str, n_target: int, n_other: int) -> list[LidLabel]:
    labels = []
    for i in range(n_target):
        labels.append(LidLabel(f"p{i:03d}", "sys", "src", model_id, "ps", 0.9))
    for i in range(n_other):
        labels.append(LidLabel(f"p{n_target + i:03d}", "sys", "src", model_id, "ur", 0.7))
    return labels


def _rate(model_id: str, rate: float, role: str = "scoring", n: int = 100) -> ModelRate:
    return ModelRate(model_id=model_id, role=role, n_labeled=n, n_target=round(rate * n))


def test_aggregate_counts_target_labels_per_model():
    labels = _labels("mms", 65, 35) + _labels("sb", 98, 2)
    rates = aggregate_lid(labels, MODELS)
    by_id = {r.model_id: r for r in rates}
    assert by_id["mms"].rate == pytest.approx(0.65)
    assert by_id["sb"].rate == pytest.approx(0.98)
    assert by_id["mms"].n_labeled == 100


def test_aggregate_rejects_unknown_model():
    with pytest.raises(UnknownModel):
        aggregate_lid([LidLabel("p1", "sys", "src", "mystery", "ps")], MODELS)


def test_aggregate_rejects_mixed_cells():
    labels = [
        LidLabel("p1", "sys", "src", "mms", "ps"),
        LidLabel("p1", "sys", "other", "mms", "ps"),
    ]
    with pytest.raises(ValueError):
        aggregate_lid(labels, MODELS)


def _verify(rates, **kwargs):
    return verify_language(rates, system_id="sys", source_set="src", **kwargs)


def test_pass_requires_every_scoring_model_at_090():
    assert _verify([_rate("mms", 0.90), _rate("sb", 1.0)]).status == "pass"
    assert _verify([_rate("mms", 0.89), _rate("sb", 1.0)]).status == "unresolved"


def test_fail_when_any_scoring_model_below_050():
    decision = _verify([_rate("mms", 0.49), _rate("sb", 0.95)])
    assert decision.status == "fail"
    assert decision.f2_candidate


def test_exactly_050_is_unresolved_not_fail():
    assert _verify([_rate("mms", 0.50), _rate("sb", 1.0)]).status == "unresolved"


def test_disagreement_band_is_unresolved():
    decision = _verify([_rate("mms", 0.65), _rate("sb", 0.98)])
    assert decision.status == "unresolved"
    assert not decision.f2_candidate


def test_diagnostic_models_never_gate():
    rates = [_rate("mms", 0.95), _rate("sb", 0.92), _rate("diag", 0.05, role="diagnostic_only")]
    decision = _verify(rates)
    assert decision.status == "pass"
    # but the diagnostic rate is still reported
    assert decision.rate_of("diag") == pytest.approx(0.05)


def test_scoring_models_required():
    with pytest.raises(NoScoringModels):
        _verify([_rate("diag", 0.9, role="diagnostic_only")])


def test_control_system_fail_is_not_a_candidate():
    decision = _verify([_rate("mms", 0.09), _rate("sb", 0.03)], expected_other_language=True)
    assert decision.status == "fail"
    assert not decision.f2_candidate


def test_adjudication_overrides_automatic_rule():
    rates = [_rate("mms", 0.2), _rate("sb", 0.3)]
    up = _verify(rates, adjudication="target")
    assert up.status == "pass" and up.adjudicated
    down = _verify([_rate("mms", 0.95), _rate("sb", 0.97)], adjudication="non_target")
    assert down.status == "fail" and down.f2_candidate
    with pytest.raises(ValueError):
        _verify(rates, adjudication="maybe")


def test_model_config_role_validated():
    with pytest.raises(ValueError):
        LidModelConfig("x", role="advisory")
