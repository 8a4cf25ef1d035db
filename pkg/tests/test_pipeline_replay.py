"""End-to-end scoring on a run whose outcomes are known in advance.

corpusgen.build_replay_run constructs inputs so that every headline
decision (F1 ratios, verification statuses, exclusion counts, failure
matrix cells) can be asserted exactly rather than approximately.
"""

from __future__ import annotations

import json

import pytest

from corpusgen import build_replay_run, fake_sha, make_prompts, write_silence_wav
from insva.config import load_config
from insva.corpus import ManifestEntry, SynthesisManifest, file_sha256, write_manifest, write_prompts, write_hypotheses, Hypothesis
from insva.pipeline import build_reports, load_run, score_run
from insva.taxonomy import CANDIDATE, CONFIRMED_FAIL, CONFIRMED_PASS, NOT_APPLICABLE, UNMEASURED


@pytest.fixture(scope="module")
def replay(tmp_path_factory):
    built = build_replay_run(tmp_path_factory.mktemp("replay"))
    cfg = load_config(built.config_path)
    bundle, report = load_run(cfg)
    result = score_run(bundle)
    reports = build_reports(bundle, result)
    return built, bundle, report, result, reports


def test_load_is_clean(replay):
    _, bundle, report, _, _ = replay
    assert report.ok, [i.message for i in report.errors]
    assert set(bundle.prompts) == {"fleurs", "cv24"}
    assert len(bundle.prompts["fleurs"]) == 200
    cells = [(s.system_id, src) for s, src in bundle.cells()]
    assert cells == [
        ("edge_gulnawaz", "cv24"),
        ("edge_gulnawaz", "fleurs"),
        ("edge_zarguna", "cv24"),
        ("edge_zarguna", "fleurs"),
        ("omnivoice_auto", "fleurs"),
        ("omnivoice_clone", "fleurs"),
        ("edge_urdu", "fleurs"),
    ]


def test_f1_statuses(replay):
    _, _, _, result, _ = replay
    assert result.f1[("edge_gulnawaz", "fleurs")].status == "pass"
    assert result.f1[("omnivoice_auto", "fleurs")].status == "pass"
    clone = result.f1[("omnivoice_clone", "fleurs")]
    assert clone.ok == 195 and clone.expected == 200
    assert clone.ratio == pytest.approx(0.975)
    assert clone.status == "partial"


def test_missing_file_rule(replay):
    # 200 prompts, 5 synthesis failures, 2 ASR failures: 193 utterances
    # score and every excluded prompt is accounted for with a reason.
    _, _, _, result, _ = replay
    scores = result.scores[("omnivoice_clone", "fleurs", "asr_v3")]
    assert len(scores) == 193
    excl = [e for e in result.exclusions if e.system_id == "omnivoice_clone"]
    reasons = sorted(e.reason for e in excl)
    assert reasons == ["asr_failed"] * 2 + ["synthesis_failed"] * 5
    assert len(scores) + len(excl) == 200
    assert {e.prompt_id for e in excl if e.reason == "asr_failed"} == {
        "fleurs_0188",
        "fleurs_0199",
    }


def test_verification_decisions(replay):
    _, _, _, result, _ = replay
    auto = result.verifications[("omnivoice_auto", "fleurs")]
    assert auto.status == "pass"
    assert auto.rate_of("mms_lid") == 1.0 and auto.rate_of("sb_lid") == 1.0
    assert not auto.f2_candidate

    guln = result.verifications[("edge_gulnawaz", "cv24")]
    assert guln.status == "unresolved"
    assert guln.rate_of("mms_lid") == pytest.approx(0.65)
    assert guln.rate_of("sb_lid") == pytest.approx(0.98)

    urdu = result.verifications[("edge_urdu", "fleurs")]
    assert urdu.status == "fail"
    assert urdu.rate_of("mms_lid") == pytest.approx(0.09)
    assert urdu.rate_of("sb_lid") == pytest.approx(0.03)
    assert not urdu.f2_candidate  # control system: other language by design

    assert result.verifications[("edge_zarguna", "fleurs")] is None


def test_failure_matrix_cells(replay):
    _, _, _, _, reports = replay

    def mode(cell, name):
        return next(f for f in reports.matrix[cell] if f.mode == name)

    assert mode(("omnivoice_clone", "fleurs"), "F1").status == CANDIDATE
    assert mode(("edge_gulnawaz", "fleurs"), "F1").status == CONFIRMED_PASS
    assert mode(("omnivoice_auto", "fleurs"), "F2").status == CONFIRMED_PASS
    assert mode(("edge_urdu", "fleurs"), "F2").status == CONFIRMED_FAIL
    # Explicit ps-AF locale plus unresolved verification: the language
    # substitution mode cannot apply, it is a verification-power problem.
    assert mode(("edge_gulnawaz", "cv24"), "F2").status == NOT_APPLICABLE
    assert mode(("edge_zarguna", "fleurs"), "F2").status == UNMEASURED
    for cell in reports.matrix:
        assert mode(cell, "F4").status == UNMEASURED


def test_summary_and_card(replay):
    _, _, _, result, reports = replay
    summary = result.summaries[("omnivoice_clone", "fleurs", "asr_v3")]
    assert summary.n_scored == 193
    assert 0.15 <= summary.corpus_wer <= 0.45
    assert summary.ci_lo <= summary.corpus_wer <= summary.ci_hi
    assert summary.seed == 20250614 and summary.n_resamples == 500

    card = reports.cards[("omnivoice_clone", "fleurs")]
    f1 = card.gate("F1")
    assert f1.status == "partial" and f1.value == pytest.approx(0.975)
    assert card.gate("V").status == "unmeasured"
    s_gate = card.gate("S")
    assert s_gate.status == "pass" and s_gate.value == pytest.approx(1.0)
    i_gate = card.gate("I")
    assert i_gate.status == "descriptive"
    assert f"WER {summary.corpus_wer * 100:.1f}%" in i_gate.detail
    assert "natural-speech baseline 34.6%" in i_gate.detail
    assert card.gate("N").status == "deferred"

    urdu_card = reports.cards[("edge_urdu", "fleurs")]
    v_gate = urdu_card.gate("V")
    assert v_gate.status == "fail"
    assert v_gate.value == pytest.approx(0.03)


def test_class_breakdown_only_for_primary_backend(replay):
    _, _, _, result, _ = replay
    assert ("omnivoice_clone", "fleurs") in result.class_wers
    assert ("edge_gulnawaz", "fleurs") not in result.class_wers
    sizes = result.class_sizes[("omnivoice_clone", "fleurs")]
    assert sizes["pashto_unique"] > 100  # 90% of prompts force a unique letter
    assert sizes["common_arabic_only"] + sizes["pashto_unique"] <= 2 * 193


def test_jobs_parameter_is_pure_speedup(replay):
    _, bundle, _, result, _ = replay
    again = score_run(bundle, jobs=4)
    assert again.scores == result.scores
    assert again.exclusions == result.exclusions
    assert again.summaries == result.summaries


def test_hash_verification_demotes_entries(tmp_path):
    prompts = make_prompts("fleurs", 3, seed="hashdemo")
    write_prompts(tmp_path / "prompts.tsv", prompts)
    audio = tmp_path / "audio"
    good = audio / "sys_a" / f"{prompts[0].prompt_id}.wav"
    tampered = audio / "sys_a" / f"{prompts[1].prompt_id}.wav"
    write_silence_wav(good)
    write_silence_wav(tampered, seconds=0.3)
    entries = (
        ManifestEntry(prompts[0].prompt_id, f"sys_a/{prompts[0].prompt_id}.wav", file_sha256(good), 0.2, "ok"),
        ManifestEntry(prompts[1].prompt_id, f"sys_a/{prompts[1].prompt_id}.wav", fake_sha("wrong"), 0.3, "ok"),
        ManifestEntry(prompts[2].prompt_id, f"sys_a/{prompts[2].prompt_id}.wav", fake_sha("gone"), 0.2, "ok"),
    )
    manifest = SynthesisManifest("sys_a", "v", "1", "2025-01-01", "fleurs", entries)
    write_manifest(tmp_path / "manifest.json", manifest)
    hyps = [Hypothesis(p.prompt_id, "sys_a", "fleurs", "asr_v3", p.text) for p in prompts]
    write_hypotheses(tmp_path / "hyps.jsonl", hyps)
    config = {
        "schema_version": 1,
        "seed": 1,
        "prompts": {"fleurs": "prompts.tsv"},
        "systems": [{"system_id": "sys_a", "manifests": {"fleurs": "manifest.json"}}],
        "hypotheses": ["hyps.jsonl"],
        "audio_root": "audio",
        "verify_audio_hashes": True,
    }
    config_path = tmp_path / "config.json"
    config_path.write_text(json.dumps(config), encoding="utf-8")

    bundle, report = load_run(load_config(config_path))
    assert report.ok  # demotions are warnings, not errors
    kinds = sorted(i.kind for i in report.warnings)
    assert "hash_mismatch" in kinds and "missing_file" in kinds

    result = score_run(bundle)
    scores = result.scores[("sys_a", "fleurs", "asr_v3")]
    assert [s.prompt_id for s in scores] == [prompts[0].prompt_id]
    reasons = {e.prompt_id: e.reason for e in result.exclusions}
    assert reasons[prompts[1].prompt_id] == "hash_mismatch"
    assert reasons[prompts[2].prompt_id] == "missing"
    assert result.f1[("sys_a", "fleurs")].ok == 1
