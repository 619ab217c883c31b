import pytest

from tepmon import evalharness, explainer
from tepmon.errors import MissingDataset
from tepmon.evalharness import (
    ALIASES,
    REFERENCE_UNDETECTED,
    EvalParams,
    detection_table_csv,
    detection_table_pretty,
    diagnosis_table_pretty,
    run_detection_eval,
    run_diagnosis_eval,
    score_candidates,
)
from tepmon.explainer import Candidate, PromptMode
from tepmon.llm import StubBackend


@pytest.fixture(scope="module")
def detection(data_dir):
    return run_detection_eval(data_dir)


def _cands(*labels):
    return [
        Candidate(label=k, title=explainer.ROOT_CAUSES[k], explained_features=None,
                  narrative="")
        for k in labels
    ]


# ---------------------------------------------------------------- detection


def test_detection_covers_all_15_faults(detection):
    _, rows = detection
    assert [r.fault_id for r in rows] == list(range(1, 16))
    assert all(len(r.top6) == 6 for r in rows)


def test_detection_outcomes_match_reference(detection):
    _, rows = detection
    detected = {r.fault_id for r in rows if r.detected}
    assert detected == set(range(1, 16)) - REFERENCE_UNDETECTED
    for r in rows:
        if r.detected:
            assert r.alarm_t is not None and r.alarm_t >= 160
        else:
            assert r.alarm_t is None


def test_detection_missing_dataset(tmp_path):
    with pytest.raises(MissingDataset):
        run_detection_eval(tmp_path)


def test_detection_csv_byte_deterministic(detection, data_dir):
    _, rows = detection
    first = detection_table_csv(rows)
    _, rows2 = run_detection_eval(data_dir, EvalParams())
    assert detection_table_csv(rows2) == first
    header = first.splitlines()[0]
    assert header.startswith("fault_id,detected,alarm_t,a_used,threshold")
    assert len(first.splitlines()) == 16


def test_detection_pretty_flags_divergence(detection):
    _, rows = detection
    text = detection_table_pretty(rows)
    # the recorded data reproduces the reference outcome exactly
    assert "[diverges from the reference detection outcome]" not in text
    assert "fault  7: alarm at t=" in text
    assert "fault  3: not detected" in text


# ------------------------------------------------------------------ scoring


def test_alias_scoring_accepts_aliases():
    assert score_candidates(1, _cands(8))
    assert score_candidates(4, _cands(14))
    assert score_candidates(5, _cands(15, 3))
    assert not score_candidates(7, _cands(6, 8, 4))


def test_alias_map_is_symmetric():
    for a, group in ALIASES.items():
        for b in group:
            if b != a:
                assert a in ALIASES[b], f"{a} aliases {b} but not vice versa"


def test_score_exact_match_without_aliases():
    assert score_candidates(7, _cands(7))
    assert score_candidates(6, _cands(1, 6))
    assert not score_candidates(6, _cands())


# ---------------------------------------------------------------- diagnosis


def test_diagnosis_skips_undetected(detection):
    _, rows = detection
    backend = StubBackend("IDV(1)")
    out = run_diagnosis_eval(rows, PromptMode.ROOT_CAUSES_INCLUDED, backend)
    assert [r.fault_id for r in out] == sorted(
        set(range(1, 16)) - REFERENCE_UNDETECTED
    )
    assert len(backend.calls) == len(out)


def test_diagnosis_correct_and_incorrect_stub_answers(detection):
    _, rows = detection
    fault7 = [r for r in rows if r.fault_id == 7]

    incorrect = run_diagnosis_eval(
        fault7, PromptMode.ROOT_CAUSES_INCLUDED,
        StubBackend("Most likely: IDV(6), then IDV(1), then IDV(4)."),
    )
    assert [c.label for c in incorrect[0].top3] == [6, 1, 4]
    assert not incorrect[0].correct

    correct = run_diagnosis_eval(
        fault7, PromptMode.ROOT_CAUSES_INCLUDED,
        StubBackend("Candidates: IDV(6), IDV(7), IDV(8)."),
    )
    assert [c.label for c in correct[0].top3] == [6, 7, 8]
    assert correct[0].correct


def test_diagnosis_empty_response_scores_incorrect(detection):
    _, rows = detection
    fault7 = [r for r in rows if r.fault_id == 7]
    out = run_diagnosis_eval(fault7, PromptMode.ROOT_CAUSES_INCLUDED, StubBackend(""))
    assert out[0].top3 == []
    assert not out[0].correct


def test_diagnosis_pretty_accuracy_line(detection):
    _, rows = detection
    fault7 = [r for r in rows if r.fault_id == 7]
    out = run_diagnosis_eval(
        fault7, PromptMode.ROOT_CAUSES_INCLUDED, StubBackend("IDV(7)")
    )
    text = diagnosis_table_pretty(out)
    assert "accuracy: 1/1" in text
    assert "fault  7: top3=[7] correct" in text
