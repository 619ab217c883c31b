import json

import pytest

from tepmon import catalog, explainer
from tepmon.errors import BackendUnavailable, WrongArity
from tepmon.explainer import (
    ChatSession,
    PromptMode,
    build_fault_prompt,
    chat_turn,
    generate_explanation,
    parse_root_causes,
    recover_prompt_percentages,
)
from tepmon.llm import AuditLog, FlakyBackend, StubBackend
from tepmon.monitor import FeatureDeviation


def _deviation(var_id, pct, current=1.0, mean=1.0, cont=5.0):
    return FeatureDeviation(
        variable=catalog.descriptor(var_id),
        current_value=current,
        normal_mean=mean,
        percent_change=pct,
        contribution=cont,
    )


def _six_deviations():
    pcts = [13.12, -8.90, -3.69, -3.58, -3.49, -3.00]
    ids = [44, 3, 12, 19, 6, 15]
    return [_deviation(v, p) for v, p in zip(ids, pcts)]


# ------------------------------------------------------------------ prompts


def test_prompt_requires_exactly_six():
    with pytest.raises(WrongArity):
        build_fault_prompt(_six_deviations()[:5], PromptMode.ROOT_CAUSES_INCLUDED)
    with pytest.raises(WrongArity):
        build_fault_prompt(
            _six_deviations() + [_deviation(0, 1.0)], PromptMode.GENERAL_REASONING
        )


def test_included_mode_lists_all_15_causes():
    bundle = build_fault_prompt(_six_deviations(), PromptMode.ROOT_CAUSES_INCLUDED)
    for k, title in explainer.ROOT_CAUSES.items():
        assert f"IDV({k}): {title}" in bundle.user_text
    assert "A Feed Loss (Stream 1) & Step" in bundle.user_text
    assert bundle.root_cause_list == list(explainer.ROOT_CAUSES.values())


def test_general_mode_excludes_cause_list():
    bundle = build_fault_prompt(_six_deviations(), PromptMode.GENERAL_REASONING)
    for title in explainer.ROOT_CAUSES.values():
        assert title not in bundle.user_text
    assert "IDV(" not in bundle.user_text
    assert bundle.root_cause_list is None


def test_prompt_rendering_byte_identical():
    a = build_fault_prompt(_six_deviations(), PromptMode.ROOT_CAUSES_INCLUDED)
    b = build_fault_prompt(_six_deviations(), PromptMode.ROOT_CAUSES_INCLUDED)
    assert a.user_text == b.user_text
    assert a.system_text == b.system_text


def test_prompt_contains_process_context():
    bundle = build_fault_prompt(_six_deviations(), PromptMode.GENERAL_REASONING)
    assert "reactor" in bundle.system_text.lower()
    assert "stripper" in bundle.system_text.lower()


def test_grounding_roundtrip():
    """Percent changes printed in the prompt recover the input values."""
    devs = _six_deviations()
    bundle = build_fault_prompt(devs, PromptMode.ROOT_CAUSES_INCLUDED)
    recovered = recover_prompt_percentages(bundle.user_text)
    assert recovered == pytest.approx([d.percent_change for d in devs], abs=5e-3)
    # variable names appear verbatim, in rank order
    positions = [bundle.user_text.find(d.variable.name) for d in devs]
    assert all(p >= 0 for p in positions)
    assert positions == sorted(positions)


def test_undefined_percent_change_rendered_specially():
    devs = _six_deviations()
    devs[2] = _deviation(12, None)
    bundle = build_fault_prompt(devs, PromptMode.GENERAL_REASONING)
    assert "change undefined" in bundle.user_text
    assert len(recover_prompt_percentages(bundle.user_text)) == 5


# ------------------------------------------------------------------ parsing


def test_parse_three_idv_candidates():
    text = (
        "The most likely cause is IDV(7), which explains 5 out of the 6 "
        "features. Next is IDV(6) explaining 3 out of 6 features. "
        "Finally IDV(8) explains 2 out of the 6 features."
    )
    cands = parse_root_causes(text, PromptMode.ROOT_CAUSES_INCLUDED)
    assert [c.label for c in cands] == [7, 6, 8]
    assert [c.explained_features for c in cands] == [5, 3, 2]
    assert cands[0].title.startswith("C Header Pressure Loss")


def test_parse_dedupes_and_caps_at_three():
    text = "IDV(4) then IDV(4) again, then IDV(11), IDV(14), IDV(2)."
    cands = parse_root_causes(text, PromptMode.ROOT_CAUSES_INCLUDED)
    assert [c.label for c in cands] == [4, 11, 14]


def test_parse_ignores_out_of_range_labels():
    cands = parse_root_causes("IDV(0) and IDV(16) and IDV(99)", PromptMode.ROOT_CAUSES_INCLUDED)
    assert cands == []


def test_parse_slash_notation_count():
    cands = parse_root_causes("IDV(13): explains 4/6 features", PromptMode.ROOT_CAUSES_INCLUDED)
    assert cands[0].explained_features == 4


def test_parse_empty_response():
    assert parse_root_causes("", PromptMode.ROOT_CAUSES_INCLUDED) == []
    assert parse_root_causes("", PromptMode.GENERAL_REASONING) == []


def test_parse_general_mode_headings():
    text = (
        "Root Cause 1: Loss of feed in stream 1\n"
        "This explains 5 out of the 6 features because...\n"
        "Root Cause 2: Cooling water disturbance\n"
        "This explains 2 out of 6 features.\n"
    )
    cands = parse_root_causes(text, PromptMode.GENERAL_REASONING)
    assert len(cands) == 2
    assert cands[0].label is None
    assert cands[0].title == "Loss of feed in stream 1"
    assert cands[0].explained_features == 5
    assert cands[1].explained_features == 2


# --------------------------------------------------------------- generation


def test_generate_explanation_with_stub():
    bundle = build_fault_prompt(_six_deviations(), PromptMode.ROOT_CAUSES_INCLUDED)
    stub = StubBackend("IDV(7) explains 6 out of the 6 features.")
    report = generate_explanation(bundle, stub, alarm_t=165, deviations=_six_deviations())
    assert report.status == "ok"
    assert report.candidates[0].label == 7
    assert report.candidates[0].explained_features == 6
    assert report.alarm_t == 165
    # the stub saw the grounded prompt
    system, messages = stub.calls[0]
    assert messages[0]["content"] == bundle.user_text
    assert system == bundle.system_text
    # report serializes cleanly
    doc = report.to_json()
    json.dumps(doc)
    assert doc["mode"] == "included"
    assert len(doc["deviations"]) == 6


def test_generate_marks_parse_failure():
    bundle = build_fault_prompt(_six_deviations(), PromptMode.ROOT_CAUSES_INCLUDED)
    report = generate_explanation(bundle, StubBackend("no structured answer here"))
    assert report.status == "parse_failure"
    assert report.candidates == []
    assert report.raw_response == "no structured answer here"


def test_generate_retries_with_backoff():
    bundle = build_fault_prompt(_six_deviations(), PromptMode.ROOT_CAUSES_INCLUDED)
    flaky = FlakyBackend(StubBackend("IDV(6)"), failures=2)
    sleeps = []
    report = generate_explanation(bundle, flaky, sleep=sleeps.append)
    assert report.candidates[0].label == 6
    assert sleeps == [0.5, 1.0]


def test_generate_gives_up_after_max_retries():
    bundle = build_fault_prompt(_six_deviations(), PromptMode.ROOT_CAUSES_INCLUDED)
    flaky = FlakyBackend(StubBackend("IDV(6)"), failures=3)
    with pytest.raises(BackendUnavailable):
        generate_explanation(bundle, flaky, sleep=lambda s: None)


def test_generate_writes_audit_log(tmp_path):
    path = tmp_path / "audit.jsonl"
    bundle = build_fault_prompt(_six_deviations(), PromptMode.ROOT_CAUSES_INCLUDED)
    generate_explanation(bundle, StubBackend("IDV(1)"), audit=AuditLog(path))
    events = [json.loads(line) for line in path.read_text().splitlines()]
    assert [e["event"] for e in events] == ["request", "response"]
    assert events[1]["text"] == "IDV(1)"


# --------------------------------------------------------------------- chat


def test_chat_sessions_isolated():
    backend = StubBackend(lambda system, msgs: f"echo:{msgs[-1]['content']}")
    a = ChatSession.create("a", "corpus")
    b = ChatSession.create("b", "corpus")
    chat_turn(a, "hello from a", backend)
    chat_turn(b, "hello from b", backend)
    assert len(a.messages) == 3 and len(b.messages) == 3
    assert a.messages[1]["text"] == "hello from a"
    assert b.messages[1]["text"] == "hello from b"


def test_chat_attaches_reports_to_system_context():
    bundle = build_fault_prompt(_six_deviations(), PromptMode.ROOT_CAUSES_INCLUDED)
    report = generate_explanation(bundle, StubBackend("IDV(7) is the cause"))
    backend = StubBackend("ok")
    session = ChatSession.create("s", "corpus")
    chat_turn(session, "what happened?", backend, reports=[report])
    system, _ = backend.calls[0]
    assert "IDV(7) is the cause" in system
    assert system.startswith("corpus")


def test_chat_overflow_drops_oldest_pairs_keeps_system():
    backend = StubBackend("r" * 10)
    session = ChatSession.create("s", "SYS")
    for i in range(6):
        chat_turn(session, f"question number {i} padded out", backend,
                  context_char_limit=120)
    assert session.overflow_events > 0
    # the system text was always submitted
    for system, msgs in backend.calls:
        assert system == "SYS"
        assert all(m["role"] in ("user", "assistant") for m in msgs)
    # the final call stayed within budget
    system, msgs = backend.calls[-1]
    assert len(system) + sum(len(m["content"]) for m in msgs) <= 120


def test_chat_no_overflow_without_limit():
    backend = StubBackend("reply")
    session = ChatSession.create("s", "SYS")
    for i in range(10):
        chat_turn(session, f"q{i}", backend)
    assert session.overflow_events == 0
    # full history submitted on the last turn
    _, msgs = backend.calls[-1]
    assert len(msgs) == 19
