"""Grounded fault-explanation prompts, response parsing, and chat
sessions.

Prompt wording lives in editable template files under ``prompts/`` with
named placeholders; the code only fills them in, so prompts can be tuned
without touching code.
"""

from __future__ import annotations

import datetime
import itertools
import re
import time
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources

from .errors import BackendUnavailable, MissingCorpus, WrongArity
from .llm import AuditLog, LlmBackend
from .monitor import FeatureDeviation

PROMPT_DEVIATION_COUNT = 6
MAX_CANDIDATES = 3

# The 15 programmed disturbances with known root causes.
ROOT_CAUSES: dict[int, str] = {
    1: "A/C Feed Ratio, B Composition Constant (Stream 4) & Step",
    2: "B Composition, A/C Ratio Constant (Stream 4) & Step",
    3: "D Feed Temperature (Stream 2) & Step",
    4: "Reactor Cooling Water Inlet Temperature & Step",
    5: "Condenser Cooling Water Inlet Temperature & Step",
    6: "A Feed Loss (Stream 1) & Step",
    7: "C Header Pressure Loss - Reduced Availability (Stream 4) & Step",
    8: "A, B, C Feed Composition (Stream 4) & Random Variation",
    9: "D Feed Temperature (Stream 2) & Random Variation",
    10: "C Feed Temperature (Stream 4) & Random Variation",
    11: "Reactor Cooling Water Inlet Temperature & Random Variation",
    12: "Condenser Cooling Water Inlet Temperature & Random Variation",
    13: "Reaction Kinetics & Slow Drift",
    14: "Reactor Cooling Water Valve & Sticking",
    15: "Condenser Cooling Water Valve & Sticking",
}


class PromptMode(str, Enum):
    ROOT_CAUSES_INCLUDED = "included"
    GENERAL_REASONING = "general"


@dataclass(frozen=True)
class PromptBundle:
    mode: PromptMode
    system_text: str
    user_text: str
    root_cause_list: list[str] | None


@dataclass
class Candidate:
    label: int | None  # disturbance id when the prompt constrained the list
    title: str
    explained_features: int | None
    narrative: str


@dataclass
class FaultReport:
    id: str
    alarm_t: int | None
    t2_at_alarm: float | None
    threshold: float | None
    deviations: list[FeatureDeviation]
    mode: PromptMode
    raw_response: str
    candidates: list[Candidate]
    model_name: str
    created_at: str
    status: str = "ok"  # ok | parse_failure | explanation_failed

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "alarm_t": self.alarm_t,
            "t2_at_alarm": self.t2_at_alarm,
            "threshold": self.threshold,
            "deviations": [
                {
                    "variable": d.variable.name,
                    "tag": d.variable.tag,
                    "current_value": d.current_value,
                    "normal_mean": d.normal_mean,
                    "percent_change": d.percent_change,
                    "contribution": d.contribution,
                }
                for d in self.deviations
            ],
            "mode": self.mode.value,
            "raw_response": self.raw_response,
            "candidates": [
                {
                    "label": c.label,
                    "title": c.title,
                    "explained_features": c.explained_features,
                    "narrative": c.narrative,
                }
                for c in self.candidates
            ],
            "model_name": self.model_name,
            "created_at": self.created_at,
            "status": self.status,
        }


def _read_template(name: str) -> str:
    try:
        return (
            resources.files("tepmon").joinpath("prompts").joinpath(name).read_text()
        )
    except FileNotFoundError as exc:
        raise MissingCorpus(name) from exc


def load_process_description() -> str:
    return _read_template("system_process_description.txt")


def format_deviation(d: FeatureDeviation) -> str:
    if d.percent_change is None:
        change = "change undefined (normal mean is ~0)"
    else:
        change = f"changed by {d.percent_change:+.2f}%"
    return (
        f"- {d.variable.name} ({d.variable.tag}, {d.variable.kind.value}): "
        f"current {d.current_value:.6g} {d.variable.unit} vs normal mean "
        f"{d.normal_mean:.6g} {d.variable.unit}, {change}"
    )


def render_root_cause_list() -> str:
    return "\n".join(f"IDV({k}): {title}" for k, title in ROOT_CAUSES.items())


def build_fault_prompt(
    deviations: list[FeatureDeviation],
    mode: PromptMode,
    corpus: str | None = None,
) -> PromptBundle:
    """Assemble the grounded system/user prompt pair for one fault."""
    if len(deviations) != PROMPT_DEVIATION_COUNT:
        raise WrongArity(
            f"expected {PROMPT_DEVIATION_COUNT} deviations, got {len(deviations)}"
        )
    system_text = corpus if corpus is not None else load_process_description()
    rendered = "\n".join(format_deviation(d) for d in deviations)
    if mode is PromptMode.ROOT_CAUSES_INCLUDED:
        template = _read_template("root_causes_included.txt")
        user_text = template.format(
            deviations=rendered, root_cause_list=render_root_cause_list()
        )
        causes = list(ROOT_CAUSES.values())
    else:
        template = _read_template("general_reasoning.txt")
        user_text = template.format(deviations=rendered)
        causes = None
    return PromptBundle(
        mode=mode, system_text=system_text, user_text=user_text,
        root_cause_list=causes,
    )


def recover_prompt_percentages(user_text: str) -> list[float]:
    """Signed percent changes as rendered in a prompt, in order."""
    return [float(m) for m in re.findall(r"changed by ([+-]\d+\.\d{2})%", user_text)]


_IDV_RE = re.compile(r"IDV\s*\(\s*(\d+)\s*\)")
_HEADING_RE = re.compile(r"Root Cause\s*(\d+)\s*:\s*([^\n]*)")
_EXPLAINED_RE = re.compile(r"(\d+)\s*(?:/\s*6|out of(?:\s+the)?\s+6)")


def _explained_count(text: str) -> int | None:
    m = _EXPLAINED_RE.search(text)
    if not m:
        return None
    return max(0, min(6, int(m.group(1))))


def parse_root_causes(text: str, mode: PromptMode) -> list[Candidate]:
    """Best-effort extraction of up to three ranked candidates."""
    if not text:
        return []
    if mode is PromptMode.ROOT_CAUSES_INCLUDED:
        matches = [m for m in _IDV_RE.finditer(text) if 1 <= int(m.group(1)) <= 15]
        seen: list[int] = []
        picked = []
        for m in matches:
            label = int(m.group(1))
            if label in seen:
                continue
            seen.append(label)
            picked.append(m)
            if len(picked) == MAX_CANDIDATES:
                break
        candidates = []
        for m, nxt in itertools.zip_longest(picked, picked[1:]):
            label = int(m.group(1))
            segment = text[m.start(): nxt.start() if nxt else len(text)]
            candidates.append(
                Candidate(
                    label=label,
                    title=ROOT_CAUSES[label],
                    explained_features=_explained_count(segment),
                    narrative=segment.strip(),
                )
            )
        return candidates
    headings = list(_HEADING_RE.finditer(text))[:MAX_CANDIDATES]
    candidates = []
    for m, nxt in itertools.zip_longest(headings, headings[1:]):
        segment = text[m.start(): nxt.start() if nxt else len(text)]
        candidates.append(
            Candidate(
                label=None,
                title=m.group(2).strip().rstrip("*").strip(),
                explained_features=_explained_count(segment),
                narrative=segment.strip(),
            )
        )
    return candidates


_report_counter = itertools.count(1)


def generate_explanation(
    bundle: PromptBundle,
    backend: LlmBackend,
    alarm_t: int | None = None,
    t2_at_alarm: float | None = None,
    threshold: float | None = None,
    deviations: list[FeatureDeviation] | None = None,
    audit: AuditLog | None = None,
    max_retries: int = 3,
    backoff_base: float = 0.5,
    sleep=time.sleep,
) -> FaultReport:
    """Call the backend (with retries) and parse the ranked candidates.

    A report object is always produced on a successful transport; parse
    failures are recorded in the report status rather than raised.
    """
    messages = [{"role": "user", "content": bundle.user_text}]
    if audit:
        audit.record("request", {"mode": bundle.mode.value, "user_text": bundle.user_text})
    last_error: Exception | None = None
    text = None
    for attempt in range(max_retries):
        try:
            text = backend.complete(bundle.system_text, messages)
            break
        except BackendUnavailable as exc:
            last_error = exc
            if audit:
                audit.record("retry", {"attempt": attempt + 1, "error": str(exc)})
            if attempt < max_retries - 1:
                sleep(backoff_base * (2**attempt))
    if text is None:
        raise BackendUnavailable(str(last_error))
    if audit:
        audit.record("response", {"text": text})
    candidates = parse_root_causes(text, bundle.mode)
    status = "ok" if candidates or not text.strip() else "parse_failure"
    return FaultReport(
        id=f"report-{next(_report_counter)}",
        alarm_t=alarm_t,
        t2_at_alarm=t2_at_alarm,
        threshold=threshold,
        deviations=deviations or [],
        mode=bundle.mode,
        raw_response=text,
        candidates=candidates,
        model_name=backend.model_name,
        created_at=datetime.datetime.now(datetime.timezone.utc).isoformat(),
        status=status,
    )


@dataclass
class ChatSession:
    """One conversation; the first message is always the system prompt."""

    id: str
    messages: list[dict] = field(default_factory=list)
    attached_reports: list[str] = field(default_factory=list)
    overflow_events: int = 0

    @classmethod
    def create(cls, session_id: str, system_text: str) -> "ChatSession":
        return cls(id=session_id, messages=[{"role": "system", "text": system_text}])


def chat_turn(
    session: ChatSession,
    user_text: str,
    backend: LlmBackend,
    reports: list[FaultReport] | None = None,
    context_char_limit: int | None = None,
    audit: AuditLog | None = None,
) -> str:
    """Run one user turn; appends user and assistant messages.

    The submitted context is the system corpus plus attached fault
    reports plus the history; when a character budget is exceeded the
    oldest user/assistant pairs are dropped (system always retained) and
    the event is counted on the session.
    """
    system_text = session.messages[0]["text"]
    if reports:
        attached = "\n\n".join(
            f"[Fault report {r.id}]\n{r.raw_response}" for r in reports
        )
        system_text = f"{system_text}\n\nPrevious fault reports:\n{attached}"
    history = [
        {"role": m["role"], "content": m["text"]}
        for m in session.messages[1:]
    ]
    history.append({"role": "user", "content": user_text})
    if context_char_limit is not None:
        def total(h):
            return len(system_text) + sum(len(m["content"]) for m in h)

        while len(history) > 1 and total(history) > context_char_limit:
            history = history[2:] if len(history) > 2 else history[1:]
            session.overflow_events += 1
            if audit:
                audit.record("context_overflow", {"session": session.id})
            if len(history) <= 1:
                break
    reply = backend.complete(system_text, history)
    if audit:
        audit.record(
            "chat", {"session": session.id, "user": user_text, "assistant": reply}
        )
    session.messages.append({"role": "user", "text": user_text})
    session.messages.append({"role": "assistant", "text": reply})
    return reply
