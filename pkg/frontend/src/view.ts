// Pure view-model helpers: UiState in, plain renderable structures out.
// app.ts only has to copy these into the DOM.

import { pointColor, UiState } from "./reducer";
import type { Candidate, ChatMessage } from "./types";

export type ChartDot = { t: number; t2: number; color: "red" | "green" };

export function chartDots(state: UiState): ChartDot[] {
  return state.points.map((p) => ({ t: p.t, t2: p.t2, color: pointColor(p) }));
}

export function alarmSummary(state: UiState): string | null {
  if (!state.alarm) {
    return null;
  }
  const a = state.alarm;
  return (
    `Alarm at t=${a.alarmT}: T2=${a.t2.toFixed(2)} ` +
    `(threshold ${a.threshold.toFixed(2)})`
  );
}

export function deviationRows(
  state: UiState
): { name: string; change: string; contribution: string }[] {
  if (!state.alarm) {
    return [];
  }
  return state.alarm.deviations.map((d) => ({
    name: `${d.variable} (${d.tag})`,
    change:
      d.percent_change === null
        ? "undefined"
        : `${d.percent_change >= 0 ? "+" : ""}${d.percent_change.toFixed(2)}%`,
    contribution: d.contribution.toFixed(2),
  }));
}

export function candidateLine(c: Candidate): string {
  const label = c.label === null ? c.title : `IDV(${c.label}): ${c.title}`;
  const count =
    c.explained_features === null
      ? ""
      : ` — explains ${c.explained_features}/6 features`;
  return label + count;
}

export function reportSummaries(
  state: UiState
): { id: string; status: string; lines: string[] }[] {
  return state.reports.map((r) => ({
    id: r.id,
    status: r.status,
    lines: r.candidates.map(candidateLine),
  }));
}

export function transcriptLines(messages: ChatMessage[]): string[] {
  return messages.map((m) => `${m.role === "user" ? "you" : "model"}: ${m.text}`);
}
