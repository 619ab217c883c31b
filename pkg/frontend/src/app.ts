// DOM wiring for the dashboard: chart, fault dropdown, alarm banner,
// report list, and chat box.  All state logic lives in reducer.ts and
// view.ts; this file only copies view models into elements.

import { ApiClient } from "./api";
import { initialState, reduce, UiState } from "./reducer";
import { subscribe } from "./sse";
import type { ChatMessage } from "./types";
import {
  alarmSummary,
  chartDots,
  deviationRows,
  reportSummaries,
  transcriptLines,
} from "./view";

const FAULT_COUNT = 15;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) {
    throw new Error(`missing element #${id}`);
  }
  return node as T;
}

function drawChart(canvas: HTMLCanvasElement, state: UiState): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) {
    return;
  }
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  const dots = chartDots(state);
  if (dots.length === 0) {
    return;
  }
  const maxT2 = Math.max(
    ...dots.map((d) => d.t2),
    state.points[0].threshold * 1.5
  );
  const x = (i: number) => (i / Math.max(dots.length - 1, 1)) * canvas.width;
  const y = (v: number) => canvas.height - (v / maxT2) * canvas.height;
  // threshold line
  ctx.strokeStyle = "#888";
  ctx.setLineDash([4, 4]);
  ctx.beginPath();
  ctx.moveTo(0, y(state.points[0].threshold));
  ctx.lineTo(canvas.width, y(state.points[0].threshold));
  ctx.stroke();
  ctx.setLineDash([]);
  dots.forEach((d, i) => {
    ctx.fillStyle = d.color;
    ctx.fillRect(x(i) - 1.5, y(d.t2) - 1.5, 3, 3);
  });
}

function render(state: UiState, chat: ChatMessage[]): void {
  drawChart(el<HTMLCanvasElement>("chart"), state);

  const banner = el<HTMLDivElement>("alarm-banner");
  const summary = alarmSummary(state);
  banner.textContent = summary ?? "";
  banner.style.display = summary ? "block" : "none";

  const tbody = el<HTMLTableSectionElement>("deviations");
  tbody.innerHTML = "";
  for (const row of deviationRows(state)) {
    const tr = document.createElement("tr");
    for (const cell of [row.name, row.change, row.contribution]) {
      const td = document.createElement("td");
      td.textContent = cell;
      tr.appendChild(td);
    }
    tbody.appendChild(tr);
  }

  const reports = el<HTMLDivElement>("reports");
  reports.innerHTML = "";
  for (const r of reportSummaries(state)) {
    const div = document.createElement("div");
    div.className = `report report-${r.status}`;
    const head = document.createElement("h3");
    head.textContent = `${r.id} (${r.status})`;
    div.appendChild(head);
    for (const line of r.lines) {
      const p = document.createElement("p");
      p.textContent = line;
      div.appendChild(p);
    }
    reports.appendChild(div);
  }

  const transcript = el<HTMLDivElement>("transcript");
  transcript.innerHTML = "";
  for (const line of transcriptLines(chat)) {
    const p = document.createElement("p");
    p.textContent = line;
    transcript.appendChild(p);
  }
}

export async function start(baseUrl = ""): Promise<void> {
  const api = new ApiClient(baseUrl);
  let state = initialState();
  const chat: ChatMessage[] = [];
  let sessionId: string | null = null;

  const dropdown = el<HTMLSelectElement>("fault-select");
  for (let k = 0; k <= FAULT_COUNT; k++) {
    const option = document.createElement("option");
    option.value = String(k);
    option.textContent = k === 0 ? "normal operation" : `fault ${k}`;
    dropdown.appendChild(option);
  }
  const active = await api.activeFault();
  dropdown.value = String(active.fault_id);
  dropdown.onchange = async () => {
    const chosen = await api.injectFault(Number(dropdown.value));
    dropdown.value = String(chosen.fault_id);
  };

  const input = el<HTMLInputElement>("chat-input");
  el<HTMLButtonElement>("chat-send").onclick = async () => {
    const text = input.value.trim();
    if (!text) {
      return;
    }
    input.value = "";
    chat.push({ role: "user", text });
    render(state, chat);
    const resp = await api.chat(text, sessionId);
    sessionId = resp.session_id;
    chat.push({ role: "assistant", text: resp.reply });
    render(state, chat);
  };

  // seed the chart from history (served newest first), then go live
  const history = await api.history(500);
  for (const point of history.reverse()) {
    state = reduce(state, { type: "t2", payload: point });
  }
  render(state, chat);
  subscribe(`${baseUrl}/api/events`, (event) => {
    state = reduce(state, event);
    render(state, chat);
  });
}
