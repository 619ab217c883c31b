// Server-sent-events subscription for /api/events.
//
// The wire format is a sequence of "data: <json>\n\n" records with
// ": keepalive" comment lines in between.  parseSseChunk is exposed
// separately so the framing can be tested without a socket.

import type { MonitorEvent } from "./types";

export function parseSseChunk(chunk: string): MonitorEvent[] {
  const events: MonitorEvent[] = [];
  for (const line of chunk.split("\n")) {
    if (line.startsWith("data: ")) {
      events.push(JSON.parse(line.slice("data: ".length)) as MonitorEvent);
    }
  }
  return events;
}

export function subscribe(
  url: string,
  onEvent: (event: MonitorEvent) => void,
  onError?: (err: unknown) => void
): () => void {
  const source = new EventSource(url);
  source.onmessage = (msg) => {
    onEvent(JSON.parse(msg.data) as MonitorEvent);
  };
  source.onerror = (err) => {
    if (onError) {
      onError(err);
    }
  };
  return () => source.close();
}
