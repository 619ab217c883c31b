// Pure UI-state reducer over the service's event stream.
//
// Keeping all state transitions in a plain function lets the whole
// dashboard be exercised against a recorded event log without a
// browser or a live service.

import type { Deviation, FaultReport, MonitorEvent, T2Point } from "./types";

export const MAX_POINTS = 500;

export type AlarmBanner = {
  alarmT: number;
  t2: number;
  threshold: number;
  deviations: Deviation[];
};

export type UiState = {
  points: T2Point[];
  latestSample: { t: number; values: number[] } | null;
  alarm: AlarmBanner | null;
  reports: FaultReport[];
  seriesEnded: boolean;
};

export function initialState(): UiState {
  return {
    points: [],
    latestSample: null,
    alarm: null,
    reports: [],
    seriesEnded: false,
  };
}

export function reduce(state: UiState, event: MonitorEvent): UiState {
  switch (event.type) {
    case "sample":
      return { ...state, latestSample: event.payload };
    case "t2": {
      const points = [...state.points, event.payload];
      if (points.length > MAX_POINTS) {
        points.splice(0, points.length - MAX_POINTS);
      }
      return { ...state, points };
    }
    case "alarm":
      return {
        ...state,
        alarm: {
          alarmT: event.payload.alarm_t,
          t2: event.payload.t2,
          threshold: event.payload.threshold,
          deviations: event.payload.deviations,
        },
      };
    case "report":
      return { ...state, reports: [...state.reports, event.payload] };
    case "end_of_series":
      return { ...state, seriesEnded: true };
    default:
      return state;
  }
}

export function replay(events: MonitorEvent[], state?: UiState): UiState {
  return events.reduce(reduce, state ?? initialState());
}

// Display color for one chart point: red above threshold, green below.
export function pointColor(point: T2Point): "red" | "green" {
  return point.t2 > point.threshold ? "red" : "green";
}
