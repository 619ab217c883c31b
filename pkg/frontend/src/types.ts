// Shapes of the JSON documents exposed by the monitoring service.

export type VariableDescriptor = {
  id: number;
  tag: string;
  name: string;
  unit: string;
  kind: "measured" | "manipulated";
};

export type T2Point = {
  t: number;
  t2: number;
  threshold: number;
  exceeds: boolean;
  alarm: boolean;
};

export type Deviation = {
  variable: string;
  tag: string;
  current_value: number;
  normal_mean: number;
  percent_change: number | null;
  contribution: number;
};

export type Candidate = {
  label: number | null;
  title: string;
  explained_features: number | null;
  narrative: string;
};

export type FaultReport = {
  id: string;
  alarm_t: number | null;
  t2_at_alarm: number | null;
  threshold: number | null;
  deviations: Deviation[];
  mode: string;
  raw_response: string;
  candidates: Candidate[];
  model_name: string;
  created_at: string;
  status: "ok" | "parse_failure" | "explanation_failed";
};

export type MonitorEvent =
  | { type: "sample"; payload: { t: number; values: number[] } }
  | { type: "t2"; payload: T2Point }
  | {
      type: "alarm";
      payload: {
        alarm_t: number;
        t2: number;
        threshold: number;
        deviations: Deviation[];
      };
    }
  | { type: "report"; payload: FaultReport }
  | { type: "end_of_series"; payload: { t: number } };

export type ChatMessage = { role: "user" | "assistant"; text: string };
