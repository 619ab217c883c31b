// Thin client for the service's HTTP interface.  The fetch function is
// injectable so tests can stub the transport.

import type { FaultReport, T2Point, VariableDescriptor } from "./types";

export type FetchLike = (
  input: string,
  init?: { method?: string; headers?: Record<string, string>; body?: string }
) => Promise<{ ok: boolean; status: number; json(): Promise<unknown> }>;

export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = fetch as unknown as FetchLike
  ) {}

  private async get<T>(path: string): Promise<T> {
    const resp = await this.fetchFn(this.baseUrl + path);
    if (!resp.ok) {
      throw new Error(`GET ${path} failed with ${resp.status}`);
    }
    return (await resp.json()) as T;
  }

  private async post<T>(path: string, body: unknown): Promise<T> {
    const resp = await this.fetchFn(this.baseUrl + path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!resp.ok) {
      throw new Error(`POST ${path} failed with ${resp.status}`);
    }
    return (await resp.json()) as T;
  }

  catalog(): Promise<VariableDescriptor[]> {
    return this.get("/api/catalog");
  }

  activeFault(): Promise<{ fault_id: number }> {
    return this.get("/api/fault");
  }

  injectFault(faultId: number): Promise<{ fault_id: number }> {
    return this.post("/api/fault", { fault_id: faultId });
  }

  history(limit = 100): Promise<T2Point[]> {
    return this.get(`/api/t2/history?limit=${limit}`);
  }

  reports(): Promise<FaultReport[]> {
    return this.get("/api/reports");
  }

  chat(
    text: string,
    sessionId: string | null = null
  ): Promise<{ session_id: string; reply: string }> {
    return this.post("/api/chat", { session_id: sessionId, text });
  }
}
