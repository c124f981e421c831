/** Typed client for the CBR service HTTP interface. */

export interface Measurements {
  window_start: number;
  window_end: number;
  utilization: number;
  throughput: number;
  blocking: number;
  preemptions: number;
  devolutions: number;
  offered: number;
  carried: number;
  requests: number;
  blocked: number;
  loss?: number | null;
}

export interface Violation {
  attribute: string;
  measured: number;
  bound: number;
  amount: number;
}

export interface Evaluation {
  score: number;
  violations: Violation[];
  warnings: string[];
}

export interface StateSnapshot {
  model: string;
  clock: number;
  done: boolean;
  paused: boolean;
  mode: string;
  window: Measurements | null;
  score: number | null;
  case_count: number;
  pending_revisions: number;
}

export interface Action {
  name: string;
  parameters: Record<string, unknown>;
}

export interface CaseSummary {
  id: string;
  outcome: string;
  confidence: number;
  created_at: number;
  valid_until: number | null;
  partition: string;
  actions: Action[];
}

export interface CasesPage {
  cases: CaseSummary[];
  next_cursor: string | null;
  total: number;
}

export interface BreakdownRow {
  attribute: string;
  function: string;
  query_value: unknown;
  case_value: unknown;
  local: number;
  weight: number;
}

export interface Provenance {
  source_case_id: string | null;
  similarity: number | null;
  breakdown: BreakdownRow[];
}

export interface Revision {
  id: string;
  kind: "proposal" | "retention";
  status: "pending" | "decided";
  created_at: number;
  trigger: string;
  problem: Record<string, Record<string, unknown>>;
  actions: Action[];
  provenance: Provenance;
  before: Evaluation;
  after: Evaluation | null;
  outcome: string | null;
  verdict: string | null;
  note: string;
}

export type Verdict = "approve" | "adjust" | "reject";

export class ApiError extends Error {
  constructor(readonly status: number, detail: string) {
    super(detail);
  }
}

async function asJson<T>(resp: Response): Promise<T> {
  if (!resp.ok) {
    let detail = resp.statusText;
    try {
      const body = (await resp.json()) as { detail?: string };
      if (body.detail) detail = body.detail;
    } catch {
      /* non-JSON error body */
    }
    throw new ApiError(resp.status, detail);
  }
  return (await resp.json()) as T;
}

export class Client {
  constructor(
    readonly base: string = "",
    private readonly fetchFn: typeof fetch = fetch,
  ) {}

  state(): Promise<StateSnapshot> {
    return this.request("/state");
  }

  cases(params: { outcome?: string; cursor?: string; limit?: number } = {}): Promise<CasesPage> {
    const query = new URLSearchParams();
    if (params.outcome) query.set("outcome", params.outcome);
    if (params.cursor) query.set("cursor", params.cursor);
    if (params.limit) query.set("limit", String(params.limit));
    const suffix = query.size ? `?${query}` : "";
    return this.request(`/cases${suffix}`);
  }

  async revisions(status?: "pending" | "decided"): Promise<Revision[]> {
    const suffix = status ? `?status=${status}` : "";
    const body = await this.request<{ revisions: Revision[] }>(`/revisions${suffix}`);
    return body.revisions;
  }

  decide(id: string, verdict: Verdict, actions?: Action[], note = ""): Promise<Revision> {
    return this.request(`/revisions/${id}/decision`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ verdict, actions, note }),
    });
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    return asJson<T>(await this.fetchFn(`${this.base}${path}`, init));
  }
}
