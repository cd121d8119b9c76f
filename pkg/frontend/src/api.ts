// Typed client for the explorer session service. The service is the single
// source of truth: numbers arrive as exact rational strings plus decimal
// mirrors and are passed through untouched.

export interface Rational {
  exact: string;
  decimal: string;
}

export interface VertexState {
  id: string;
  level: Rational;
}

export interface GlaHint {
  set: string[];
  value: Rational;
  exact: boolean;
}

export interface Hints {
  gla: GlaHint;
  upper_bound: Rational;
  kappa: Rational | null;
  kappa_solver: string | null;
  progress_ratio: Rational | null;
  provenance: string;
}

export interface SessionState {
  id: string;
  seq: number;
  capacity: Rational;
  target: string;
  vertices: VertexState[];
  edges: [string, string][];
  history_length: number;
  level_at_target: Rational;
  hints: Hints;
}

export interface MovePayload {
  edge?: [string, string];
  macro?: [string, string][];
  mu: string;
}

export interface Suggestion {
  action: "move" | "stop";
  move?: MovePayload;
  expected_score?: Rational;
  provenance?: string;
  reason?: string;
}

export interface ExportedSession {
  instance: unknown;
  target: string;
  moves: MovePayload[];
}

export class ApiError extends Error {
  constructor(public status: number, public detail: string) {
    super(`service error ${status}: ${detail}`);
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ExplorerClient {
  constructor(
    private baseUrl: string,
    private fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await this.fetchFn(this.baseUrl + path, {
      method,
      headers: body === undefined ? undefined : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const text = await response.text();
    if (!response.ok) {
      let detail = text;
      try {
        const doc = JSON.parse(text);
        detail = typeof doc.detail === "string" ? doc.detail : JSON.stringify(doc.detail);
      } catch {
        // keep raw body
      }
      throw new ApiError(response.status, detail);
    }
    return JSON.parse(text) as T;
  }

  createSession(instance: unknown, target: string): Promise<SessionState> {
    return this.request("POST", "/sessions", { instance, target });
  }

  getState(id: string): Promise<SessionState> {
    return this.request("GET", `/sessions/${id}`);
  }

  postMove(id: string, move: MovePayload): Promise<SessionState> {
    return this.request("POST", `/sessions/${id}/moves`, move);
  }

  undo(id: string): Promise<SessionState> {
    return this.request("POST", `/sessions/${id}/undo`);
  }

  suggest(id: string): Promise<Suggestion> {
    return this.request("GET", `/sessions/${id}/suggest`);
  }

  exportSession(id: string): Promise<ExportedSession> {
    return this.request("GET", `/sessions/${id}/export`);
  }
}
