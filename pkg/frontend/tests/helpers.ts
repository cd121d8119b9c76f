import { ApiError, MovePayload, SessionState } from "../src/api.js";

export const L3_STATE: SessionState = {
  id: "s-1",
  seq: 0,
  capacity: { exact: "1", decimal: "1" },
  target: "1",
  vertices: [
    { id: "1", level: { exact: "0", decimal: "0" } },
    { id: "2", level: { exact: "1", decimal: "1" } },
    { id: "3", level: { exact: "0", decimal: "0" } },
  ],
  edges: [
    ["1", "2"],
    ["2", "3"],
  ],
  history_length: 0,
  level_at_target: { exact: "0", decimal: "0" },
  hints: {
    gla: { set: ["1", "2"], value: { exact: "1/2", decimal: "0.5" }, exact: true },
    upper_bound: { exact: "1", decimal: "1" },
    kappa: { exact: "1/2", decimal: "0.5" },
    kappa_solver: "line-endpoint",
    progress_ratio: { exact: "0", decimal: "0" },
    provenance: "exact",
  },
};

export function stateWith(overrides: Partial<SessionState>): SessionState {
  const base = JSON.parse(JSON.stringify(L3_STATE)) as SessionState;
  return { ...base, ...overrides };
}

/** Minimal stand-in for the service: records calls, replies with queued
 * states, optionally holding responses open to exercise pending gating. */
export class FakeClient {
  calls: { method: string; payload?: MovePayload }[] = [];
  queue: SessionState[] = [];
  failNext: { status: number; detail: string } | null = null;
  holding = false;
  private resolvers: (() => void)[] = [];

  private next(method: string, payload?: MovePayload): Promise<SessionState> {
    this.calls.push({ method, payload });
    if (this.failNext) {
      const { status, detail } = this.failNext;
      this.failNext = null;
      return Promise.reject(new ApiError(status, detail));
    }
    const state = this.queue.shift() ?? L3_STATE;
    if (!this.holding) return Promise.resolve(state);
    return new Promise((resolve) => {
      this.resolvers.push(() => resolve(state));
    });
  }

  release(): void {
    while (this.resolvers.length) this.resolvers.shift()!();
  }

  createSession(): Promise<SessionState> {
    return this.next("create");
  }
  getState(): Promise<SessionState> {
    return this.next("get");
  }
  postMove(_id: string, move: MovePayload): Promise<SessionState> {
    return this.next("move", move);
  }
  undo(): Promise<SessionState> {
    return this.next("undo");
  }
  suggest(): Promise<never> {
    return Promise.reject(new ApiError(500, "suggest not stubbed"));
  }
  exportSession(): Promise<never> {
    return Promise.reject(new ApiError(500, "export not stubbed"));
  }
}
