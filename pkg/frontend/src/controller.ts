// Gesture handling: validates locally (edge exists, selection connected),
// keeps a single mutating request in flight, and updates the view only from
// service responses. Hints annotate; they are never auto-applied.

import { ApiError, ExplorerClient, MovePayload, SessionState } from "./api.js";
import { describeMove, ViewState } from "./state.js";

export class SessionController {
  constructor(
    private client: ExplorerClient,
    readonly view: ViewState,
    private onChange: () => void = () => {},
  ) {}

  private notify(): void {
    this.onChange();
  }

  async start(instance: unknown, target: string): Promise<void> {
    this.view.error = null;
    try {
      const state = await this.client.createSession(instance, target);
      this.view.applyServer(state);
      this.view.history = [];
      this.view.hint = null;
      this.view.clearSelection();
    } catch (err) {
      this.surface(err);
    }
    this.notify();
  }

  private async mutate(move: MovePayload): Promise<void> {
    const session = this.view.state;
    if (!session || this.view.pending) return;
    this.view.pending = true;
    this.view.error = null;
    this.notify();
    try {
      const state = await this.client.postMove(session.id, move);
      if (this.view.applyServer(state)) {
        this.view.history.push(describeMove(move));
        this.view.hint = null;
      }
    } catch (err) {
      this.surface(err); // state untouched: the service rejected the move
    } finally {
      this.view.pending = false;
      this.notify();
    }
  }

  async clickEdge(a: string, b: string, mu: string): Promise<void> {
    if (this.view.pending) return;
    if (!this.view.hasEdge(a, b)) {
      this.view.error = `no pipe between ${a} and ${b}`;
      this.notify();
      return;
    }
    await this.mutate({ edge: [a, b], mu });
  }

  /** Pool the current multi-selection: an adjacent pair becomes a single
   * pipe opening, three or more vertices a macro move. Disconnected
   * selections are blocked before any request is made. */
  async poolSelection(mu: string): Promise<void> {
    if (this.view.pending) return;
    const ids = [...this.view.selection].sort();
    if (ids.length < 2) {
      this.view.error = "select at least two barrels to pool";
      this.notify();
      return;
    }
    if (!this.view.isConnectedSelection(ids)) {
      this.view.error =
        "selection is not connected: pooling needs a pipe path inside the selected set";
      this.notify();
      return;
    }
    this.view.clearSelection();
    if (ids.length === 2) {
      await this.mutate({ edge: [ids[0], ids[1]], mu });
    } else {
      await this.mutate({ macro: this.view.spanningEdges(ids), mu });
    }
  }

  async undo(): Promise<void> {
    const session = this.view.state;
    if (!session || this.view.pending) return;
    if (this.view.history.length === 0) {
      this.view.error = "nothing to undo";
      this.notify();
      return;
    }
    this.view.pending = true;
    this.view.error = null;
    this.notify();
    try {
      const state = await this.client.undo(session.id);
      if (this.view.applyServer(state)) {
        this.view.history.pop();
        this.view.hint = null;
      }
    } catch (err) {
      this.surface(err);
    } finally {
      this.view.pending = false;
      this.notify();
    }
  }

  async requestHint(): Promise<void> {
    const session = this.view.state;
    if (!session) return;
    try {
      this.view.hint = await this.client.suggest(session.id);
    } catch (err) {
      this.surface(err);
    }
    this.notify();
  }

  async refresh(): Promise<void> {
    const session = this.view.state;
    if (!session) return;
    try {
      this.view.applyServer(await this.client.getState(session.id));
    } catch (err) {
      this.surface(err);
    }
    this.notify();
  }

  displayedState(): SessionState | null {
    return this.view.state;
  }

  private surface(err: unknown): void {
    if (err instanceof ApiError) {
      this.view.error = err.detail;
    } else {
      this.view.error = String(err);
    }
  }
}
