// View-side session state. Levels shown to the user always come from the
// last accepted service response; the client never computes levels itself.

import type { MovePayload, SessionState, Suggestion } from "./api.js";

export interface HistoryEntry {
  label: string;
  mu: string;
}

export function describeMove(move: MovePayload): HistoryEntry {
  if (move.edge) {
    return { label: `open ⟨${move.edge[0]},${move.edge[1]}⟩`, mu: move.mu };
  }
  const members = new Set<string>();
  for (const [a, b] of move.macro ?? []) {
    members.add(a);
    members.add(b);
  }
  return { label: `pool {${[...members].sort().join(",")}}`, mu: move.mu };
}

export class ViewState {
  state: SessionState | null = null;
  selection = new Set<string>();
  pending = false;
  history: HistoryEntry[] = [];
  error: string | null = null;
  hint: Suggestion | null = null;
  private lastSeq = -1;

  // The service response is the only way levels enter the view; stale
  // responses (older sequence numbers) are discarded.
  applyServer(state: SessionState): boolean {
    if (this.state !== null && state.id === this.state.id && state.seq < this.lastSeq) {
      return false;
    }
    this.state = state;
    this.lastSeq = state.seq;
    return true;
  }

  levels(): Map<string, { exact: string; decimal: string }> {
    const out = new Map<string, { exact: string; decimal: string }>();
    for (const v of this.state?.vertices ?? []) {
      out.set(v.id, v.level);
    }
    return out;
  }

  adjacency(): Map<string, string[]> {
    const adj = new Map<string, string[]>();
    for (const v of this.state?.vertices ?? []) {
      adj.set(v.id, []);
    }
    for (const [a, b] of this.state?.edges ?? []) {
      adj.get(a)?.push(b);
      adj.get(b)?.push(a);
    }
    return adj;
  }

  hasEdge(a: string, b: string): boolean {
    return (this.state?.edges ?? []).some(
      ([x, y]) => (x === a && y === b) || (x === b && y === a),
    );
  }

  isConnectedSelection(ids: Iterable<string>): boolean {
    const wanted = new Set(ids);
    if (wanted.size === 0) return false;
    const adj = this.adjacency();
    const [start] = wanted;
    const seen = new Set([start]);
    const stack = [start];
    while (stack.length) {
      const x = stack.pop()!;
      for (const y of adj.get(x) ?? []) {
        if (wanted.has(y) && !seen.has(y)) {
          seen.add(y);
          stack.push(y);
        }
      }
    }
    return seen.size === wanted.size;
  }

  // Breadth-first spanning edges of a connected selection, for macro payloads.
  spanningEdges(ids: Iterable<string>): [string, string][] {
    const wanted = new Set(ids);
    const adj = this.adjacency();
    const [start] = wanted;
    const seen = new Set([start]);
    const queue = [start];
    const edges: [string, string][] = [];
    while (queue.length) {
      const x = queue.shift()!;
      for (const y of (adj.get(x) ?? []).slice().sort()) {
        if (wanted.has(y) && !seen.has(y)) {
          seen.add(y);
          edges.push([x, y]);
          queue.push(y);
        }
      }
    }
    return edges;
  }

  toggleSelected(id: string): void {
    if (this.selection.has(id)) {
      this.selection.delete(id);
    } else {
      this.selection.add(id);
    }
  }

  clearSelection(): void {
    this.selection.clear();
  }
}
