import { describe, expect, it } from "vitest";

import { computeLayout, forceLayout, pathOrder } from "../src/layout.js";

function adjacency(ids: string[], edges: [string, string][]): Map<string, string[]> {
  const adj = new Map(ids.map((id) => [id, [] as string[]]));
  for (const [a, b] of edges) {
    adj.get(a)!.push(b);
    adj.get(b)!.push(a);
  }
  return adj;
}

describe("layout", () => {
  it("detects path graphs and lays them out left to right", () => {
    const ids = ["1", "2", "3"];
    const edges: [string, string][] = [["1", "2"], ["2", "3"]];
    const { points, kind } = computeLayout(ids, edges, adjacency(ids, edges), 760, 420);
    expect(kind).toBe("line");
    expect(points.get("1")!.x).toBeLessThan(points.get("2")!.x);
    expect(points.get("2")!.x).toBeLessThan(points.get("3")!.x);
    expect(points.get("1")!.y).toBe(points.get("3")!.y);
  });

  it("does not mistake stars or cycles for paths", () => {
    const star: [string, string][] = [["c", "a"], ["c", "b"], ["c", "d"]];
    expect(pathOrder(["a", "b", "c", "d"], adjacency(["a", "b", "c", "d"], star))).toBeNull();
    const triangle: [string, string][] = [["a", "b"], ["b", "c"], ["a", "c"]];
    expect(pathOrder(["a", "b", "c"], adjacency(["a", "b", "c"], triangle))).toBeNull();
  });

  it("force layout is deterministic and keeps nodes in the frame", () => {
    const ids = ["a", "b", "c", "d"];
    const edges: [string, string][] = [["a", "b"], ["b", "c"], ["c", "d"], ["a", "d"]];
    const one = forceLayout(ids, edges, 760, 420);
    const two = forceLayout(ids, edges, 760, 420);
    for (const id of ids) {
      expect(one.get(id)).toEqual(two.get(id));
      const p = one.get(id)!;
      expect(p.x).toBeGreaterThanOrEqual(0);
      expect(p.x).toBeLessThanOrEqual(760);
      expect(p.y).toBeGreaterThanOrEqual(0);
      expect(p.y).toBeLessThanOrEqual(420);
      expect(Number.isFinite(p.x) && Number.isFinite(p.y)).toBe(true);
    }
    const distinct = new Set([...one.values()].map((p) => `${p.x.toFixed(3)}|${p.y.toFixed(3)}`));
    expect(distinct.size).toBe(ids.length);
  });
});
