import { describe, expect, it } from "vitest";

import { describeMove, ViewState } from "../src/state.js";
import { L3_STATE, stateWith } from "./helpers.js";

describe("ViewState", () => {
  it("accepts fresh server states and exposes their levels verbatim", () => {
    const view = new ViewState();
    expect(view.applyServer(L3_STATE)).toBe(true);
    expect(view.levels().get("2")).toEqual({ exact: "1", decimal: "1" });
  });

  it("discards stale responses by sequence number", () => {
    const view = new ViewState();
    view.applyServer(stateWith({ seq: 5 }));
    const stale = stateWith({ seq: 3 });
    stale.vertices[0].level = { exact: "9/10", decimal: "0.9" };
    expect(view.applyServer(stale)).toBe(false);
    expect(view.levels().get("1")).toEqual({ exact: "0", decimal: "0" });
    expect(view.applyServer(stateWith({ seq: 5 }))).toBe(true);
    expect(view.applyServer(stateWith({ seq: 6 }))).toBe(true);
  });

  it("knows the pipe set", () => {
    const view = new ViewState();
    view.applyServer(L3_STATE);
    expect(view.hasEdge("1", "2")).toBe(true);
    expect(view.hasEdge("2", "1")).toBe(true);
    expect(view.hasEdge("1", "3")).toBe(false);
  });

  it("classifies selections by connectivity", () => {
    const view = new ViewState();
    view.applyServer(L3_STATE);
    expect(view.isConnectedSelection(["1", "2"])).toBe(true);
    expect(view.isConnectedSelection(["1", "2", "3"])).toBe(true);
    expect(view.isConnectedSelection(["1", "3"])).toBe(false);
    expect(view.isConnectedSelection([])).toBe(false);
  });

  it("builds spanning edges for macro payloads", () => {
    const view = new ViewState();
    view.applyServer(L3_STATE);
    const edges = view.spanningEdges(["1", "2", "3"]);
    expect(edges).toHaveLength(2);
    const touched = new Set(edges.flat());
    expect(touched).toEqual(new Set(["1", "2", "3"]));
  });

  it("toggles selection", () => {
    const view = new ViewState();
    view.applyServer(L3_STATE);
    view.toggleSelected("1");
    view.toggleSelected("2");
    view.toggleSelected("1");
    expect([...view.selection]).toEqual(["2"]);
  });

  it("describes moves for the history panel", () => {
    expect(describeMove({ edge: ["1", "2"], mu: "1/2" }).label).toContain("⟨1,2⟩");
    const macro = describeMove({ macro: [["1", "2"], ["2", "3"]], mu: "1/2" });
    expect(macro.label).toBe("pool {1,2,3}");
  });
});
