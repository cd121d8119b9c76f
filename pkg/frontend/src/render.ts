// DOM rendering: barrels as outline+fill bars scaled by level, exact
// rational labels shown verbatim with the decimal mirror as tooltip. All
// displayed numbers are the service's strings, untouched.

import type { SessionState } from "./api.js";
import { computeLayout, Point } from "./layout.js";
import type { ViewState } from "./state.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const WIDTH = 760;
const HEIGHT = 420;
const BARREL_W = 34;
const BARREL_H = 64;

export interface RenderCallbacks {
  onEdgeClick?: (a: string, b: string) => void;
  onVertexClick?: (id: string) => void;
}

function barrelFillHeight(levelDecimal: string, capacityDecimal: string): number {
  // display formatting only; exact values never enter any computation
  const level = parseFloat(levelDecimal);
  const capacity = parseFloat(capacityDecimal) || 1;
  const ratio = Math.min(Math.max(level / capacity, 0), 1);
  return ratio * (BARREL_H - 4);
}

export function render(container: HTMLElement, view: ViewState, callbacks: RenderCallbacks = {}): void {
  container.textContent = "";
  const state = view.state;
  if (!state) {
    const empty = document.createElement("p");
    empty.className = "empty";
    empty.textContent = "no session";
    container.appendChild(empty);
    return;
  }
  container.appendChild(renderStatus(view, state));
  container.appendChild(renderSvg(view, state, callbacks));
  container.appendChild(renderHistory(view));
}

function renderStatus(view: ViewState, state: SessionState): HTMLElement {
  const box = document.createElement("div");
  box.className = "status";
  const level = document.createElement("span");
  level.className = "target-level";
  level.textContent = `level at ${state.target}: ${state.level_at_target.exact}`;
  level.title = state.level_at_target.decimal;
  box.appendChild(level);
  const hints = state.hints;
  const hintSpan = document.createElement("span");
  hintSpan.className = "hints";
  const kappaText = hints.kappa ? `, peak ${hints.kappa.exact} (${hints.kappa_solver})` : "";
  const progress = hints.progress_ratio ? `, progress ${hints.progress_ratio.exact}` : "";
  hintSpan.textContent =
    `best animal {${hints.gla.set.join(",")}} at ${hints.gla.value.exact}` +
    `, bound ${hints.upper_bound.exact}${kappaText}${progress}`;
  box.appendChild(hintSpan);
  if (view.pending) {
    const pending = document.createElement("span");
    pending.className = "pending";
    pending.textContent = "applying move...";
    box.appendChild(pending);
  }
  if (view.error) {
    const err = document.createElement("div");
    err.className = "error";
    err.setAttribute("role", "alert");
    err.textContent = view.error;
    box.appendChild(err);
  }
  if (view.hint && view.hint.action === "move" && view.hint.move) {
    const h = document.createElement("div");
    h.className = "suggestion";
    const mv = view.hint.move;
    const what = mv.edge ? `open ⟨${mv.edge[0]},${mv.edge[1]}⟩` : "pool the highlighted set";
    h.textContent = `hint: ${what} (expected ${view.hint.expected_score?.exact ?? "?"})`;
    box.appendChild(h);
  } else if (view.hint && view.hint.action === "stop") {
    const h = document.createElement("div");
    h.className = "suggestion";
    h.textContent = `hint: stop (${view.hint.reason ?? "no improvement available"})`;
    box.appendChild(h);
  }
  return box;
}

function hintedVertices(view: ViewState): Set<string> {
  const ids = new Set<string>();
  const move = view.hint?.move;
  if (!move) return ids;
  for (const [a, b] of move.macro ?? (move.edge ? [move.edge] : [])) {
    ids.add(a);
    ids.add(b);
  }
  return ids;
}

function renderSvg(view: ViewState, state: SessionState, callbacks: RenderCallbacks): SVGSVGElement {
  const ids = state.vertices.map((v) => v.id);
  const { points, kind } = computeLayout(ids, state.edges, view.adjacency(), WIDTH, HEIGHT);
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${WIDTH} ${HEIGHT}`);
  svg.setAttribute("width", String(WIDTH));
  svg.setAttribute("height", String(HEIGHT));
  svg.dataset.layout = kind;
  if (view.pending) svg.classList.add("pending");

  const glaSet = new Set(state.hints.gla.set);
  const hinted = hintedVertices(view);
  const hintEdge = view.hint?.move?.edge;

  for (const [a, b] of state.edges) {
    const pa = points.get(a)!;
    const pb = points.get(b)!;
    const line = document.createElementNS(SVG_NS, "line");
    line.setAttribute("x1", String(pa.x));
    line.setAttribute("y1", String(pa.y));
    line.setAttribute("x2", String(pb.x));
    line.setAttribute("y2", String(pb.y));
    line.classList.add("pipe");
    line.dataset.edge = `${a}|${b}`;
    if (hintEdge && ((hintEdge[0] === a && hintEdge[1] === b) || (hintEdge[0] === b && hintEdge[1] === a))) {
      line.classList.add("hint-pulse");
    }
    line.addEventListener("click", () => {
      if (!view.pending) callbacks.onEdgeClick?.(a, b);
    });
    svg.appendChild(line);
  }

  for (const vertex of state.vertices) {
    const p = points.get(vertex.id)!;
    svg.appendChild(renderBarrel(vertex.id, vertex.level, state, p, view, glaSet, hinted, callbacks));
  }
  return svg;
}

function renderBarrel(
  id: string,
  level: { exact: string; decimal: string },
  state: SessionState,
  p: Point,
  view: ViewState,
  glaSet: Set<string>,
  hinted: Set<string>,
  callbacks: RenderCallbacks,
): SVGGElement {
  const group = document.createElementNS(SVG_NS, "g");
  group.classList.add("barrel");
  group.dataset.vertex = id;
  if (id === state.target) group.classList.add("target");
  if (glaSet.has(id)) group.classList.add("gla");
  if (hinted.has(id)) group.classList.add("hint-pulse");
  if (view.selection.has(id)) group.classList.add("selected");

  const outline = document.createElementNS(SVG_NS, "rect");
  outline.setAttribute("x", String(p.x - BARREL_W / 2));
  outline.setAttribute("y", String(p.y - BARREL_H / 2));
  outline.setAttribute("width", String(BARREL_W));
  outline.setAttribute("height", String(BARREL_H));
  outline.classList.add("outline");
  group.appendChild(outline);

  const fillHeight = barrelFillHeight(level.decimal, state.capacity.decimal);
  const fill = document.createElementNS(SVG_NS, "rect");
  fill.setAttribute("x", String(p.x - BARREL_W / 2 + 2));
  fill.setAttribute("y", String(p.y + BARREL_H / 2 - 2 - fillHeight));
  fill.setAttribute("width", String(BARREL_W - 4));
  fill.setAttribute("height", String(fillHeight));
  fill.classList.add("fill");
  group.appendChild(fill);

  const label = document.createElementNS(SVG_NS, "text");
  label.setAttribute("x", String(p.x));
  label.setAttribute("y", String(p.y + BARREL_H / 2 + 16));
  label.setAttribute("text-anchor", "middle");
  label.classList.add("level-label");
  label.textContent = level.exact; // verbatim rational string
  const tooltip = document.createElementNS(SVG_NS, "title");
  tooltip.textContent = level.decimal;
  label.appendChild(tooltip);
  group.appendChild(label);

  const name = document.createElementNS(SVG_NS, "text");
  name.setAttribute("x", String(p.x));
  name.setAttribute("y", String(p.y - BARREL_H / 2 - 6));
  name.setAttribute("text-anchor", "middle");
  name.classList.add("vertex-name");
  name.textContent = id;
  group.appendChild(name);

  group.addEventListener("click", () => {
    if (!view.pending) callbacks.onVertexClick?.(id);
  });
  return group;
}

function renderHistory(view: ViewState): HTMLElement {
  const panel = document.createElement("div");
  panel.className = "history";
  const title = document.createElement("h3");
  title.textContent = `history (${view.history.length})`;
  panel.appendChild(title);
  const list = document.createElement("ol");
  for (const entry of view.history) {
    const item = document.createElement("li");
    item.textContent = `${entry.label} at μ=${entry.mu}`;
    list.appendChild(item);
  }
  panel.appendChild(list);
  return panel;
}
