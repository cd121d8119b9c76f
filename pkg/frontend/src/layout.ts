// Layout is cosmetic: a horizontal line when the graph is a path (the main
// solved class), otherwise a small deterministic force simulation.

export interface Point {
  x: number;
  y: number;
}

export function pathOrder(ids: string[], adjacency: Map<string, string[]>): string[] | null {
  if (ids.length === 1) return [...ids];
  const degrees = ids.map((id) => (adjacency.get(id) ?? []).length);
  const ends = ids.filter((id) => (adjacency.get(id) ?? []).length === 1);
  if (ends.length !== 2 || degrees.some((d) => d > 2)) return null;
  const order = [ends.sort()[0]];
  let prev: string | null = null;
  while (order.length < ids.length) {
    const cur = order[order.length - 1];
    const next = (adjacency.get(cur) ?? []).find((w) => w !== prev);
    if (next === undefined) return null;
    prev = cur;
    order.push(next);
  }
  return order.length === ids.length ? order : null;
}

export function lineLayout(order: string[], width: number, height: number): Map<string, Point> {
  const out = new Map<string, Point>();
  const margin = 60;
  const step = order.length > 1 ? (width - 2 * margin) / (order.length - 1) : 0;
  order.forEach((id, i) => out.set(id, { x: margin + i * step, y: height / 2 }));
  return out;
}

export function forceLayout(
  ids: string[],
  edges: [string, string][],
  width: number,
  height: number,
  iterations = 250,
): Map<string, Point> {
  // deterministic start: a ring in id order
  const pos = new Map<string, Point>();
  ids.forEach((id, i) => {
    const angle = (2 * Math.PI * i) / ids.length;
    pos.set(id, {
      x: width / 2 + 0.35 * width * Math.cos(angle),
      y: height / 2 + 0.35 * height * Math.sin(angle),
    });
  });
  const target = Math.sqrt((width * height) / (ids.length + 1)) * 0.7;
  for (let it = 0; it < iterations; it++) {
    const disp = new Map<string, Point>(ids.map((id) => [id, { x: 0, y: 0 }]));
    for (let i = 0; i < ids.length; i++) {
      for (let j = i + 1; j < ids.length; j++) {
        const a = pos.get(ids[i])!;
        const b = pos.get(ids[j])!;
        let dx = a.x - b.x;
        let dy = a.y - b.y;
        const d2 = Math.max(dx * dx + dy * dy, 1e-6);
        const d = Math.sqrt(d2);
        const force = (target * target) / d2;
        dx = (dx / d) * force * 8;
        dy = (dy / d) * force * 8;
        const da = disp.get(ids[i])!;
        const db = disp.get(ids[j])!;
        da.x += dx;
        da.y += dy;
        db.x -= dx;
        db.y -= dy;
      }
    }
    for (const [a, b] of edges) {
      const pa = pos.get(a)!;
      const pb = pos.get(b)!;
      const dx = pa.x - pb.x;
      const dy = pa.y - pb.y;
      const d = Math.max(Math.sqrt(dx * dx + dy * dy), 1e-3);
      const pull = (d - target) / d;
      const da = disp.get(a)!;
      const db = disp.get(b)!;
      da.x -= dx * pull * 0.5;
      da.y -= dy * pull * 0.5;
      db.x += dx * pull * 0.5;
      db.y += dy * pull * 0.5;
    }
    const cool = 1 - it / iterations;
    for (const id of ids) {
      const p = pos.get(id)!;
      const d = disp.get(id)!;
      p.x = Math.min(width - 40, Math.max(40, p.x + d.x * 0.05 * cool));
      p.y = Math.min(height - 40, Math.max(40, p.y + d.y * 0.05 * cool));
    }
  }
  return pos;
}

export function computeLayout(
  ids: string[],
  edges: [string, string][],
  adjacency: Map<string, string[]>,
  width: number,
  height: number,
): { points: Map<string, Point>; kind: "line" | "force" } {
  const order = pathOrder(ids, adjacency);
  if (order) {
    return { points: lineLayout(order, width, height), kind: "line" };
  }
  return { points: forceLayout(ids, edges, width, height), kind: "force" };
}
