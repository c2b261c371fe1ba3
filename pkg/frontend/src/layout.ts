/** Deterministic force-directed layout.
 *
 * Plain springs-and-repulsion with one twist: nodes flagged shared get a
 * strong centripetal pull, so attributes common to several datasets settle
 * at the middle of the picture. Seeding is angular (no randomness), which
 * keeps layouts reproducible for identical subgraphs.
 */

export interface LayoutNode {
  key: number;
  shared: boolean;
  pinned?: { x: number; y: number };
}

export interface LayoutEdge {
  from: number;
  to: number;
}

export type Positions = Map<number, { x: number; y: number }>;

export function seedPositions(nodes: LayoutNode[], width: number, height: number): Positions {
  const cx = width / 2;
  const cy = height / 2;
  const outer = Math.min(width, height) * 0.38;
  const inner = outer * 0.45;
  const positions: Positions = new Map();
  const shared = nodes.filter((n) => n.shared);
  const rest = nodes.filter((n) => !n.shared);
  shared.forEach((node, i) => {
    const angle = (2 * Math.PI * i) / Math.max(1, shared.length);
    positions.set(node.key, {
      x: cx + Math.cos(angle) * inner * 0.25,
      y: cy + Math.sin(angle) * inner * 0.25,
    });
  });
  rest.forEach((node, i) => {
    const angle = (2 * Math.PI * i) / Math.max(1, rest.length) + 0.5;
    positions.set(node.key, {
      x: cx + Math.cos(angle) * outer,
      y: cy + Math.sin(angle) * outer,
    });
  });
  return positions;
}

export function runLayout(
  nodes: LayoutNode[],
  edges: LayoutEdge[],
  width: number,
  height: number,
  iterations = 150,
): Positions {
  const positions = seedPositions(nodes, width, height);
  const cx = width / 2;
  const cy = height / 2;
  const area = width * height;
  const k = Math.sqrt(area / Math.max(1, nodes.length)) * 0.6;

  for (let step = 0; step < iterations; step++) {
    const cooling = 1 - step / iterations;
    const force: Positions = new Map(nodes.map((n) => [n.key, { x: 0, y: 0 }]));

    for (let i = 0; i < nodes.length; i++) {
      for (let j = i + 1; j < nodes.length; j++) {
        const a = nodes[i]!;
        const b = nodes[j]!;
        const pa = positions.get(a.key)!;
        const pb = positions.get(b.key)!;
        let dx = pa.x - pb.x;
        let dy = pa.y - pb.y;
        let dist = Math.hypot(dx, dy);
        if (dist < 1e-3) {
          // deterministic tie-break for coincident nodes
          dx = 0.01 * (i - j);
          dy = 0.013;
          dist = Math.hypot(dx, dy);
        }
        const repulse = (k * k) / dist;
        force.get(a.key)!.x += (dx / dist) * repulse;
        force.get(a.key)!.y += (dy / dist) * repulse;
        force.get(b.key)!.x -= (dx / dist) * repulse;
        force.get(b.key)!.y -= (dy / dist) * repulse;
      }
    }

    for (const edge of edges) {
      const pa = positions.get(edge.from);
      const pb = positions.get(edge.to);
      if (!pa || !pb) continue;
      const dx = pa.x - pb.x;
      const dy = pa.y - pb.y;
      const dist = Math.max(1e-3, Math.hypot(dx, dy));
      const attract = (dist * dist) / k;
      force.get(edge.from)!.x -= (dx / dist) * attract;
      force.get(edge.from)!.y -= (dy / dist) * attract;
      force.get(edge.to)!.x += (dx / dist) * attract;
      force.get(edge.to)!.y += (dy / dist) * attract;
    }

    for (const node of nodes) {
      const p = positions.get(node.key)!;
      // weak global centering; strong centripetal pull when shared
      const pull = node.shared ? 0.22 : 0.02;
      force.get(node.key)!.x += (cx - p.x) * pull;
      force.get(node.key)!.y += (cy - p.y) * pull;
    }

    const maxStep = k * 0.5 * cooling + 1;
    for (const node of nodes) {
      if (node.pinned) {
        positions.set(node.key, { ...node.pinned });
        continue;
      }
      const f = force.get(node.key)!;
      const mag = Math.max(1e-6, Math.hypot(f.x, f.y));
      const clamped = Math.min(mag, maxStep);
      const p = positions.get(node.key)!;
      p.x += (f.x / mag) * clamped;
      p.y += (f.y / mag) * clamped;
      p.x = Math.min(width - 20, Math.max(20, p.x));
      p.y = Math.min(height - 20, Math.max(20, p.y));
    }
  }
  return positions;
}

/** Mean distance from the canvas center, for tests and tuning. */
export function meanCenterDistance(
  positions: Positions,
  keys: number[],
  width: number,
  height: number,
): number {
  if (keys.length === 0) return 0;
  const cx = width / 2;
  const cy = height / 2;
  let total = 0;
  for (const key of keys) {
    const p = positions.get(key)!;
    total += Math.hypot(p.x - cx, p.y - cy);
  }
  return total / keys.length;
}
