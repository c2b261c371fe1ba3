/** Graph tab: colored, draggable subgraph of the selected turn.
 *
 * The service decides sharedness; this module only projects it (emphasis,
 * centering). Rendering caps the focus at five datasets, first by row
 * order, and says so rather than silently dropping context.
 */

import { colorForLabel } from "./colors.js";
import { meanCenterDistance, runLayout, type LayoutNode, type Positions } from "./layout.js";
import type { UiState } from "./state.js";
import type { VizGraph, VizNode } from "./types.js";

export const DATASET_FOCUS_CAP = 5;

export interface FocusResult {
  graph: VizGraph;
  truncated: boolean;
  shownDatasets: number;
  totalDatasets: number;
}

/** Keep the first `cap` datasets (row order) plus their attribute nodes. */
export function focusSubgraph(graph: VizGraph, cap: number = DATASET_FOCUS_CAP): FocusResult {
  const datasets = graph.nodes.filter((n) => n.label === "Dataset");
  if (datasets.length <= cap) {
    return {
      graph,
      truncated: false,
      shownDatasets: datasets.length,
      totalDatasets: datasets.length,
    };
  }
  const kept = new Set(datasets.slice(0, cap).map((n) => n.key));
  const edges = graph.edges.filter((e) => kept.has(e.from));
  const reachable = new Set<number>(kept);
  for (const edge of edges) reachable.add(edge.to);
  const nodes = graph.nodes.filter((n) => reachable.has(n.key));
  return {
    graph: { nodes, edges },
    truncated: true,
    shownDatasets: cap,
    totalDatasets: datasets.length,
  };
}

export interface PlacedNode {
  node: VizNode;
  x: number;
  y: number;
  color: string;
  emphasized: boolean;
}

export interface RenderPlan {
  nodes: PlacedNode[];
  edges: Array<{ from: number; to: number; rel: string }>;
  notice: string | null;
  placeholder: string | null;
}

export function buildRenderPlan(
  graph: VizGraph,
  overrides: Map<number, { x: number; y: number }>,
  width: number,
  height: number,
): RenderPlan {
  if (graph.nodes.length === 0) {
    return { nodes: [], edges: [], notice: null, placeholder: "No subgraph for this turn yet." };
  }
  const focus = focusSubgraph(graph);
  const layoutNodes: LayoutNode[] = focus.graph.nodes.map((n) => {
    const pinned = overrides.get(n.key);
    return pinned ? { key: n.key, shared: n.shared, pinned } : { key: n.key, shared: n.shared };
  });
  const positions = runLayout(
    layoutNodes,
    focus.graph.edges.map((e) => ({ from: e.from, to: e.to })),
    width,
    height,
  );
  const placed = focus.graph.nodes.map((node) => {
    const p = positions.get(node.key)!;
    return {
      node,
      x: p.x,
      y: p.y,
      color: colorForLabel(node.label),
      emphasized: node.shared, // emphasis is exactly the API's shared flag
    };
  });
  return {
    nodes: placed,
    edges: focus.graph.edges.map((e) => ({ from: e.from, to: e.to, rel: e.rel_type })),
    notice: focus.truncated
      ? `focus limited to ${focus.shownDatasets} of ${focus.totalDatasets} datasets`
      : null,
    placeholder: null,
  };
}

export interface VizHandlers {
  onDrag: (key: number, x: number, y: number) => void;
}

const SVG_NS = "http://www.w3.org/2000/svg";

export function renderGraph(
  root: HTMLElement,
  state: UiState,
  graph: VizGraph | null,
  handlers: VizHandlers,
  width = 860,
  height = 560,
): void {
  root.replaceChildren();
  if (graph === null || graph.nodes.length === 0) {
    const placeholder = document.createElement("div");
    placeholder.className = "viz-placeholder";
    placeholder.textContent =
      graph === null ? "Ask a question to see its subgraph." : "This turn produced an empty subgraph.";
    root.appendChild(placeholder);
    return;
  }
  const plan = buildRenderPlan(graph, state.positionOverrides, width, height);
  if (plan.notice !== null) {
    const notice = document.createElement("div");
    notice.className = "focus-notice";
    notice.textContent = plan.notice;
    root.appendChild(notice);
  }

  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${width} ${height}`);
  svg.setAttribute("class", "viz-canvas");

  const byKey = new Map(plan.nodes.map((p) => [p.node.key, p]));
  for (const edge of plan.edges) {
    const a = byKey.get(edge.from);
    const b = byKey.get(edge.to);
    if (!a || !b) continue;
    const line = document.createElementNS(SVG_NS, "line");
    line.setAttribute("x1", String(a.x));
    line.setAttribute("y1", String(a.y));
    line.setAttribute("x2", String(b.x));
    line.setAttribute("y2", String(b.y));
    line.setAttribute("class", "viz-edge");
    const title = document.createElementNS(SVG_NS, "title");
    title.textContent = edge.rel;
    line.appendChild(title);
    svg.appendChild(line);
  }

  for (const placed of plan.nodes) {
    const group = document.createElementNS(SVG_NS, "g");
    group.setAttribute("class", "viz-node" + (placed.emphasized ? " shared" : ""));
    group.setAttribute("data-key", String(placed.node.key));
    group.setAttribute("data-label", placed.node.label);

    const circle = document.createElementNS(SVG_NS, "circle");
    circle.setAttribute("cx", String(placed.x));
    circle.setAttribute("cy", String(placed.y));
    circle.setAttribute("r", placed.emphasized ? "16" : "10");
    circle.setAttribute("fill", placed.color);
    if (placed.emphasized) {
      circle.setAttribute("stroke", "#222");
      circle.setAttribute("stroke-width", "3");
    }
    const tooltip = document.createElementNS(SVG_NS, "title");
    tooltip.textContent = `${placed.node.name} (${placed.node.label})`;
    circle.appendChild(tooltip);
    group.appendChild(circle);

    const text = document.createElementNS(SVG_NS, "text");
    text.setAttribute("x", String(placed.x + 14));
    text.setAttribute("y", String(placed.y + 4));
    text.textContent = placed.node.name;
    group.appendChild(text);

    attachDrag(group, circle, text, placed.node.key, handlers);
    svg.appendChild(group);
  }
  root.appendChild(svg);
}

function attachDrag(
  group: SVGGElement,
  circle: SVGCircleElement,
  text: SVGTextElement,
  key: number,
  handlers: VizHandlers,
): void {
  let dragging = false;

  const svgPoint = (event: PointerEvent): { x: number; y: number } => {
    const svg = group.ownerSVGElement;
    if (!svg) return { x: event.clientX, y: event.clientY };
    const rect = svg.getBoundingClientRect();
    const scaleX = rect.width > 0 ? 860 / rect.width : 1;
    const scaleY = rect.height > 0 ? 560 / rect.height : 1;
    return { x: (event.clientX - rect.left) * scaleX, y: (event.clientY - rect.top) * scaleY };
  };

  group.addEventListener("pointerdown", (event) => {
    dragging = true;
    group.setPointerCapture?.((event as PointerEvent).pointerId);
  });
  group.addEventListener("pointermove", (event) => {
    if (!dragging) return;
    const { x, y } = svgPoint(event as PointerEvent);
    circle.setAttribute("cx", String(x));
    circle.setAttribute("cy", String(y));
    text.setAttribute("x", String(x + 14));
    text.setAttribute("y", String(y + 4));
  });
  group.addEventListener("pointerup", (event) => {
    if (!dragging) return;
    dragging = false;
    const { x, y } = svgPoint(event as PointerEvent);
    handlers.onDrag(key, x, y); // persists across tab switches via the store
  });
}

export function renderLegend(root: HTMLElement, labels: string[]): void {
  root.replaceChildren();
  for (const label of labels) {
    const entry = document.createElement("span");
    entry.className = "legend-entry";
    const swatch = document.createElement("span");
    swatch.className = "legend-swatch";
    swatch.style.backgroundColor = colorForLabel(label);
    entry.appendChild(swatch);
    entry.appendChild(document.createTextNode(label));
    root.appendChild(entry);
  }
}

export { meanCenterDistance };
