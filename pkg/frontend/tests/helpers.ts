import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import type { ChatTurn, VizGraph } from "../src/types.js";

/** Load the real page body so tests exercise the shipped markup. */
export function mountPage(): void {
  const here = dirname(fileURLToPath(import.meta.url));
  const html = readFileSync(join(here, "..", "index.html"), "utf-8");
  const body = html.match(/<body>([\s\S]*)<\/body>/)?.[1] ?? "";
  document.body.innerHTML = body.replace(/<script[\s\S]*?<\/script>/g, "");
}

export function makeTurn(overrides: Partial<ChatTurn> = {}): ChatTurn {
  return {
    turn_id: 1,
    question: "What are the most popular datasets about mental health?",
    query_text:
      "MATCH (a:Dataset)-[:HAS_TERM]->(t:Term) WHERE t.name CONTAINS 'mental health' " +
      "RETURN a.name + ' LINK: ' + a.url AS response ORDER BY a.dataUserCount DESC LIMIT 3",
    diagnostics: [],
    columns: ["response"],
    rows: [["American Health Values Survey LINK: https://doi.org/10.3886/E100001"]],
    subgraph: sharedOwnerGraph(),
    attempts: 1,
    error: null,
    timestamp: "2024-01-01T00:00:00+00:00",
    ...overrides,
  };
}

/** Two datasets pointing at one owner; the owner is flagged shared. */
export function sharedOwnerGraph(): VizGraph {
  return {
    nodes: [
      { key: 0, label: "Dataset", name: "American Health Values Survey", shared: false },
      { key: 1, label: "Dataset", name: "Massachusetts Health Reform Survey", shared: false },
      { key: 2, label: "Owner", name: "HMCA", shared: true },
    ],
    edges: [
      { from: 0, to: 2, rel_type: "HAS_OWNER" },
      { from: 1, to: 2, rel_type: "HAS_OWNER" },
    ],
  };
}

export function manyDatasetGraph(count: number): VizGraph {
  const nodes = [];
  const edges = [];
  for (let i = 0; i < count; i++) {
    nodes.push({ key: i, label: "Dataset", name: `Study ${i}`, shared: false });
    edges.push({ from: i, to: 100, rel_type: "HAS_TERM" });
  }
  nodes.push({ key: 100, label: "Term", name: "aging", shared: count >= 2 });
  return { nodes, edges };
}

export interface StubCall {
  url: string;
  init?: RequestInit;
}

/** fetch stub returning queued responses; records every call. */
export function stubFetch(
  plan: Array<{ status?: number; body?: unknown; fail?: boolean }>,
): { fetcher: (url: string, init?: RequestInit) => Promise<Response>; calls: StubCall[] } {
  const calls: StubCall[] = [];
  const queue = [...plan];
  return {
    calls,
    fetcher: async (url, init) => {
      calls.push({ url, init });
      const next = queue.length > 1 ? queue.shift()! : queue[0];
      if (!next || next.fail) {
        throw new TypeError("fetch failed");
      }
      const status = next.status ?? 200;
      return new Response(JSON.stringify(next.body ?? {}), {
        status,
        headers: { "Content-Type": "application/json" },
      });
    },
  };
}
