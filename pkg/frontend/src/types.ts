/** Wire types mirroring the service's JSON responses. */

export interface Diagnostic {
  severity: "error" | "warning";
  code: string;
  start: number;
  end: number;
  message: string;
}

export interface VizNode {
  key: number;
  label: string;
  name: string;
  shared: boolean;
}

export interface VizEdge {
  from: number;
  to: number;
  rel_type: string;
}

export interface VizGraph {
  nodes: VizNode[];
  edges: VizEdge[];
}

export interface ChatTurn {
  turn_id: number;
  question: string;
  query_text: string | null;
  diagnostics: Diagnostic[];
  columns: string[];
  rows: unknown[][];
  subgraph: VizGraph;
  attempts: number;
  error: string | null;
  timestamp: string;
}

export interface SchemaInfo {
  labels: string[];
  properties_per_label: Record<string, Record<string, string>>;
  rel_types: Record<string, { source: string; target: string }>;
}
