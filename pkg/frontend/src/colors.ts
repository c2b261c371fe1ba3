/** One fixed color per node label; a pure function so colors never drift
 * between turns, tabs, or sessions. Unknown labels hash onto a fallback
 * palette deterministically. */

const LABEL_COLORS: Record<string, string> = {
  Dataset: "#1f77b4",
  Publication: "#9467bd",
  Owner: "#2ca02c",
  Funder: "#d62728",
  Series: "#8c564b",
  Location: "#e377c2",
  Term: "#ff7f0e",
};

const FALLBACK = ["#17becf", "#bcbd22", "#7f7f7f", "#aec7e8", "#98df8a"];

export function colorForLabel(label: string): string {
  const fixed = LABEL_COLORS[label];
  if (fixed !== undefined) return fixed;
  let hash = 0;
  for (let i = 0; i < label.length; i++) {
    hash = (hash * 31 + label.charCodeAt(i)) >>> 0;
  }
  return FALLBACK[hash % FALLBACK.length] as string;
}

export function legendEntries(labels: string[]): Array<{ label: string; color: string }> {
  return labels.map((label) => ({ label, color: colorForLabel(label) }));
}
