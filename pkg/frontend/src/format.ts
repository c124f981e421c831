/** Display formatting only — no similarity or evaluation math happens in
 * the workbench; every figure shown originates from the service. */

export function formatSimilarity(value: number | null | undefined): string {
  return value == null ? "—" : value.toFixed(4);
}

export function formatScore(value: number | null | undefined): string {
  return value == null ? "—" : value.toFixed(4);
}

export function formatRatio(value: number | null | undefined): string {
  return value == null ? "—" : `${(value * 100).toFixed(1)}%`;
}

export function formatClock(value: number): string {
  return value.toFixed(0);
}

export function formatValue(value: unknown): string {
  if (value == null) return "—";
  if (typeof value === "number") {
    return Number.isInteger(value) ? String(value) : value.toFixed(4);
  }
  return String(value);
}

/** Sum of breakdown weights, shown in the table footer. */
export function totalWeight(rows: { weight: number }[]): number {
  return rows.reduce((sum, row) => sum + row.weight, 0);
}

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}
