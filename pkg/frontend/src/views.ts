/** Pure HTML renderers for the three panes. All figures come from the
 * service; the only arithmetic here is display formatting. */

import type { CaseSummary, Revision, StateSnapshot } from "./api.js";
import {
  escapeHtml,
  formatClock,
  formatRatio,
  formatScore,
  formatSimilarity,
  formatValue,
  totalWeight,
} from "./format.js";

export function renderMetricsStrip(snapshot: StateSnapshot | null, connection: string): string {
  if (!snapshot) {
    return `<div class="metrics" data-connection="${escapeHtml(connection)}">waiting for service…</div>`;
  }
  const w = snapshot.window;
  const cells = [
    ["model", snapshot.model],
    ["clock", formatClock(snapshot.clock)],
    ["mode", snapshot.mode],
    ["score", formatScore(snapshot.score)],
    ["utilization", formatRatio(w?.utilization)],
    ["throughput", formatRatio(w?.throughput)],
    ["blocking", formatRatio(w?.blocking)],
    ["cases", String(snapshot.case_count)],
    ["status", snapshot.paused ? "paused" : snapshot.done ? "done" : "running"],
  ];
  const body = cells
    .map(([label, value]) => `<div class="cell"><span class="label">${label}</span><span class="value">${escapeHtml(String(value))}</span></div>`)
    .join("");
  return `<div class="metrics" data-connection="${escapeHtml(connection)}">${body}</div>`;
}

export function renderBreakdown(revision: Revision): string {
  const { breakdown, similarity } = revision.provenance;
  if (!breakdown.length) {
    return `<p class="empty">no source case — operator decision requested</p>`;
  }
  const rows = breakdown
    .map(
      (row) => `<tr>
        <td>${escapeHtml(row.attribute)}</td>
        <td>${escapeHtml(row.function)}</td>
        <td>${escapeHtml(formatValue(row.query_value))}</td>
        <td>${escapeHtml(formatValue(row.case_value))}</td>
        <td class="num">${formatSimilarity(row.local)}</td>
        <td class="num">${row.weight}</td>
      </tr>`,
    )
    .join("");
  return `<table class="breakdown">
    <thead><tr><th>attribute</th><th>function</th><th>query</th><th>case</th><th>local</th><th>weight</th></tr></thead>
    <tbody>${rows}</tbody>
    <tfoot><tr>
      <td colspan="4">global similarity</td>
      <td class="num" data-role="global-similarity">${formatSimilarity(similarity)}</td>
      <td class="num" data-role="total-weight">${totalWeight(breakdown)}</td>
    </tr></tfoot>
  </table>`;
}

function renderVerdictForm(revision: Revision, currentModel: string): string {
  const models = ["MAM", "RDM", "ATCS"].filter((m) => m !== currentModel);
  const options = models.map((m) => `<option value="${m}">${m}</option>`).join("");
  return `<form class="verdict" data-revision="${escapeHtml(revision.id)}">
    <select name="target" aria-label="adjust target">${options}</select>
    <input name="note" type="text" placeholder="note (optional)" />
    <button type="submit" name="verdict" value="approve">approve</button>
    <button type="submit" name="verdict" value="adjust">adjust</button>
    <button type="submit" name="verdict" value="reject">reject</button>
  </form>`;
}

export function renderRevisionCard(revision: Revision, currentModel: string): string {
  const action = revision.actions
    .map((a) => `${a.name}(${formatValue(a.parameters["target"])})`)
    .join(", ") || "—";
  const warnings = revision.before.warnings
    .map((w) => `<li>${escapeHtml(w)}</li>`)
    .join("");
  return `<article class="revision" data-id="${escapeHtml(revision.id)}">
    <header>
      <strong>${escapeHtml(revision.id)}</strong>
      <span class="kind">${revision.kind}</span>
      <span class="trigger">${escapeHtml(revision.trigger)}</span>
      <span class="clock">t=${formatClock(revision.created_at)}</span>
    </header>
    <div class="scores">
      before ${formatScore(revision.before.score)}
      ${revision.after ? ` → after ${formatScore(revision.after.score)}` : ""}
    </div>
    <div class="action">candidate: ${escapeHtml(action)}</div>
    ${warnings ? `<ul class="warnings">${warnings}</ul>` : ""}
    ${renderBreakdown(revision)}
    ${renderVerdictForm(revision, currentModel)}
  </article>`;
}

export function renderQueue(pending: Revision[], currentModel: string): string {
  if (!pending.length) {
    return `<p class="empty" data-role="queue-empty">no revisions waiting for review</p>`;
  }
  return pending.map((rev) => renderRevisionCard(rev, currentModel)).join("");
}

export function renderCases(cases: CaseSummary[], total: number): string {
  if (!cases.length) return `<p class="empty">case database is empty</p>`;
  const rows = cases
    .map(
      (c) => `<tr>
        <td>${escapeHtml(c.id)}</td>
        <td class="outcome-${escapeHtml(c.outcome)}">${escapeHtml(c.outcome)}</td>
        <td class="num">${c.confidence.toFixed(2)}</td>
        <td class="num">${formatClock(c.created_at)}</td>
        <td>${c.actions.map((a) => escapeHtml(formatValue(a.parameters["target"]))).join(", ")}</td>
      </tr>`,
    )
    .join("");
  return `<table class="cases">
    <thead><tr><th>id</th><th>outcome</th><th>confidence</th><th>created</th><th>target</th></tr></thead>
    <tbody>${rows}</tbody>
    <tfoot><tr><td colspan="5">${total} case(s)</td></tr></tfoot>
  </table>`;
}

export function renderNotice(notice: string | null): string {
  return notice ? `<div class="notice">${escapeHtml(notice)}</div>` : "";
}
