import type { BreakdownRow, Evaluation, Revision } from "../src/api.js";

export function breakdownRows(): BreakdownRow[] {
  return [
    { attribute: "bam", function: "equality", query_value: "MAM", case_value: "MAM", local: 1, weight: 40 },
    { attribute: "throughput", function: "linear", query_value: 0.98, case_value: 1.0, local: 0.98, weight: 30 },
    { attribute: "blocking", function: "linear", query_value: 0.02, case_value: 0.0, local: 0.98, weight: 30 },
    { attribute: "devolution", function: "linear", query_value: 0, case_value: 0, local: 1, weight: 20 },
    { attribute: "preemption", function: "linear", query_value: 0, case_value: 0, local: 1, weight: 20 },
  ];
}

export function evaluation(score = 0.9): Evaluation {
  return { score, violations: [], warnings: [] };
}

export function revision(overrides: Partial<Revision> = {}): Revision {
  return {
    id: "rev-0001",
    kind: "retention",
    status: "pending",
    created_at: 600,
    trigger: "review",
    problem: { ca: { bam: "MAM" }, m: { blocking: 0.02 } },
    actions: [{ name: "switch_bam", parameters: { target: "ATCS" } }],
    provenance: {
      source_case_id: "premise-mam-to-atcs",
      similarity: 0.9914,
      breakdown: breakdownRows(),
    },
    before: evaluation(0.9),
    after: evaluation(0.97),
    outcome: "unvalidated",
    verdict: null,
    note: "",
    ...overrides,
  };
}
