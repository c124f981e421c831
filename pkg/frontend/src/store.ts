/** Single client-side store; every mutation flows through documented
 * endpoints or the event stream. */

import type { CaseSummary, Revision, StateSnapshot } from "./api.js";
import type { StreamEvent } from "./events.js";

export type Connection = "connecting" | "connected" | "reconnecting";

export interface WorkbenchState {
  snapshot: StateSnapshot | null;
  revisions: Revision[];
  cases: CaseSummary[];
  caseTotal: number;
  connection: Connection;
  notice: string | null;
  /** set when an event arrives that requires a re-fetch of REST state */
  dirty: boolean;
}

export function initialState(): WorkbenchState {
  return {
    snapshot: null,
    revisions: [],
    cases: [],
    caseTotal: 0,
    connection: "connecting",
    notice: null,
    dirty: false,
  };
}

export function pendingRevisions(state: WorkbenchState): Revision[] {
  return state.revisions
    .filter((rev) => rev.status === "pending")
    .sort((a, b) => b.created_at - a.created_at || (a.id < b.id ? 1 : -1));
}

/** Fold one stream event into the store; REST refreshes handle the rest. */
export function applyEvent(state: WorkbenchState, event: StreamEvent): WorkbenchState {
  switch (event.type) {
    case "window_closed":
    case "decision":
    case "revision_queued":
    case "revision_decided":
      return { ...state, dirty: true };
    default:
      return state;
  }
}

export function replaceRevision(state: WorkbenchState, revision: Revision): WorkbenchState {
  const revisions = state.revisions.map((rev) => (rev.id === revision.id ? revision : rev));
  if (!revisions.some((rev) => rev.id === revision.id)) revisions.push(revision);
  return { ...state, revisions };
}
