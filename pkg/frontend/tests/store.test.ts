import { describe, expect, it } from "vitest";

import { applyEvent, initialState, pendingRevisions, replaceRevision } from "../src/store.js";
import { revision } from "./fixtures.js";

describe("pendingRevisions", () => {
  it("filters decided revisions and sorts newest first", () => {
    const state = {
      ...initialState(),
      revisions: [
        revision({ id: "rev-0001", created_at: 600 }),
        revision({ id: "rev-0002", created_at: 900 }),
        revision({ id: "rev-0003", status: "decided" as const }),
      ],
    };
    expect(pendingRevisions(state).map((r) => r.id)).toEqual(["rev-0002", "rev-0001"]);
  });
});

describe("applyEvent", () => {
  it("marks the store dirty for service-state events", () => {
    const state = initialState();
    for (const type of ["window_closed", "decision", "revision_queued", "revision_decided"]) {
      expect(applyEvent(state, { seq: 1, type, data: {} }).dirty).toBe(true);
    }
  });

  it("ignores unknown event types", () => {
    expect(applyEvent(initialState(), { seq: 1, type: "mystery", data: {} }).dirty).toBe(false);
  });
});

describe("replaceRevision", () => {
  it("substitutes a decided revision in place", () => {
    const state = { ...initialState(), revisions: [revision()] };
    const decided = revision({ status: "decided" as const, verdict: "approve" });
    const next = replaceRevision(state, decided);
    expect(next.revisions).toHaveLength(1);
    expect(next.revisions[0]!.status).toBe("decided");
  });

  it("appends unseen revisions", () => {
    const next = replaceRevision(initialState(), revision());
    expect(next.revisions).toHaveLength(1);
  });
});
