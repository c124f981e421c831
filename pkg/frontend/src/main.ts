/** Workbench bootstrap: REST snapshots plus the event stream drive one
 * client-side store; verdicts are never applied optimistically. */

import { ApiError, Client, type Action, type Verdict } from "./api.js";
import { EventStream } from "./events.js";
import {
  applyEvent,
  initialState,
  pendingRevisions,
  type WorkbenchState,
} from "./store.js";
import { renderCases, renderMetricsStrip, renderNotice, renderQueue } from "./views.js";

const client = new Client("");
let state: WorkbenchState = initialState();

function render(): void {
  const metrics = document.getElementById("metrics");
  const queue = document.getElementById("queue");
  const cases = document.getElementById("cases");
  const notice = document.getElementById("notice");
  if (!metrics || !queue || !cases || !notice) return;
  metrics.innerHTML = renderMetricsStrip(state.snapshot, state.connection);
  queue.innerHTML = renderQueue(pendingRevisions(state), state.snapshot?.model ?? "");
  cases.innerHTML = renderCases(state.cases, state.caseTotal);
  notice.innerHTML = renderNotice(state.notice);
}

async function refresh(): Promise<void> {
  const [snapshot, revisions, casesPage] = await Promise.all([
    client.state(),
    client.revisions(),
    client.cases({ limit: 100 }),
  ]);
  state = {
    ...state,
    snapshot,
    revisions,
    cases: casesPage.cases,
    caseTotal: casesPage.total,
    dirty: false,
  };
  render();
}

async function submitVerdict(revisionId: string, verdict: Verdict, target: string, note: string): Promise<void> {
  let actions: Action[] | undefined;
  if (verdict === "adjust") {
    if (!target || target === state.snapshot?.model) {
      state = { ...state, notice: "adjust requires a target model different from the current one" };
      render();
      return;
    }
    actions = [{ name: "switch_bam", parameters: { target } }];
  }
  try {
    await client.decide(revisionId, verdict, actions, note);
    state = { ...state, notice: `${revisionId}: ${verdict} accepted` };
  } catch (error) {
    if (error instanceof ApiError && error.status === 409) {
      state = { ...state, notice: `${revisionId}: already decided (${error.message})` };
    } else {
      state = { ...state, notice: `${revisionId}: ${String(error)}` };
    }
  }
  await refresh();
}

function wireForms(): void {
  document.addEventListener("submit", (event) => {
    const form = event.target as HTMLFormElement;
    if (!form.classList.contains("verdict")) return;
    event.preventDefault();
    const revisionId = form.dataset["revision"];
    if (!revisionId) return;
    const submitter = (event as SubmitEvent).submitter as HTMLButtonElement | null;
    const verdict = (submitter?.value ?? "approve") as Verdict;
    const target = (form.elements.namedItem("target") as HTMLSelectElement | null)?.value ?? "";
    const note = (form.elements.namedItem("note") as HTMLInputElement | null)?.value ?? "";
    void submitVerdict(revisionId, verdict, target, note);
  });
}

function startStream(): void {
  const stream = new EventStream("", {
    onEvent: (event) => {
      state = applyEvent(state, event);
      if (state.dirty) void refresh();
    },
    onStatus: (status) => {
      state = { ...state, connection: status };
      render();
    },
  });
  void stream.run();
}

async function boot(): Promise<void> {
  wireForms();
  startStream();
  await refresh();
  // done/paused transitions can race the stream; a slow poll keeps the
  // strip honest even if the connection drops
  setInterval(() => void refresh(), 5000);
}

if (typeof document !== "undefined" && document.getElementById("metrics")) {
  void boot();
}
