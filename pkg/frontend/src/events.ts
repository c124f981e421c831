/** NDJSON event stream reader with automatic reconnect.
 *
 * The service assigns strictly increasing sequence numbers; reconnecting
 * with `since=<last seen seq>` resumes without gaps or replays.
 */

export interface StreamEvent {
  seq: number;
  type: string;
  data: Record<string, unknown>;
}

export interface StreamCallbacks {
  onEvent: (event: StreamEvent) => void;
  onStatus?: (status: "connected" | "reconnecting") => void;
}

/** Split an NDJSON buffer into parsed events plus the unfinished tail. */
export function parseNdjsonChunk(buffer: string): { events: StreamEvent[]; rest: string } {
  const lines = buffer.split("\n");
  const rest = lines.pop() ?? "";
  const events: StreamEvent[] = [];
  for (const line of lines) {
    const text = line.trim();
    if (!text) continue;
    events.push(JSON.parse(text) as StreamEvent);
  }
  return { events, rest };
}

export class EventStream {
  private lastSeq = 0;
  private stopped = false;

  constructor(
    private readonly base: string,
    private readonly callbacks: StreamCallbacks,
    private readonly fetchFn: typeof fetch = fetch,
    private readonly retryDelayMs = 1000,
  ) {}

  get cursor(): number {
    return this.lastSeq;
  }

  stop(): void {
    this.stopped = true;
  }

  async run(): Promise<void> {
    while (!this.stopped) {
      try {
        await this.consumeOnce();
      } catch {
        /* fall through to reconnect */
      }
      if (this.stopped) return;
      this.callbacks.onStatus?.("reconnecting");
      await new Promise((resolve) => setTimeout(resolve, this.retryDelayMs));
    }
  }

  private async consumeOnce(): Promise<void> {
    const resp = await this.fetchFn(`${this.base}/events?since=${this.lastSeq}`);
    if (!resp.ok || !resp.body) throw new Error(`stream failed: ${resp.status}`);
    this.callbacks.onStatus?.("connected");
    const reader = resp.body.getReader();
    const decoder = new TextDecoder();
    let buffer = "";
    for (;;) {
      const { done, value } = await reader.read();
      if (this.stopped) {
        await reader.cancel();
        return;
      }
      if (done) return;
      buffer += decoder.decode(value, { stream: true });
      const { events, rest } = parseNdjsonChunk(buffer);
      buffer = rest;
      for (const event of events) {
        if (event.seq > this.lastSeq) this.lastSeq = event.seq;
        if (event.type !== "heartbeat") this.callbacks.onEvent(event);
      }
    }
  }
}
