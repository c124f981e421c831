import { describe, expect, it } from "vitest";

import { EventStream, parseNdjsonChunk, type StreamEvent } from "../src/events.js";

function ndjsonResponse(lines: string[]): Response {
  const body = new ReadableStream<Uint8Array>({
    start(controller) {
      for (const line of lines) controller.enqueue(new TextEncoder().encode(line));
      controller.close();
    },
  });
  return new Response(body, { status: 200 });
}

describe("parseNdjsonChunk", () => {
  it("parses complete lines and keeps the partial tail", () => {
    const { events, rest } = parseNdjsonChunk('{"seq":1,"type":"a","data":{}}\n{"seq":2,"ty');
    expect(events).toEqual([{ seq: 1, type: "a", data: {} }]);
    expect(rest).toBe('{"seq":2,"ty');
  });

  it("skips blank lines", () => {
    const { events } = parseNdjsonChunk('\n{"seq":3,"type":"b","data":{}}\n\n');
    expect(events).toHaveLength(1);
  });
});

describe("EventStream", () => {
  it("delivers events, drops heartbeats, and resumes from the last seq", async () => {
    const requested: string[] = [];
    let call = 0;
    const fetchFn = (async (input: RequestInfo | URL) => {
      requested.push(String(input));
      call += 1;
      if (call === 1) {
        return ndjsonResponse([
          '{"seq":1,"type":"window_closed","data":{}}\n',
          '{"seq":2,"type":"heartbeat","data":{}}\n',
        ]);
      }
      return ndjsonResponse(['{"seq":3,"type":"decision","data":{}}\n']);
    }) as typeof fetch;

    const seen: StreamEvent[] = [];
    const stream = new EventStream("http://svc", { onEvent: (e) => {
      seen.push(e);
      if (e.seq >= 3) stream.stop();
    } }, fetchFn, 1);
    await stream.run();

    expect(seen.map((e) => e.type)).toEqual(["window_closed", "decision"]);
    expect(requested[0]).toBe("http://svc/events?since=0");
    expect(requested[1]).toBe("http://svc/events?since=2");
    expect(stream.cursor).toBe(3);
  });

  it("reports reconnecting after a failed connection", async () => {
    let statuses: string[] = [];
    let calls = 0;
    const fetchFn = (async () => {
      calls += 1;
      if (calls === 1) return new Response(null, { status: 503 });
      return ndjsonResponse(['{"seq":1,"type":"decision","data":{}}\n']);
    }) as typeof fetch;
    const stream = new EventStream("", {
      onEvent: () => stream.stop(),
      onStatus: (s) => statuses.push(s),
    }, fetchFn, 1);
    await stream.run();
    expect(statuses).toContain("reconnecting");
    expect(statuses[statuses.length - 1]).toBe("connected");
  });
});
