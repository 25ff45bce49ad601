import { describe, expect, it } from "vitest";

import { SessionApi } from "../src/api.js";
import { SessionFlow } from "../src/flow.js";
import type { Gamble } from "../src/types.js";

/** In-memory stand-in for the service with controllable failures. */
class FakeService {
  answers = new Map<string, 0 | 1>();
  schedule: Gamble[];
  failNextAnswer: "network" | "drop-ack" | null = null;

  constructor(ps: number[]) {
    this.schedule = ps.map((p, i) => ({
      id: `g${String(i).padStart(4, "0")}`,
      c: 0.5,
      p,
      prize_hi: 1,
      prize_lo: 0,
      kind: "end_point" as const,
    }));
  }

  private json(status: number, body: unknown): Response {
    return new Response(JSON.stringify(body), {
      status,
      headers: { "content-type": "application/json" },
    });
  }

  fetch = async (input: RequestInfo | URL, init?: RequestInit): Promise<Response> => {
    const url = String(input);
    const progress = { answered: this.answers.size, total: this.schedule.length };
    if (url.endsWith("/sessions") && init?.method === "POST") {
      return this.json(201, {
        session_id: "s1",
        created: true,
        gamble: this.schedule[0],
        progress,
      });
    }
    if (url.endsWith("/next")) {
      const pending = this.schedule.find((g) => !this.answers.has(g.id));
      if (!pending) {
        return this.json(200, {
          complete: true,
          curve: [{ c: 0.5, u: 0.5, omega: 0, disposition: "neutral", method: "mle", at_bound: false }],
          progress,
        });
      }
      return this.json(200, { complete: false, gamble: pending, progress });
    }
    if (url.endsWith("/answers")) {
      const body = JSON.parse(String(init?.body)) as { gamble_id: string; y: 0 | 1 };
      if (this.failNextAnswer === "network") {
        this.failNextAnswer = null;
        throw new TypeError("fetch failed");
      }
      if (this.answers.has(body.gamble_id)) {
        return this.json(409, { detail: `gamble ${body.gamble_id} has already been answered` });
      }
      this.answers.set(body.gamble_id, body.y);
      if (this.failNextAnswer === "drop-ack") {
        this.failNextAnswer = null;
        throw new TypeError("socket closed before response");
      }
      return this.json(200, { recorded: true, progress: { answered: this.answers.size, total: this.schedule.length } });
    }
    if (url.includes("/utility")) {
      return this.json(200, { points: [] });
    }
    return this.json(404, { detail: `no route ${url}` });
  };
}

function makeFlow(service: FakeService): SessionFlow {
  return new SessionFlow(new SessionApi("http://fake", service.fetch));
}

describe("SessionFlow", () => {
  it("walks a session to completion", async () => {
    const service = new FakeService([0.3, 0.6, 0.9]);
    const flow = makeFlow(service);
    await flow.start({ mode: "end_point", c_grid: [0.5], p_grid: [0.3, 0.6, 0.9] });
    while (flow.current.phase === "asking") {
      await flow.answer(flow.current.gamble.p >= 0.5 ? 1 : 0);
    }
    expect(flow.current.phase).toBe("complete");
    expect(service.answers.size).toBe(3);
  });

  it("never submits the same gamble twice", async () => {
    const service = new FakeService([0.3]);
    const flow = makeFlow(service);
    await flow.start({ mode: "end_point", c_grid: [0.5], p_grid: [0.3] });
    const submitting = flow.answer(1);
    await expect(async () => flow.answer(1)).rejects.toThrow();
    await submitting;
    expect(service.answers.size).toBe(1);
  });

  it("surfaces a retry affordance on network failure, losing nothing", async () => {
    const service = new FakeService([0.3, 0.7]);
    const flow = makeFlow(service);
    await flow.start({ mode: "end_point", c_grid: [0.5], p_grid: [0.3, 0.7] });
    service.failNextAnswer = "network";
    await flow.answer(1);
    expect(flow.current.phase).toBe("failed");
    expect(service.answers.size).toBe(0);
    await flow.retry();
    expect(flow.current.phase).toBe("asking");
    expect(service.answers.size).toBe(1);
  });

  it("treats a duplicate conflict after a dropped ack as acknowledged", async () => {
    const service = new FakeService([0.3, 0.7]);
    const flow = makeFlow(service);
    await flow.start({ mode: "end_point", c_grid: [0.5], p_grid: [0.3, 0.7] });
    service.failNextAnswer = "drop-ack";
    await flow.answer(1);
    expect(flow.current.phase).toBe("failed"); // ack lost, answer stored server-side
    await flow.retry(); // hits the 409 duplicate guard, which counts as recorded
    expect(flow.current.phase).toBe("asking");
    expect(service.answers.size).toBe(1);
    if (flow.current.phase === "asking") {
      expect(flow.current.gamble.id).toBe("g0001");
    }
  });

  it("resume lands on the same pending gamble", async () => {
    const service = new FakeService([0.3, 0.7]);
    const first = makeFlow(service);
    await first.start({ c_grid: [0.5], p_grid: [0.3, 0.7] });
    await first.answer(0);

    const second = makeFlow(service);
    await second.resume("s1");
    expect(second.current.phase).toBe("asking");
    if (second.current.phase === "asking") {
      expect(second.current.gamble.id).toBe("g0001");
    }
  });
});
