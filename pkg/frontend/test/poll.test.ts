import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { makeDraft, editScenario } from "../src/draft.js";
import { launchAndPoll, pollRun } from "../src/poll.js";
import type { RunRecord } from "../src/types.js";

function jsonResponse(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}

function record(status: "running" | "done" | "failed", id = "r1"): RunRecord {
  return {
    id,
    status,
    scenario: makeDraft().doc,
    trajectory:
      status === "done"
        ? { csv: `/runs/${id}/trajectory?format=csv`, json: `/runs/${id}/trajectory?format=json` }
        : null,
    error: status === "failed" ? { type: "SimulationError", message: "boom" } : null,
  };
}

const TRAJECTORY = {
  version: 1,
  records: [
    {
      epoch: 1, D: 1, T: 1, DT: 1, N_est: 1, N_model: 1,
      mode: "unconstrained", bound: null, median_total_reward: 1,
      median_miner_reward: 1, xi_mean: 0, agg_sp_targeted: 1,
      agg_sp_nakamoto: 1, pool: 0, remainder: 0,
    },
  ],
};

function scriptedClient(script: Array<[string, Response]>): ApiClient {
  const queue = [...script];
  return new ApiClient("", async (url) => {
    const next = queue.shift();
    if (!next) throw new Error(`unexpected request: ${url}`);
    const [expected, response] = next;
    expect(url).toContain(expected);
    return response;
  });
}

describe("launchAndPoll", () => {
  it("refuses to launch an invalid draft", async () => {
    const draft = editScenario(makeDraft(), "controller.tau", 2.0);
    const client = scriptedClient([]);
    await expect(launchAndPoll(client, draft)).rejects.toThrow(/not valid/);
  });

  it("returns a done view with the trajectory", async () => {
    const client = scriptedClient([
      ["/runs", jsonResponse(201, record("done"))],
      ["/runs/r1/trajectory?format=json", jsonResponse(200, TRAJECTORY)],
    ]);
    const view = await launchAndPoll(client, makeDraft());
    expect(view.status).toBe("done");
    expect(view.trajectory).toHaveLength(1);
    expect(view.serviceErrors).toBeNull();
  });

  it("polls a running run until it finishes", async () => {
    const client = scriptedClient([
      ["/runs", jsonResponse(201, record("running"))],
      ["/runs/r1", jsonResponse(200, record("running"))],
      ["/runs/r1", jsonResponse(200, record("done"))],
      ["/runs/r1/trajectory?format=json", jsonResponse(200, TRAJECTORY)],
    ]);
    const sleeps: number[] = [];
    const view = await launchAndPoll(client, makeDraft(), {
      intervalMs: 1000,
      sleep: async (ms) => {
        sleeps.push(ms);
      },
    });
    expect(view.status).toBe("done");
    expect(sleeps).toEqual([1000, 1000]); // 1s cadence, one poll at a time
  });

  it("surfaces service validation errors verbatim", async () => {
    const client = scriptedClient([
      [
        "/runs",
        jsonResponse(422, {
          errors: [{ field: "controller.dt_lower", message: "must be < dt_upper" }],
        }),
      ],
    ]);
    const view = await launchAndPoll(client, makeDraft());
    expect(view.serviceErrors).toEqual([
      { field: "controller.dt_lower", message: "must be < dt_upper" },
    ]);
    expect(view.status).toBe("failed");
  });

  it("returns the error report for a failed run", async () => {
    const client = scriptedClient([["/runs", jsonResponse(201, record("failed"))]]);
    const view = await launchAndPoll(client, makeDraft());
    expect(view.status).toBe("failed");
    expect(view.errorReport).toEqual({ type: "SimulationError", message: "boom" });
    expect(view.trajectory).toBeNull();
  });

  it("flags network failures as retryable", async () => {
    const client = new ApiClient("", async () => {
      throw new TypeError("connection refused");
    });
    await expect(launchAndPoll(client, makeDraft())).rejects.toMatchObject({
      retryable: true,
    });
  });

  it("allows at most one in-flight poll per run id", async () => {
    let resolveFirst: (() => void) | null = null;
    const gate = new Promise<void>((r) => {
      resolveFirst = r;
    });
    const client = new ApiClient("", async (url) => {
      if (url.includes("trajectory")) return jsonResponse(200, TRAJECTORY);
      await gate;
      return jsonResponse(200, record("done"));
    });
    const first = pollRun(client, record("running"), {
      sleep: async () => {},
    });
    await expect(
      pollRun(client, record("running"), { sleep: async () => {} }),
    ).rejects.toThrow(/already in flight/);
    resolveFirst!();
    const view = await first;
    expect(view.status).toBe("done");
    // once settled, polling the same id again is allowed
    const again = await pollRun(client, record("done"), { sleep: async () => {} });
    expect(again.status).toBe("done");
  });
});
