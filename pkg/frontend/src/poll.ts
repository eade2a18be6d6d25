/** Launch-and-poll workflow: submit a draft, poll to completion, fetch data. */

import type { ApiClient } from "./api.js";
import { ApiError } from "./api.js";
import { isValid, toDocument, type ScenarioDraft } from "./draft.js";
import type { RunRecord, TrajectoryRecord, ValidationIssue } from "./types.js";

export interface RunView {
  runId: string;
  status: "done" | "failed";
  record: RunRecord;
  trajectory: TrajectoryRecord[] | null;
  serviceErrors: ValidationIssue[] | null;
  errorReport: { type: string; message: string } | null;
}

export interface PollOptions {
  intervalMs?: number; // default 1000
  maxAttempts?: number;
  sleep?: (ms: number) => Promise<void>;
}

const defaultSleep = (ms: number) => new Promise<void>((r) => setTimeout(r, ms));

// at most one in-flight poll loop per run id
const inFlight = new Set<string>();

export async function launchAndPoll(
  client: ApiClient,
  draft: ScenarioDraft,
  options: PollOptions = {},
): Promise<RunView> {
  if (!isValid(draft)) {
    throw new ApiError("draft is not valid; fix inline errors before launching");
  }
  const created = await client.createRun(toDocument(draft));
  if (created.kind === "invalid") {
    return {
      runId: "",
      status: "failed",
      record: null as unknown as RunRecord,
      trajectory: null,
      serviceErrors: created.errors,
      errorReport: null,
    };
  }
  return pollRun(client, created.record, options);
}

export async function pollRun(
  client: ApiClient,
  initial: RunRecord,
  options: PollOptions = {},
): Promise<RunView> {
  const interval = options.intervalMs ?? 1000;
  const maxAttempts = options.maxAttempts ?? 600;
  const sleep = options.sleep ?? defaultSleep;

  if (inFlight.has(initial.id)) {
    throw new ApiError(`a poll for run ${initial.id} is already in flight`);
  }
  inFlight.add(initial.id);
  try {
    let record = initial;
    let attempts = 0;
    while (record.status === "running") {
      if (attempts >= maxAttempts) {
        throw new ApiError(`run ${record.id} still running after ${attempts} polls`);
      }
      await sleep(interval);
      const next = await client.getRun(record.id);
      if (next === null) {
        throw new ApiError(`run ${record.id} disappeared from the service`);
      }
      record = next;
      attempts += 1;
    }
    if (record.status === "failed") {
      return {
        runId: record.id,
        status: "failed",
        record,
        trajectory: null,
        serviceErrors: null,
        errorReport: record.error,
      };
    }
    const trajectory = await client.getTrajectory(record.id);
    return {
      runId: record.id,
      status: "done",
      record,
      trajectory,
      serviceErrors: null,
      errorReport: null,
    };
  } finally {
    inFlight.delete(initial.id);
  }
}
