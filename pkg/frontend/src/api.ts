/** Thin typed client for the run service endpoints. */

import type {
  RunRecord,
  ScenarioDocument,
  TrajectoryRecord,
  ValidationIssue,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export type CreateRunResult =
  | { kind: "created"; record: RunRecord }
  | { kind: "invalid"; errors: ValidationIssue[] };

export class ApiError extends Error {
  constructor(
    message: string,
    readonly status?: number,
    readonly retryable = false,
  ) {
    super(message);
  }
}

export class ApiClient {
  constructor(
    private readonly baseUrl = "",
    private readonly fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request(path: string, init?: RequestInit): Promise<Response> {
    let resp: Response;
    try {
      resp = await this.fetchImpl(this.baseUrl + path, init);
    } catch (err) {
      throw new ApiError(`network failure: ${String(err)}`, undefined, true);
    }
    return resp;
  }

  async createRun(doc: ScenarioDocument): Promise<CreateRunResult> {
    const resp = await this.request("/runs", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(doc),
    });
    if (resp.status === 422) {
      const body = (await resp.json()) as { errors: ValidationIssue[] };
      return { kind: "invalid", errors: body.errors };
    }
    if (!resp.ok) {
      throw new ApiError(`create run failed: HTTP ${resp.status}`, resp.status);
    }
    return { kind: "created", record: (await resp.json()) as RunRecord };
  }

  async getRun(id: string): Promise<RunRecord | null> {
    const resp = await this.request(`/runs/${id}`);
    if (resp.status === 404) return null;
    if (!resp.ok) {
      throw new ApiError(`get run failed: HTTP ${resp.status}`, resp.status);
    }
    return (await resp.json()) as RunRecord;
  }

  async getTrajectory(id: string): Promise<TrajectoryRecord[]> {
    const resp = await this.request(`/runs/${id}/trajectory?format=json`);
    if (!resp.ok) {
      throw new ApiError(`get trajectory failed: HTTP ${resp.status}`, resp.status);
    }
    const body = (await resp.json()) as { version: number; records: TrajectoryRecord[] };
    return body.records;
  }
}
