/**
 * Thin typed client for the fcmkit HTTP API.
 *
 * The fetch implementation is injectable so tests can replay recorded
 * responses; nothing in here interprets dynamics, it only moves JSON.
 */

export interface NodeDoc {
  id: string;
  label: string;
  evidence: string | null;
}

export interface EdgeDoc {
  source_id: string;
  target_id: string;
  weight: number;
  evidence_quote: string | null;
  trigger_verb: string | null;
}

export interface FcmDoc {
  schema_version: number;
  nodes: NodeDoc[];
  edges: EdgeDoc[];
  provenance?: Record<string, unknown>;
}

export interface Classification {
  kind: string;
  period: number;
  transient_length: number;
  cycle_states: number[][];
  describe: string;
}

export interface TrajectoryReply {
  fcm_id: string;
  labels: string[];
  states: number[][];
  classification: Classification;
}

export interface PhiBody {
  kind: string;
  threshold?: number;
  steepness?: number;
}

export interface TrajectoryRequest {
  fcm_id: string;
  init: number[];
  phi?: PhiBody;
  max_steps?: number;
}

/** RFC 7807 style body the service returns for every failure. */
export interface Problem {
  title: string;
  status: number;
  detail: string;
  stage?: string;
}

export class ApiError extends Error {
  constructor(readonly problem: Problem) {
    super(`${problem.title}: ${problem.detail}`);
    this.name = "ApiError";
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchImpl: FetchLike = (...args) => fetch(...args),
  ) {}

  listFcms(): Promise<{ fcms: { id: string; n: number; edges: number; labels: string[] }[] }> {
    return this.request("GET", "/api/fcm");
  }

  getFcm(id: string): Promise<{ id: string; fcm: FcmDoc }> {
    return this.request("GET", `/api/fcm/${id}`);
  }

  runTrajectory(body: TrajectoryRequest): Promise<TrajectoryReply> {
    return this.request("POST", "/api/trajectory", body);
  }

  patchEdge(
    id: string,
    edge: { source: string; target: string; weight: number },
  ): Promise<{ id: string }> {
    return this.request("PATCH", `/api/fcm/${id}/edge`, edge);
  }

  mixFcms(ids: string[], weights: number[]): Promise<{ id: string }> {
    return this.request("POST", "/api/mix", { fcm_ids: ids, weights });
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method, headers: { Accept: "application/json" } };
    if (body !== undefined) {
      init.headers = { ...init.headers, "Content-Type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const reply = await this.fetchImpl(this.baseUrl + path, init);
    if (!reply.ok) {
      let problem: Problem;
      try {
        problem = (await reply.json()) as Problem;
      } catch {
        problem = { title: "request failed", status: reply.status, detail: reply.statusText };
      }
      throw new ApiError(problem);
    }
    return (await reply.json()) as T;
  }
}
