/**
 * Test doubles built on responses recorded from a live service run
 * (scripts/record_fixtures.py). The stub never invents payloads, so every
 * assertion downstream is against what the engine actually said.
 */

import { readFileSync } from "node:fs";

import type { FetchLike, FcmDoc, TrajectoryReply, Problem } from "../src/api.js";

export interface Recorded {
  five_node_id: string;
  edited_id: string;
  init: number[];
  edit: { source: string; target: string; weight: number };
  five_node: { id: string; fcm: FcmDoc };
  edited: { id: string; fcm: FcmDoc };
  trajectory_before: TrajectoryReply;
  trajectory_after: TrajectoryReply;
  patch_reply: { id: string };
  error_409: Problem;
  error_404: Problem;
}

export function loadRecorded(): Recorded {
  const url = new URL("./fixtures/recorded.json", import.meta.url);
  return JSON.parse(readFileSync(url, "utf-8")) as Recorded;
}

export function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: {
      "content-type": status >= 400 ? "application/problem+json" : "application/json",
    },
  });
}

export interface LoggedCall {
  method: string;
  url: string;
  body?: unknown;
}

export interface FetchStub {
  fetch: FetchLike;
  calls: LoggedCall[];
}

/**
 * Routes requests to the recorded payloads and logs every call. Tests use
 * the log to prove the UI shipped the right requests and did no arithmetic
 * of its own.
 */
export function recordedFetch(recorded: Recorded): FetchStub {
  const calls: LoggedCall[] = [];
  const fetchImpl: FetchLike = async (url, init = {}) => {
    const method = init.method ?? "GET";
    const body = typeof init.body === "string" ? JSON.parse(init.body) : undefined;
    calls.push({ method, url, body });

    if (method === "GET" && url === "/api/fcm") {
      const fcm = recorded.five_node.fcm;
      return jsonResponse({
        fcms: [
          {
            id: recorded.five_node_id,
            n: fcm.nodes.length,
            edges: fcm.edges.length,
            labels: fcm.nodes.map((node) => node.label),
          },
        ],
      });
    }
    if (method === "GET" && url === `/api/fcm/${recorded.five_node_id}`) {
      return jsonResponse(recorded.five_node);
    }
    if (method === "GET" && url === `/api/fcm/${recorded.edited_id}`) {
      return jsonResponse(recorded.edited);
    }
    if (method === "POST" && url === "/api/trajectory") {
      const request = body as { fcm_id: string };
      if (request.fcm_id === recorded.five_node_id) {
        return jsonResponse(recorded.trajectory_before);
      }
      if (request.fcm_id === recorded.edited_id) {
        return jsonResponse(recorded.trajectory_after);
      }
      return jsonResponse(recorded.error_404, 404);
    }
    if (method === "PATCH" && url === `/api/fcm/${recorded.five_node_id}/edge`) {
      const request = body as { weight: number };
      if (request.weight < -1 || request.weight > 1) {
        return jsonResponse(recorded.error_409, 409);
      }
      return jsonResponse(recorded.patch_reply);
    }
    if (method === "GET" && url.startsWith("/api/fcm/")) {
      return jsonResponse(recorded.error_404, 404);
    }
    throw new Error(`recordedFetch: no route for ${method} ${url}`);
  };
  return { fetch: fetchImpl, calls };
}

export function trajectoryCalls(calls: LoggedCall[]): LoggedCall[] {
  return calls.filter((call) => call.method === "POST" && call.url === "/api/trajectory");
}

export function patchCalls(calls: LoggedCall[]): LoggedCall[] {
  return calls.filter((call) => call.method === "PATCH");
}
