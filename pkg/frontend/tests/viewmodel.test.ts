import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import {
  attractorCaption,
  edgeWidth,
  graphView,
  parseEdgeWeight,
  rasterView,
  ScenarioController,
  toggleInit,
} from "../src/viewmodel.js";
import { jsonResponse, loadRecorded, recordedFetch } from "./helpers.js";

const recorded = loadRecorded();

describe("graphView", () => {
  const view = graphView(recorded.five_node.fcm);

  it("keeps every node and edge", () => {
    expect(view.nodes).toHaveLength(5);
    expect(view.edges).toHaveLength(6);
  });

  it("colors positive edges blue and negative edges red", () => {
    for (const edge of view.edges) {
      expect(edge.color).toBe(edge.weight > 0 ? "blue" : "red");
    }
    const negative = view.edges.find((edge) => edge.weight < 0);
    expect(negative?.source).toBe("lack-of-citations");
    expect(negative?.color).toBe("red");
  });

  it("scales stroke width with the magnitude of the weight", () => {
    expect(edgeWidth(0.25)).toBeCloseTo(1.75);
    expect(edgeWidth(-1)).toBeCloseTo(4);
    const negative = view.edges.find((edge) => edge.weight === -0.75);
    expect(negative?.width).toBeCloseTo(1 + 3 * 0.75);
  });

  it("puts the evidence quote in the hover tooltip", () => {
    const doc = recorded.five_node.fcm;
    for (const [i, edge] of doc.edges.entries()) {
      expect(view.edges[i].tooltip).toContain(`"${edge.evidence_quote}"`);
    }
    const labelled = view.edges[0];
    expect(labelled.tooltip).toContain("AI Hallucinations -> Misinformation on the Internet");
    expect(labelled.tooltip).toContain("(0.75)");
  });

  it("renders an edgeless document as an empty edge list", () => {
    const lonely = { schema_version: 1, nodes: recorded.five_node.fcm.nodes, edges: [] };
    expect(graphView(lonely).edges).toEqual([]);
  });
});

describe("rasterView", () => {
  const view = rasterView(recorded.trajectory_before);

  it("copies the engine's states verbatim, one row per step", () => {
    expect(view.labels).toEqual(recorded.trajectory_before.labels);
    expect(view.rows.map((row) => row.map((cell) => cell.value))).toEqual(
      recorded.trajectory_before.states,
    );
  });

  it("marks active cells yellow and inactive cells purple", () => {
    for (const row of view.rows) {
      for (const cell of row) {
        expect(cell.active).toBe(cell.value > 0.5);
        expect(cell.color).toBe(cell.value > 0.5 ? "yellow" : "purple");
      }
    }
  });
});

describe("small view helpers", () => {
  it("toggleInit flips one slot without mutating the input", () => {
    const init = [0, 1, 0];
    expect(toggleInit(init, 0)).toEqual([1, 1, 0]);
    expect(toggleInit(init, 1)).toEqual([0, 0, 0]);
    expect(init).toEqual([0, 1, 0]);
    expect(toggleInit(toggleInit(init, 2), 2)).toEqual(init);
  });

  it("attractorCaption is the classification's describe string, untouched", () => {
    const classification = recorded.trajectory_before.classification;
    expect(attractorCaption(classification)).toBe(classification.describe);
    expect(attractorCaption(classification)).toBe("limit cycle, period 2 (transient 2)");
  });

  it("parseEdgeWeight accepts numbers in [-1, 1] and nothing else", () => {
    expect(parseEdgeWeight("0.5")).toBe(0.5);
    expect(parseEdgeWeight("-1")).toBe(-1);
    expect(parseEdgeWeight(" 0.25 ")).toBe(0.25);
    expect(parseEdgeWeight("0")).toBe(0);
    for (const bad of ["1.5", "-1.0001", "abc", "", "  ", "NaN", "Infinity", "1e2"]) {
      expect(parseEdgeWeight(bad), bad).toBeNull();
    }
  });
});

describe("ScenarioController guards", () => {
  it("allows at most one trajectory request in flight", async () => {
    let release: (reply: Response) => void = () => {};
    const pending = new Promise<Response>((resolve) => (release = resolve));
    let posts = 0;
    const controller = new ScenarioController(
      new ApiClient("", async (_url, init) => {
        if (init?.method === "POST") {
          posts += 1;
          return pending;
        }
        return jsonResponse(recorded.five_node);
      }),
    );
    await controller.load(recorded.five_node_id);

    const first = controller.run();
    const second = await controller.run(); // refused while the first is out
    expect(second).toBeNull();
    expect(posts).toBe(1);
    expect(controller.state.runPending).toBe(true);

    release(jsonResponse(recorded.trajectory_before));
    const reply = await first;
    expect(reply?.classification.period).toBe(2);
    expect(controller.state.runPending).toBe(false);
    expect(controller.state.raster).not.toBeNull();
  });

  it("refuses to run before a snapshot is loaded", async () => {
    const { fetch, calls } = recordedFetch(recorded);
    const controller = new ScenarioController(new ApiClient("", fetch));
    expect(await controller.run()).toBeNull();
    expect(calls).toEqual([]);
  });

  it("surfaces API failures with the echoed request and keeps the old raster", async () => {
    const problem = { title: "bad request", status: 400, detail: "init length 3 != 5" };
    let failNext = false;
    const stub = recordedFetch(recorded);
    const controller = new ScenarioController(
      new ApiClient("", async (url, init) => {
        if (failNext && init?.method === "POST") return jsonResponse(problem, 400);
        return stub.fetch(url, init);
      }),
    );
    await controller.load(recorded.five_node_id);
    for (const index of [0, 1, 3]) controller.toggle(index);
    await controller.run();
    const goodRaster = controller.state.raster;
    expect(goodRaster).not.toBeNull();

    failNext = true;
    expect(await controller.run()).toBeNull();
    expect(controller.state.runPending).toBe(false);
    expect(controller.state.error).toContain("bad request (400): init length 3 != 5");
    expect(controller.state.error).toContain('[request: {"fcm_id"');
    expect(controller.state.raster).toBe(goodRaster);
  });

  it("blocks out-of-range edit weights before any request is made", async () => {
    const { fetch, calls } = recordedFetch(recorded);
    const controller = new ScenarioController(new ApiClient("", fetch));
    await controller.load(recorded.five_node_id);
    const sent = calls.length;

    const accepted = await controller.editEdge(recorded.edit.source, recorded.edit.target, "1.5");
    expect(accepted).toBe(false);
    expect(calls.length).toBe(sent); // nothing went over the wire
    expect(controller.state.error).toContain('"1.5" must be a number in [-1, 1]');
    expect(controller.state.snapshotId).toBe(recorded.five_node_id);
  });

  it("shows a server-side edit rejection inline", async () => {
    const stub = recordedFetch(recorded);
    const controller = new ScenarioController(
      new ApiClient("", async (url, init) => {
        if (init?.method === "PATCH") return jsonResponse(recorded.error_409, 409);
        return stub.fetch(url, init);
      }),
    );
    await controller.load(recorded.five_node_id);
    const accepted = await controller.editEdge(recorded.edit.source, recorded.edit.target, "0.9");
    expect(accepted).toBe(false);
    expect(controller.state.error).toContain("weight out of range (409)");
    expect(controller.state.error).toContain("= 0.9");
    expect(controller.state.snapshotId).toBe(recorded.five_node_id);
    expect(controller.state.undoDepth).toBe(0);
  });

  it("notifies the change listener on every state transition", async () => {
    const { fetch } = recordedFetch(recorded);
    const seen: string[] = [];
    const controller = new ScenarioController(new ApiClient("", fetch), (view) => {
      seen.push(view.runPending ? "pending" : view.raster ? "done" : "idle");
    });
    await controller.load(recorded.five_node_id);
    await controller.run();
    expect(seen[0]).toBe("idle");
    expect(seen).toContain("pending");
    expect(seen[seen.length - 1]).toBe("done");
  });
});
