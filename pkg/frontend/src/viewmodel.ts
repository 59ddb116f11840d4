/**
 * Pure view derivations plus the scenario state machine.
 *
 * Hard rule: no dynamics are ever computed here. Rasters, periods, and
 * attractor captions are verbatim re-arrangements of API responses, so the
 * browser can never disagree with the engine.
 */

import {
  ApiClient,
  ApiError,
  Classification,
  FcmDoc,
  PhiBody,
  TrajectoryReply,
} from "./api.js";

// Display conventions: positive edges blue, negative red; active cells
// yellow, inactive purple.
export type EdgeColor = "blue" | "red";
export type CellColor = "yellow" | "purple";

export interface GraphNodeView {
  id: string;
  label: string;
}

export interface GraphEdgeView {
  source: string;
  target: string;
  weight: number;
  color: EdgeColor;
  width: number;
  tooltip: string;
}

export interface GraphView {
  nodes: GraphNodeView[];
  edges: GraphEdgeView[];
}

export function graphView(doc: FcmDoc): GraphView {
  const labels = new Map(doc.nodes.map((node) => [node.id, node.label]));
  return {
    nodes: doc.nodes.map((node) => ({ id: node.id, label: node.label })),
    edges: doc.edges.map((edge) => ({
      source: edge.source_id,
      target: edge.target_id,
      weight: edge.weight,
      color: edge.weight > 0 ? "blue" : "red",
      width: edgeWidth(edge.weight),
      tooltip:
        `${labels.get(edge.source_id)} -> ${labels.get(edge.target_id)} ` +
        `(${edge.weight})` +
        (edge.evidence_quote ? `\n"${edge.evidence_quote}"` : ""),
    })),
  };
}

// stroke width grows linearly with |weight|: 0.25 -> 1.75, 1.0 -> 4
export function edgeWidth(weight: number): number {
  return 1 + 3 * Math.abs(weight);
}

export interface RasterCell {
  value: number;
  active: boolean;
  color: CellColor;
}

export interface RasterView {
  labels: string[];
  rows: RasterCell[][];
}

/** One raster row per API state, columns in node order; nothing recomputed. */
export function rasterView(reply: TrajectoryReply): RasterView {
  return {
    labels: [...reply.labels],
    rows: reply.states.map((state) =>
      state.map((value) => ({
        value,
        active: value > 0.5,
        color: value > 0.5 ? "yellow" : "purple",
      })),
    ),
  };
}

/** The engine's own words; the UI adds nothing to them. */
export function attractorCaption(classification: Classification): string {
  return classification.describe;
}

export function toggleInit(init: number[], index: number): number[] {
  const next = [...init];
  next[index] = next[index] > 0.5 ? 0.0 : 1.0;
  return next;
}

/** Client-side gate for the edit control; anything outside [-1, 1] never
 * reaches the network. Returns the parsed weight or null. */
export function parseEdgeWeight(text: string): number | null {
  const trimmed = text.trim();
  if (trimmed === "") return null; // Number("") is 0, not a refusal
  const value = Number(trimmed);
  if (!Number.isFinite(value) || value < -1 || value > 1) return null;
  return value;
}

export interface ScenarioView {
  snapshotId: string | null;
  doc: FcmDoc | null;
  graph: GraphView | null;
  init: number[];
  phi: PhiBody;
  raster: RasterView | null;
  caption: string | null;
  classification: Classification | null;
  error: string | null;
  runPending: boolean;
  undoDepth: number;
}

const EMPTY: ScenarioView = {
  snapshotId: null,
  doc: null,
  graph: null,
  init: [],
  phi: { kind: "hard-threshold" },
  raster: null,
  caption: null,
  classification: null,
  error: null,
  runPending: false,
  undoDepth: 0,
};

/**
 * Drives one scenario view against the API: load, toggle, run, edit, undo.
 * At most one trajectory request is in flight; a second run() while pending
 * is refused rather than queued.
 */
export class ScenarioController {
  private view: ScenarioView = { ...EMPTY };
  private undoStack: string[] = [];

  constructor(
    private readonly api: ApiClient,
    private readonly onChange: (view: ScenarioView) => void = () => {},
  ) {}

  get state(): ScenarioView {
    return this.view;
  }

  async load(snapshotId: string): Promise<void> {
    try {
      const reply = await this.api.getFcm(snapshotId);
      this.patch({
        snapshotId: reply.id,
        doc: reply.fcm,
        graph: graphView(reply.fcm),
        init: reply.fcm.nodes.map(() => 0.0),
        raster: null,
        caption: null,
        classification: null,
        error: null,
      });
    } catch (error) {
      this.fail(error, `load ${snapshotId}`);
    }
  }

  toggle(index: number): void {
    this.patch({ init: toggleInit(this.view.init, index) });
  }

  setPhi(phi: PhiBody): void {
    this.patch({ phi });
  }

  /** Returns the API reply, or null when refused (pending/unloaded/failed). */
  async run(maxSteps?: number): Promise<TrajectoryReply | null> {
    if (this.view.runPending || this.view.snapshotId === null) return null;
    const request = {
      fcm_id: this.view.snapshotId,
      init: [...this.view.init],
      phi: this.view.phi,
      ...(maxSteps !== undefined ? { max_steps: maxSteps } : {}),
    };
    this.patch({ runPending: true });
    try {
      const reply = await this.api.runTrajectory(request);
      this.patch({
        raster: rasterView(reply),
        caption: attractorCaption(reply.classification),
        classification: reply.classification,
        error: null,
        runPending: false,
      });
      return reply;
    } catch (error) {
      this.patch({ runPending: false });
      this.fail(error, JSON.stringify(request));
      return null;
    }
  }

  /** Mints a new snapshot; the stale raster is dropped, not recolored. */
  async editEdge(source: string, target: string, weightText: string): Promise<boolean> {
    const weight = parseEdgeWeight(weightText);
    if (weight === null) {
      this.patch({ error: `weight ${JSON.stringify(weightText)} must be a number in [-1, 1]` });
      return false;
    }
    if (this.view.snapshotId === null) return false;
    const previous = this.view.snapshotId;
    try {
      const reply = await this.api.patchEdge(previous, { source, target, weight });
      this.undoStack.push(previous);
      await this.load(reply.id);
      this.patch({ undoDepth: this.undoStack.length });
      return true;
    } catch (error) {
      this.fail(error, `edit ${source} -> ${target} = ${weight}`);
      return false;
    }
  }

  async undo(): Promise<boolean> {
    const previous = this.undoStack.pop();
    if (previous === undefined) return false;
    await this.load(previous);
    this.patch({ undoDepth: this.undoStack.length });
    return true;
  }

  private patch(partial: Partial<ScenarioView>): void {
    this.view = { ...this.view, ...partial };
    this.onChange(this.view);
  }

  private fail(error: unknown, requestEcho: string): void {
    const text =
      error instanceof ApiError
        ? `${error.problem.title} (${error.problem.status}): ${error.problem.detail}`
        : String(error);
    this.patch({ error: `${text} [request: ${requestEcho}]` });
  }
}
