/**
 * DOM wiring for the scenario explorer. All state lives in the
 * ScenarioController; this file only paints it and forwards events.
 */

import { ApiClient } from "./api.js";
import { GraphView, RasterView, ScenarioController, ScenarioView } from "./viewmodel.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const COLORS = { blue: "#2563eb", red: "#dc2626", yellow: "#facc15", purple: "#5b21b6" };

function element<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  props: Partial<HTMLElementTagNameMap[K]> = {},
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  Object.assign(node, props);
  if (text !== undefined) node.textContent = text;
  return node;
}

function renderGraph(host: HTMLElement, graph: GraphView): void {
  host.replaceChildren();
  const size = 420;
  const radius = size / 2 - 70;
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${size} ${size}`);
  svg.setAttribute("width", String(size));

  const marker = document.createElementNS(SVG_NS, "marker");
  marker.setAttribute("id", "arrow");
  marker.setAttribute("viewBox", "0 0 8 8");
  marker.setAttribute("refX", "7");
  marker.setAttribute("refY", "4");
  marker.setAttribute("markerWidth", "5");
  marker.setAttribute("markerHeight", "5");
  marker.setAttribute("orient", "auto-start-reverse");
  const tip = document.createElementNS(SVG_NS, "path");
  tip.setAttribute("d", "M 0 0 L 8 4 L 0 8 z");
  tip.setAttribute("fill", "#374151");
  marker.appendChild(tip);
  svg.appendChild(marker);

  const position = new Map<string, { x: number; y: number }>();
  graph.nodes.forEach((node, i) => {
    const angle = (2 * Math.PI * i) / graph.nodes.length - Math.PI / 2;
    position.set(node.id, {
      x: size / 2 + radius * Math.cos(angle),
      y: size / 2 + radius * Math.sin(angle),
    });
  });

  for (const edge of graph.edges) {
    const from = position.get(edge.source)!;
    const to = position.get(edge.target)!;
    // shorten toward the node circle so the arrowhead stays visible
    const dx = to.x - from.x;
    const dy = to.y - from.y;
    const length = Math.hypot(dx, dy) || 1;
    const trim = 26 / length;
    const line = document.createElementNS(SVG_NS, "line");
    line.setAttribute("x1", String(from.x + dx * trim));
    line.setAttribute("y1", String(from.y + dy * trim));
    line.setAttribute("x2", String(to.x - dx * trim));
    line.setAttribute("y2", String(to.y - dy * trim));
    line.setAttribute("stroke", COLORS[edge.color]);
    line.setAttribute("stroke-width", String(edge.width));
    line.setAttribute("marker-end", "url(#arrow)");
    const hover = document.createElementNS(SVG_NS, "title");
    hover.textContent = edge.tooltip;
    line.appendChild(hover);
    svg.appendChild(line);
  }

  for (const node of graph.nodes) {
    const at = position.get(node.id)!;
    const dot = document.createElementNS(SVG_NS, "circle");
    dot.setAttribute("cx", String(at.x));
    dot.setAttribute("cy", String(at.y));
    dot.setAttribute("r", "20");
    dot.setAttribute("fill", "#f3f4f6");
    dot.setAttribute("stroke", "#374151");
    svg.appendChild(dot);
    const label = document.createElementNS(SVG_NS, "text");
    label.setAttribute("x", String(at.x));
    label.setAttribute("y", String(at.y - 26));
    label.setAttribute("text-anchor", "middle");
    label.setAttribute("font-size", "11");
    label.textContent = node.label;
    svg.appendChild(label);
  }
  host.appendChild(svg);
}

function renderRaster(host: HTMLElement, raster: RasterView | null): void {
  host.replaceChildren();
  if (!raster) return;
  const table = element("table", { className: "raster" });
  const head = element("tr");
  head.appendChild(element("th", {}, "t"));
  for (const label of raster.labels) head.appendChild(element("th", {}, label));
  table.appendChild(head);
  raster.rows.forEach((row, t) => {
    const tr = element("tr");
    tr.appendChild(element("td", {}, String(t)));
    for (const cell of row) {
      const td = element("td", { title: String(cell.value) });
      td.style.background = COLORS[cell.color];
      tr.appendChild(td);
    }
    table.appendChild(tr);
  });
  host.appendChild(table);
}

function renderControls(
  host: HTMLElement,
  view: ScenarioView,
  controller: ScenarioController,
): void {
  host.replaceChildren();
  if (!view.doc) return;
  view.doc.nodes.forEach((node, i) => {
    const row = element("label", { className: "toggle" });
    const box = element("input", { type: "checkbox", checked: view.init[i] > 0.5 });
    box.addEventListener("change", () => controller.toggle(i));
    row.appendChild(box);
    row.appendChild(document.createTextNode(" " + node.label));
    host.appendChild(row);
  });
}

export function boot(root: HTMLElement): ScenarioController {
  const api = new ApiClient("");
  const graphHost = element("div", { id: "graph" });
  const controlsHost = element("div", { id: "controls" });
  const rasterHost = element("div", { id: "raster" });
  const caption = element("p", { id: "caption" });
  const banner = element("p", { id: "error", className: "error" });
  const status = element("p", { id: "status" });

  const phiSelect = element("select");
  for (const kind of ["hard-threshold", "logistic", "clamped-linear"]) {
    phiSelect.appendChild(element("option", { value: kind }, kind));
  }
  const runButton = element("button", {}, "Run scenario");

  const editSource = element("input", { placeholder: "source node id" });
  const editTarget = element("input", { placeholder: "target node id" });
  const editWeight = element("input", { placeholder: "weight in [-1, 1]" });
  const editButton = element("button", {}, "Apply edit");
  const undoButton = element("button", {}, "Undo edit");

  const controller = new ScenarioController(api, (view) => {
    status.textContent = view.snapshotId
      ? `snapshot ${view.snapshotId.slice(0, 12)}… undo depth ${view.undoDepth}`
      : "no snapshot loaded";
    caption.textContent = view.caption ?? "";
    banner.textContent = view.error ?? "";
    runButton.disabled = view.runPending || !view.snapshotId;
    if (view.graph) renderGraph(graphHost, view.graph);
    renderControls(controlsHost, view, controller);
    renderRaster(rasterHost, view.raster);
  });

  phiSelect.addEventListener("change", () => controller.setPhi({ kind: phiSelect.value }));
  runButton.addEventListener("click", () => void controller.run());
  editButton.addEventListener("click", () =>
    void controller.editEdge(editSource.value.trim(), editTarget.value.trim(), editWeight.value),
  );
  undoButton.addEventListener("click", () => void controller.undo());

  const picker = element("select", { id: "picker" });
  picker.addEventListener("change", () => void controller.load(picker.value));
  void api.listFcms().then((listing) => {
    for (const entry of listing.fcms) {
      picker.appendChild(element("option", { value: entry.id }, `${entry.labels[0]}… (${entry.n} nodes)`));
    }
    if (listing.fcms.length > 0) void controller.load(listing.fcms[0].id);
  });

  root.append(
    element("h1", {}, "Scenario explorer"),
    picker,
    status,
    banner,
    graphHost,
    element("h2", {}, "Initial activations"),
    controlsHost,
    phiSelect,
    runButton,
    caption,
    rasterHost,
    element("h2", {}, "Edit an edge"),
    editSource,
    editTarget,
    editWeight,
    editButton,
    undoButton,
  );
  return controller;
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  boot(document.getElementById("app")!);
}
