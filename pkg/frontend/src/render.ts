/**
 * DOM rendering for the workbench panels. Display only: every number
 * shown here arrived in a server response.
 */

import type { ComparisonDto, ModelNode, NodeValueDto } from "./types.js";
import type { WorkbenchState } from "./state.js";
import { agreementPrefix, movementRows } from "./state.js";

export interface TreeHandlers {
  onRank(nodeId: string, childIndex: number, raw: string): void;
  onWeight(nodeId: string, childIndex: number, raw: string): void;
  onAlgorithm(nodeId: string, algorithm: string): void;
  onSelect(nodeId: string): void;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K, className?: string, text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function aggregationControls(
  node: ModelNode, handlers: TreeHandlers,
): HTMLElement {
  const box = el("div", "agg-controls");
  const aggregation = node.aggregation;
  if (!aggregation) return box;

  if (aggregation.kind === "smarter") {
    const select = el("select", "algo-select");
    for (const algorithm of ["roc", "rr", "rs"]) {
      const option = el("option", undefined, algorithm);
      option.value = algorithm;
      option.selected = algorithm === aggregation.algorithm;
      select.append(option);
    }
    select.addEventListener("change", () => handlers.onAlgorithm(node.id, select.value));
    box.append(el("span", "agg-kind", "ranks"), select);
    node.children.forEach((child, index) => {
      const label = el("label", "param", child.name);
      const input = el("input", "rank-input");
      input.type = "number";
      input.min = "1";
      input.step = "1";
      input.value = String(aggregation.ranks[index] ?? "");
      input.dataset["node"] = node.id;
      input.dataset["child"] = String(index);
      input.addEventListener("input", () => handlers.onRank(node.id, index, input.value));
      label.append(input);
      box.append(label);
    });
  } else if (aggregation.kind === "smarts") {
    box.append(el("span", "agg-kind", "swing weights"));
    node.children.forEach((child, index) => {
      const label = el("label", "param", child.name);
      const input = el("input", "weight-input");
      input.type = "number";
      input.min = "0";
      input.step = "any";
      input.value = String(aggregation.weights[index] ?? "");
      input.dataset["node"] = node.id;
      input.dataset["child"] = String(index);
      input.addEventListener("input", () => handlers.onWeight(node.id, index, input.value));
      label.append(input);
      box.append(label);
    });
  } else {
    box.append(el("span", "agg-kind", `formula: ${aggregation.formula}`));
  }
  return box;
}

export function renderTree(
  container: HTMLElement, state: WorkbenchState, handlers: TreeHandlers,
): void {
  container.replaceChildren();
  if (!state.tree) {
    container.append(el("p", "placeholder", "Load a model to edit its weighting."));
    return;
  }
  const walk = (node: ModelNode): HTMLElement => {
    const item = el("li", node.children.length ? "node" : "leaf");
    const head = el("div", "node-head");
    const name = el("button", "node-name", node.name);
    name.type = "button";
    name.addEventListener("click", () => handlers.onSelect(node.id));
    head.append(name);
    if (state.selection === node.id) item.classList.add("selected");
    item.append(head);
    if (node.aggregation) item.append(aggregationControls(node, handlers));
    if (node.children.length) {
      const list = el("ul", "children");
      node.children.forEach((child) => list.append(walk(child)));
      item.append(list);
    }
    return item;
  };
  const rootList = el("ul", "tree-root");
  rootList.append(walk(state.tree));
  container.append(rootList);
}

export function renderRanking(container: HTMLElement, state: WorkbenchState): void {
  container.replaceChildren();
  if (state.current.length === 0) {
    container.append(el("p", "placeholder", "No evaluation yet."));
    return;
  }
  const table = el("table", "ranking");
  const head = el("tr");
  for (const caption of ["#", "alternative", "utility", "vs. baseline"]) {
    head.append(el("th", undefined, caption));
  }
  table.append(head);
  for (const row of movementRows(state.baseline, state.current)) {
    const tr = el("tr", row.marker === "=" ? "steady" : row.marker === "▲" ? "up" : "down");
    tr.append(el("td", undefined, String(row.position)));
    tr.append(el("td", "alt-id", row.id));
    tr.append(el("td", "utility", row.utility.toFixed(4)));
    const movement = row.marker === "=" ? "=" : `${row.marker} ${Math.abs(row.delta)}`;
    tr.append(el("td", "movement", movement));
    table.append(tr);
  }
  container.append(table);
  if (state.dirty) {
    container.append(el("p", "dirty-note", "Edits pending re-evaluation…"));
  }
}

export function renderComparison(container: HTMLElement, comparison: ComparisonDto | null): void {
  container.replaceChildren();
  if (!comparison) {
    container.append(el("p", "placeholder", "Pick methods and compare."));
    return;
  }
  const table = el("table", "comparison");
  const head = el("tr");
  head.append(el("th", undefined, "#"));
  comparison.methods.forEach((method) => head.append(el("th", undefined, method)));
  table.append(head);
  const prefix = new Set(agreementPrefix(comparison));
  const depth = Math.max(...comparison.methods.map(
    (method) => comparison.rankings[method]?.length ?? 0));
  for (let i = 0; i < depth; i += 1) {
    const tr = el("tr");
    tr.append(el("td", undefined, String(i + 1)));
    for (const method of comparison.methods) {
      const entry = comparison.rankings[method]?.[i];
      const cell = el("td", undefined, entry ? entry.id : "");
      if (entry && prefix.has(entry.id)) cell.classList.add("agreed");
      tr.append(cell);
    }
    table.append(tr);
  }
  container.append(table);
  const tau = el("p", "tau-note",
    `agreement prefix: ${agreementPrefix(comparison).join(", ") || "(none)"}`);
  container.append(tau);
}

export function renderDrilldown(
  container: HTMLElement, selection: string | null, nodeValues: NodeValueDto | null,
): void {
  container.replaceChildren();
  if (!selection || !nodeValues) {
    container.append(el("p", "placeholder", "Select an attribute and a row to drill down."));
    return;
  }
  const find = (node: NodeValueDto): NodeValueDto | null => {
    if (node.attributeId === selection) return node;
    for (const child of node.children ?? []) {
      const hit = find(child);
      if (hit) return hit;
    }
    return null;
  };
  const target = find(nodeValues);
  if (!target) {
    container.append(el("p", "placeholder", `No value for ${selection}.`));
    return;
  }
  container.append(el("h3", undefined, target.attributeId));
  container.append(el("p", undefined,
    `${target.kind} value: ${target.value.toFixed(4)}`));
  if (target.weightsUsed && target.children) {
    const list = el("ul", "drill-children");
    target.children.forEach((child, index) => {
      list.append(el("li", undefined,
        `${child.attributeId}: ${child.value.toFixed(4)} × weight ` +
        `${(target.weightsUsed![index] ?? 0).toFixed(4)}`));
    });
    container.append(list);
  }
}

export function renderStatus(container: HTMLElement, state: WorkbenchState): void {
  container.textContent = state.error
    ? `⚠ ${state.error}`
    : state.dirty
      ? "recomputing…"
      : state.modelId
        ? `model ${state.modelName} loaded`
        : "no model loaded";
  container.className = state.error ? "status error" : "status";
}
