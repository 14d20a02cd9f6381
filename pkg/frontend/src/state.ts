/**
 * Workbench state and its pure transitions.
 *
 * The UI never computes a score: every utility shown comes from a server
 * response. This module only tracks the editable aggregation parameters,
 * turns edits into what-if overrides, and derives presentation facts
 * (movement vs. the pinned baseline, dirty flags).
 */

import type {
  Aggregation,
  ComparisonDto,
  ModelNode,
  OverrideDto,
  RankAlgorithm,
  RankingEntry,
} from "./types.js";

export interface WorkbenchState {
  modelId: string | null;
  datasetId: string | null;
  modelName: string;
  /** Tree as loaded from the server; overrides are diffed against it. */
  pristine: ModelNode | null;
  /** Tree with the decision-maker's edits applied. */
  tree: ModelNode | null;
  /** Ranking pinned as the comparison point for movement indicators. */
  baseline: RankingEntry[];
  /** Last ranking received for the current edits. */
  current: RankingEntry[];
  /** True when edits have not been re-evaluated yet. */
  dirty: boolean;
  methods: string[];
  comparison: ComparisonDto | null;
  selection: string | null;
  error: string | null;
}

export function initialState(): WorkbenchState {
  return {
    modelId: null,
    datasetId: null,
    modelName: "",
    pristine: null,
    tree: null,
    baseline: [],
    current: [],
    dirty: false,
    methods: ["roc", "rr", "rs", "swing"],
    comparison: null,
    selection: null,
    error: null,
  };
}

export interface EditResult {
  ok: boolean;
  message?: string;
  state: WorkbenchState;
}

function cloneNode(node: ModelNode): ModelNode {
  return {
    ...node,
    aggregation: node.aggregation
      ? (JSON.parse(JSON.stringify(node.aggregation)) as Aggregation)
      : undefined,
    children: node.children.map(cloneNode),
  };
}

export function findNode(root: ModelNode | null, id: string): ModelNode | null {
  if (!root) return null;
  if (root.id === id) return root;
  for (const child of root.children) {
    const found = findNode(child, id);
    if (found) return found;
  }
  return null;
}

function withEditedNode(
  state: WorkbenchState,
  nodeId: string,
  edit: (aggregation: Aggregation, node: ModelNode) => string | null,
): EditResult {
  if (!state.tree) return { ok: false, message: "no model loaded", state };
  const tree = cloneNode(state.tree);
  const node = findNode(tree, nodeId);
  if (!node) return { ok: false, message: `unknown attribute ${nodeId}`, state };
  if (!node.aggregation) {
    return { ok: false, message: `${nodeId} is a leaf; only aggregation nodes are editable`, state };
  }
  const problem = edit(node.aggregation, node);
  if (problem) return { ok: false, message: problem, state };
  return { ok: true, state: { ...state, tree, dirty: true, error: null } };
}

export function editRank(
  state: WorkbenchState, nodeId: string, childIndex: number, value: number,
): EditResult {
  if (!Number.isInteger(value) || value < 1) {
    return { ok: false, message: "ranks are integers ≥ 1", state };
  }
  return withEditedNode(state, nodeId, (aggregation, node) => {
    if (aggregation.kind !== "smarter") return "not a rank-based node";
    if (childIndex < 0 || childIndex >= node.children.length) return "no such child";
    aggregation.ranks[childIndex] = value;
    return null;
  });
}

export function editWeight(
  state: WorkbenchState, nodeId: string, childIndex: number, value: number,
): EditResult {
  if (!Number.isFinite(value) || value <= 0) {
    return { ok: false, message: "weights are positive numbers", state };
  }
  return withEditedNode(state, nodeId, (aggregation, node) => {
    if (aggregation.kind !== "smarts") return "not a swing-weight node";
    if (childIndex < 0 || childIndex >= node.children.length) return "no such child";
    aggregation.weights[childIndex] = value;
    return null;
  });
}

export function editAlgorithm(
  state: WorkbenchState, nodeId: string, algorithm: RankAlgorithm,
): EditResult {
  if (!["roc", "rr", "rs"].includes(algorithm)) {
    return { ok: false, message: `unknown algorithm ${algorithm}`, state };
  }
  return withEditedNode(state, nodeId, (aggregation) => {
    if (aggregation.kind !== "smarter") return "not a rank-based node";
    aggregation.algorithm = algorithm;
    return null;
  });
}

export function swapRanks(
  state: WorkbenchState, nodeId: string, first: number, second: number,
): EditResult {
  return withEditedNode(state, nodeId, (aggregation, node) => {
    if (aggregation.kind !== "smarter") return "not a rank-based node";
    const n = node.children.length;
    if (first < 0 || second < 0 || first >= n || second >= n) return "no such child";
    const tmp = aggregation.ranks[first]!;
    aggregation.ranks[first] = aggregation.ranks[second]!;
    aggregation.ranks[second] = tmp;
    return null;
  });
}

/** Edits as what-if overrides: one entry per node whose aggregation
 * differs from the pristine tree. No edits means an empty list. */
export function buildOverrides(
  pristine: ModelNode | null, edited: ModelNode | null,
): OverrideDto[] {
  if (!pristine || !edited) return [];
  const overrides: OverrideDto[] = [];
  const walk = (before: ModelNode, after: ModelNode) => {
    if (before.aggregation && after.aggregation) {
      if (JSON.stringify(before.aggregation) !== JSON.stringify(after.aggregation)) {
        overrides.push({
          attributeId: after.id,
          replacement: JSON.parse(JSON.stringify(after.aggregation)) as Aggregation,
        });
      }
    }
    before.children.forEach((child, i) => {
      const sibling = after.children[i];
      if (sibling) walk(child, sibling);
    });
  };
  walk(pristine, edited);
  return overrides;
}

export function loadModel(
  state: WorkbenchState, modelId: string, modelName: string, root: ModelNode,
): WorkbenchState {
  return {
    ...state,
    modelId,
    modelName,
    pristine: cloneNode(root),
    tree: cloneNode(root),
    baseline: [],
    current: [],
    comparison: null,
    dirty: false,
    selection: null,
    error: null,
  };
}

export function applyRanking(
  state: WorkbenchState, ranking: RankingEntry[],
): WorkbenchState {
  const next = { ...state, current: ranking, dirty: false, error: null };
  if (state.baseline.length === 0) next.baseline = ranking;
  return next;
}

export function pinBaseline(state: WorkbenchState): WorkbenchState {
  return { ...state, baseline: state.current };
}

export function resetEdits(state: WorkbenchState): WorkbenchState {
  return {
    ...state,
    tree: state.pristine ? cloneNode(state.pristine) : null,
    dirty: state.pristine !== null,
  };
}

export type Marker = "▲" | "▼" | "=";

export interface MovementRow extends RankingEntry {
  position: number;
  /** Places gained (positive) or lost vs. the baseline. */
  delta: number;
  marker: Marker;
}

export function movementRows(
  baseline: RankingEntry[], current: RankingEntry[],
): MovementRow[] {
  const basePosition = new Map(baseline.map((entry, index) => [entry.id, index]));
  return current.map((entry, index) => {
    const before = basePosition.get(entry.id);
    const delta = before === undefined ? 0 : before - index;
    const marker: Marker = delta > 0 ? "▲" : delta < 0 ? "▼" : "=";
    return { ...entry, position: index + 1, delta, marker };
  });
}

/** Longest shared ranking prefix across the selected methods' columns. */
export function agreementPrefix(comparison: ComparisonDto): string[] {
  const orders = comparison.methods.map((method) =>
    (comparison.rankings[method] ?? []).map((entry) => entry.id));
  if (orders.length === 0) return [];
  const shortest = Math.min(...orders.map((order) => order.length));
  const prefix: string[] = [];
  for (let i = 0; i < shortest; i += 1) {
    const candidate = orders[0]![i]!;
    if (orders.every((order) => order[i] === candidate)) prefix.push(candidate);
    else break;
  }
  return prefix;
}
