/**
 * Workbench bootstrap: wire the panels, debounce edits (250 ms), keep a
 * single what-if in flight, and re-render from state after every server
 * response.
 */

import { ApiClient, ApiError } from "./api.js";
import { parseModelDocument } from "./qm.js";
import {
  applyRanking,
  buildOverrides,
  editAlgorithm,
  editRank,
  editWeight,
  initialState,
  loadModel,
  pinBaseline,
  resetEdits,
  type EditResult,
  type WorkbenchState,
} from "./state.js";
import {
  renderComparison,
  renderDrilldown,
  renderRanking,
  renderStatus,
  renderTree,
} from "./render.js";
import type { EvaluationDto, RankAlgorithm } from "./types.js";

const DEBOUNCE_MS = 250;

const $ = <T extends HTMLElement>(selector: string): T => {
  const node = document.querySelector<T>(selector);
  if (!node) throw new Error(`missing element ${selector}`);
  return node;
};

let state: WorkbenchState = initialState();
let lastEvaluation: EvaluationDto | null = null;
let drilldownRow: string | null = null;
let debounceTimer: number | undefined;

const api = new ApiClient("");

function redraw(): void {
  renderTree($("#tree"), state, handlers);
  renderRanking($("#ranking"), state);
  renderComparison($("#comparison"), state.comparison);
  const nodeValues = lastEvaluation?.ranking.find(
    (row) => row.id === (drilldownRow ?? lastEvaluation?.ranking[0]?.id))?.nodeValues ?? null;
  renderDrilldown($("#drilldown"), state.selection, nodeValues);
  renderStatus($("#status"), state);
}

function scheduleReevaluate(): void {
  window.clearTimeout(debounceTimer);
  debounceTimer = window.setTimeout(() => void reevaluate(), DEBOUNCE_MS);
}

async function reevaluate(): Promise<void> {
  if (!state.modelId || !state.datasetId) return;
  const overrides = buildOverrides(state.pristine, state.tree);
  try {
    const evaluation = await api.whatIf(state.modelId, state.datasetId, overrides);
    lastEvaluation = evaluation;
    state = applyRanking(state, evaluation.ranking.map(
      ({ id, utility }) => ({ id, utility })));
  } catch (error) {
    if (error instanceof DOMException && error.name === "AbortError") return;
    state = { ...state, error: describe(error) };
  }
  redraw();
}

function describe(error: unknown): string {
  if (error instanceof ApiError) {
    const detail = error.body.details[0];
    return detail ? `${error.body.message}: ${detail}` : error.body.message;
  }
  return error instanceof Error ? error.message : String(error);
}

function applyEdit(result: EditResult): void {
  if (!result.ok) {
    state = { ...state, error: result.message ?? "invalid edit" };
    redraw();
    return;
  }
  state = result.state;
  redraw();
  scheduleReevaluate();
}

const handlers = {
  onRank(nodeId: string, childIndex: number, raw: string): void {
    applyEdit(editRank(state, nodeId, childIndex, Number(raw)));
  },
  onWeight(nodeId: string, childIndex: number, raw: string): void {
    applyEdit(editWeight(state, nodeId, childIndex, Number(raw)));
  },
  onAlgorithm(nodeId: string, algorithm: string): void {
    applyEdit(editAlgorithm(state, nodeId, algorithm as RankAlgorithm));
  },
  onSelect(nodeId: string): void {
    state = { ...state, selection: nodeId };
    redraw();
  },
};

async function loadFromServer(modelId: string, datasetId: string): Promise<void> {
  const document_ = await api.modelDocument(modelId);
  const info = parseModelDocument(document_);
  state = loadModel(state, modelId, info.name, info.root);
  state = { ...state, datasetId };
  const evaluation = await api.evaluate(modelId, datasetId);
  lastEvaluation = evaluation;
  state = applyRanking(state, evaluation.ranking.map(
    ({ id, utility }) => ({ id, utility })));
  redraw();
}

async function uploadAndLoad(modelText: string, dataText: string,
                             dataFormat: "csv" | "json"): Promise<void> {
  const modelId = await api.uploadModel(modelText);
  const datasetId = await api.uploadDataset(dataFormat, dataText);
  await loadFromServer(modelId, datasetId);
}

async function compareNow(): Promise<void> {
  if (!state.modelId || !state.datasetId) return;
  try {
    const comparison = await api.compare(state.modelId, state.datasetId, state.methods);
    state = { ...state, comparison, error: null };
  } catch (error) {
    state = { ...state, error: describe(error) };
  }
  redraw();
}

async function readFile(input: HTMLInputElement): Promise<string> {
  const file = input.files?.[0];
  if (!file) throw new Error("pick a file first");
  return file.text();
}

function wireToolbar(): void {
  $("#load-files").addEventListener("click", () => {
    void (async () => {
      try {
        const modelText = await readFile($<HTMLInputElement>("#model-file"));
        const dataInput = $<HTMLInputElement>("#data-file");
        const dataText = await readFile(dataInput);
        const format = dataInput.files![0]!.name.endsWith(".json") ? "json" : "csv";
        await uploadAndLoad(modelText, dataText, format);
      } catch (error) {
        state = { ...state, error: describe(error) };
        redraw();
      }
    })();
  });

  $("#pin-baseline").addEventListener("click", () => {
    state = pinBaseline(state);
    redraw();
  });

  $("#reset-edits").addEventListener("click", () => {
    state = resetEdits(state);
    redraw();
    scheduleReevaluate();
  });

  $("#compare-now").addEventListener("click", () => void compareNow());

  $("#methods").addEventListener("change", () => {
    const picked = Array.from(
      document.querySelectorAll<HTMLInputElement>("#methods input:checked"),
    ).map((box) => box.value);
    state = { ...state, methods: picked.length ? picked : ["rr"] };
  });

  $("#ranking").addEventListener("click", (event) => {
    const cell = (event.target as HTMLElement).closest("td.alt-id");
    if (cell?.textContent) {
      drilldownRow = cell.textContent;
      redraw();
    }
  });
}

async function boot(): Promise<void> {
  wireToolbar();
  redraw();
  try {
    const preloaded = await api.preloadedIds();
    if (preloaded.modelId && preloaded.datasetId) {
      await loadFromServer(preloaded.modelId, preloaded.datasetId);
    }
  } catch (error) {
    state = { ...state, error: describe(error) };
    redraw();
  }
}

void boot();
