import assert from "node:assert/strict";
import { test } from "node:test";

import { parseModelDocument } from "../src/qm.js";

// Canonical output of the backend serializer for the bundled subset model.
const SUBSET_DOC = `model:
  name: "PRETTEF Trend subset"
  version: "1.0"
valueTypes:
  "count":
    kind: "numeric"
attributes:
  id: "trendSubset"
  name: "Trend (published criteria)"
  aggregation:
    kind: "smarter"
    algorithm: "rr"
    ranks: [1, 2]
  children:
  - id: "forks"
    name: "Forks"
    direction: "benefit"
    valueType: "count"
  - id: "pullRequests"
    name: "GitHub Pull Requests"
    direction: "benefit"
    valueType: "count"
metricBindings:
  "forks": "forks"
  "pullRequests": "pullRequests"
`;

const NESTED_DOC = `model:
  name: "deep"
  version: "2"
attributes:
  id: "root"
  name: "Root"
  aggregation:
    kind: "smarts"
    weights: [2.0, 1.0]
  children:
  - id: "mid"
    name: "Middle (ütf ✓)"
    aggregation:
      kind: "expression"
      formula: "(a + b) / 2.0"
    children:
    - id: "a"
      name: "A"
      valueType: "count"
    - id: "b"
      name: "B"
      valueType: "count"
  - id: "solo"
    name: "Solo"
    direction: "cost"
    valueType: "count"
metricBindings:
  "a": "sa"
  "b": "sb"
  "solo": "ss"
`;

test("parses the bundled subset document", () => {
  const info = parseModelDocument(SUBSET_DOC);
  assert.equal(info.name, "PRETTEF Trend subset");
  assert.equal(info.version, "1.0");
  assert.equal(info.root.id, "trendSubset");
  assert.deepEqual(info.root.aggregation, {
    kind: "smarter",
    algorithm: "rr",
    ranks: [1, 2],
  });
  assert.deepEqual(info.root.children.map((c) => c.id), ["forks", "pullRequests"]);
  assert.equal(info.root.children[0]?.direction, "benefit");
  assert.equal(info.root.children[1]?.name, "GitHub Pull Requests");
});

test("parses nested lists, formulas, and unicode names", () => {
  const info = parseModelDocument(NESTED_DOC);
  const mid = info.root.children[0]!;
  assert.equal(mid.name, "Middle (ütf ✓)");
  assert.deepEqual(mid.aggregation, { kind: "expression", formula: "(a + b) / 2.0" });
  assert.deepEqual(mid.children.map((c) => c.id), ["a", "b"]);
  assert.deepEqual(info.root.aggregation, { kind: "smarts", weights: [2.0, 1.0] });
  assert.equal(info.root.children[1]?.direction, "cost");
});

test("rejects non-model documents", () => {
  assert.throws(() => parseModelDocument("just: text\n"));
  assert.throws(() => parseModelDocument(""));
});
