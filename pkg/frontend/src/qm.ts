/**
 * Reader for canonical model documents as served by GET /models/{id}.
 *
 * The server always emits the canonical serialization: 2-space indents,
 * JSON-quoted strings, inline numeric lists, list dashes at the owning
 * key's indent. That regular subset parses with a small line cursor; this
 * is not a general YAML parser and does not try to be one.
 */

import type { Aggregation, ModelInfo, ModelNode } from "./types.js";

type Scalar = string | number | boolean;
type Block = { [key: string]: Scalar | Scalar[] | Block | Block[] };

class DocError extends Error {}

interface Line {
  indent: number;
  text: string; // content without indentation
  raw: string;
}

function splitLines(source: string): Line[] {
  const out: Line[] = [];
  for (const raw of source.split("\n")) {
    if (raw.trim() === "") continue;
    const indent = raw.length - raw.trimStart().length;
    out.push({ indent, text: raw.trim(), raw });
  }
  return out;
}

function parseScalar(text: string): Scalar | Scalar[] {
  try {
    return JSON.parse(text) as Scalar | Scalar[];
  } catch {
    throw new DocError(`unreadable value: ${text}`);
  }
}

function splitKey(text: string): { key: string; rest: string } {
  // Keys are either bare words or JSON-quoted strings followed by ":".
  let key: string;
  let end: number;
  if (text.startsWith('"')) {
    let i = 1;
    while (i < text.length && (text[i] !== '"' || text[i - 1] === "\\")) i += 1;
    key = JSON.parse(text.slice(0, i + 1)) as string;
    end = i + 1;
  } else {
    end = text.indexOf(":");
    if (end < 0) throw new DocError(`expected a key: ${text}`);
    key = text.slice(0, end);
  }
  if (text[end] !== ":") throw new DocError(`expected ':' after key: ${text}`);
  return { key, rest: text.slice(end + 1).trim() };
}

class Cursor {
  index = 0;
  constructor(readonly lines: Line[]) {}

  peek(): Line | undefined {
    return this.lines[this.index];
  }

  parseBlock(indent: number): Block {
    const block: Block = {};
    for (;;) {
      const line = this.peek();
      if (!line || line.indent < indent || line.text.startsWith("- ")) break;
      if (line.indent > indent) throw new DocError(`unexpected indent: ${line.raw}`);
      this.index += 1;
      const { key, rest } = splitKey(line.text);
      if (rest !== "") {
        block[key] = parseScalar(rest);
        continue;
      }
      const next = this.peek();
      if (next && next.indent === indent && next.text.startsWith("- ")) {
        block[key] = this.parseList(indent);
      } else if (next && next.indent === indent + 2) {
        block[key] = this.parseBlock(indent + 2);
      } else {
        block[key] = {};
      }
    }
    return block;
  }

  parseList(indent: number): Block[] {
    const items: Block[] = [];
    for (;;) {
      const line = this.peek();
      if (!line || line.indent !== indent || !line.text.startsWith("- ")) break;
      // Rewrite "- key: ..." as a field line two columns deeper, then read
      // the rest of the item as an ordinary block.
      this.lines[this.index] = {
        indent: indent + 2,
        text: line.text.slice(2),
        raw: line.raw,
      };
      items.push(this.parseBlock(indent + 2));
    }
    return items;
  }
}

function asAggregation(raw: Block): Aggregation {
  const kind = raw["kind"];
  if (kind === "smarter") {
    return {
      kind: "smarter",
      algorithm: raw["algorithm"] as "roc" | "rr" | "rs",
      ranks: (raw["ranks"] as number[]).slice(),
    };
  }
  if (kind === "smarts") {
    return { kind: "smarts", weights: (raw["weights"] as number[]).slice() };
  }
  if (kind === "expression") {
    return { kind: "expression", formula: raw["formula"] as string };
  }
  throw new DocError(`unknown aggregation kind: ${String(kind)}`);
}

function asNode(raw: Block): ModelNode {
  const id = raw["id"];
  if (typeof id !== "string") throw new DocError("attribute without id");
  const node: ModelNode = {
    id,
    name: typeof raw["name"] === "string" ? (raw["name"] as string) : id,
    children: ((raw["children"] as Block[] | undefined) ?? []).map(asNode),
  };
  if (raw["direction"] === "benefit" || raw["direction"] === "cost") {
    node.direction = raw["direction"];
  }
  if (typeof raw["valueType"] === "string") node.valueType = raw["valueType"] as string;
  if (raw["aggregation"]) node.aggregation = asAggregation(raw["aggregation"] as Block);
  return node;
}

/** Parse a canonical model document into the editable tree. */
export function parseModelDocument(source: string): ModelInfo {
  const cursor = new Cursor(splitLines(source));
  const doc = cursor.parseBlock(0);
  const header = doc["model"] as Block | undefined;
  const attributes = doc["attributes"] as Block | undefined;
  if (!header || !attributes) throw new DocError("not a model document");
  return {
    name: String(header["name"] ?? ""),
    version: String(header["version"] ?? ""),
    root: asNode(attributes),
  };
}
