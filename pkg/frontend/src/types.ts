/**
 * Shared types mirroring the qmcdm HTTP API payloads.
 */

export type RankAlgorithm = "roc" | "rr" | "rs";

export type Aggregation =
  | { kind: "smarter"; algorithm: RankAlgorithm; ranks: number[] }
  | { kind: "smarts"; weights: number[] }
  | { kind: "expression"; formula: string };

export interface ModelNode {
  id: string;
  name: string;
  direction?: "benefit" | "cost";
  valueType?: string;
  aggregation?: Aggregation;
  children: ModelNode[];
}

export interface ModelInfo {
  name: string;
  version: string;
  root: ModelNode;
}

export interface RankingEntry {
  id: string;
  utility: number;
}

export interface NodeValueDto {
  attributeId: string;
  value: number;
  kind: "single" | "aggregated";
  weightsUsed?: number[];
  children?: NodeValueDto[];
}

export interface RankedAlternativeDto extends RankingEntry {
  nodeValues: NodeValueDto;
}

export interface EvaluationDto {
  model: string;
  method: string;
  ranking: RankedAlternativeDto[];
}

export interface ComparisonDto {
  methods: string[];
  rankings: Record<string, RankingEntry[]>;
  kendallTau: Record<string, Record<string, number>>;
  commonPrefix: string[];
}

export interface OverrideDto {
  attributeId: string;
  replacement: Aggregation;
}

export interface ApiErrorBody {
  code: string;
  message: string;
  details: string[];
}
