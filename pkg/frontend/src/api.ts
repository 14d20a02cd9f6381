/**
 * Typed client for the qmcdm HTTP API. One in-flight what-if at a time:
 * a newer request aborts the one it supersedes.
 */

import type {
  ApiErrorBody,
  ComparisonDto,
  EvaluationDto,
  OverrideDto,
} from "./types.js";

export class ApiError extends Error {
  constructor(readonly status: number, readonly body: ApiErrorBody) {
    super(body.message);
  }
}

async function readError(response: Response): Promise<ApiError> {
  let body: ApiErrorBody = { code: "unknown", message: response.statusText, details: [] };
  try {
    body = (await response.json()) as ApiErrorBody;
  } catch {
    /* non-envelope error body */
  }
  return new ApiError(response.status, body);
}

export class ApiClient {
  private inflight: AbortController | null = null;

  constructor(readonly baseUrl: string = "") {}

  private async request<T>(
    path: string,
    init: RequestInit = {},
    cancellable = false,
  ): Promise<T> {
    if (cancellable) {
      this.inflight?.abort();
      this.inflight = new AbortController();
      init.signal = this.inflight.signal;
    }
    const response = await fetch(this.baseUrl + path, {
      headers: { "Content-Type": "application/json" },
      ...init,
    });
    if (!response.ok) throw await readError(response);
    const type = response.headers.get("content-type") ?? "";
    return (type.includes("application/json")
      ? response.json()
      : response.text()) as Promise<T>;
  }

  health(): Promise<string> {
    return this.request<string>("/healthz");
  }

  preloadedIds(): Promise<{ modelId: string | null; datasetId: string | null }> {
    return this.request("/state");
  }

  async uploadModel(document: string): Promise<string> {
    const body = await this.request<{ modelId: string }>("/models", {
      method: "POST",
      body: JSON.stringify({ document }),
    });
    return body.modelId;
  }

  async uploadDataset(format: "csv" | "json", content: string): Promise<string> {
    const body = await this.request<{ datasetId: string }>("/datasets", {
      method: "POST",
      body: JSON.stringify({ format, content }),
    });
    return body.datasetId;
  }

  modelDocument(modelId: string): Promise<string> {
    return this.request<string>(`/models/${modelId}`);
  }

  evaluate(modelId: string, datasetId: string, method?: string): Promise<EvaluationDto> {
    return this.request<EvaluationDto>("/evaluate", {
      method: "POST",
      body: JSON.stringify(method ? { modelId, datasetId, method } : { modelId, datasetId }),
    });
  }

  /** Superseded what-if calls are aborted client-side. */
  whatIf(
    modelId: string, datasetId: string, overrides: OverrideDto[],
  ): Promise<EvaluationDto> {
    return this.request<EvaluationDto>("/whatif", {
      method: "POST",
      body: JSON.stringify({ modelId, datasetId, overrides }),
    }, true);
  }

  compare(
    modelId: string, datasetId: string, methods: string[],
  ): Promise<ComparisonDto> {
    return this.request<ComparisonDto>("/compare", {
      method: "POST",
      body: JSON.stringify({ modelId, datasetId, methods }),
    });
  }
}
