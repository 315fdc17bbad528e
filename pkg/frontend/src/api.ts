// Typed client for the documented /api and /oai endpoints. The fetch
// function is injectable so tests can stub the network.

import type {
  DepositEnvelope,
  DepositJson,
  PublishResponse,
  SchemaDescriptor,
  SearchResponse,
  UploadResponse,
  ValidationReport,
  VocabEntry,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
    public report: ValidationReport | null = null,
  ) {
    super(message);
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export interface SearchParams {
  q?: string;
  period?: string;
  place?: string;
  category?: string;
  page?: number;
  page_size?: number;
}

export const buildQuery = (params: Record<string, string | number | undefined>): string => {
  const pairs = Object.entries(params)
    .filter(([, v]) => v !== undefined && v !== "")
    .map(([k, v]) => `${encodeURIComponent(k)}=${encodeURIComponent(String(v))}`);
  return pairs.length ? `?${pairs.join("&")}` : "";
};

export class ApiClient {
  constructor(
    private fetchFn: FetchLike = (input, init) => fetch(input, init),
    private base = "",
    public token: string | null = null,
  ) {}

  private headers(json = true): Record<string, string> {
    const headers: Record<string, string> = {};
    if (json) headers["Content-Type"] = "application/json";
    if (this.token) headers["Authorization"] = `Bearer ${this.token}`;
    return headers;
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(this.base + path, init);
    if (!response.ok) {
      let code = `HTTP_${response.status}`;
      let message = response.statusText;
      let report: ValidationReport | null = null;
      try {
        const body = await response.json();
        code = body.error ?? code;
        message = body.message ?? message;
        report = body.report ?? null;
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(response.status, code, message, report);
    }
    return response.json() as Promise<T>;
  }

  getSchema(): Promise<SchemaDescriptor> {
    return this.request("/api/schema");
  }

  createDeposit(draft: DepositJson): Promise<{ local_id: number; version: number }> {
    return this.request("/api/deposits", {
      method: "POST", headers: this.headers(), body: JSON.stringify(draft),
    });
  }

  getDeposit(id: number): Promise<DepositEnvelope> {
    return this.request(`/api/deposits/${id}`, { headers: this.headers(false) });
  }

  updateDeposit(id: number, deposit: DepositJson, expectedVersion: number):
      Promise<{ local_id: number; version: number }> {
    return this.request(`/api/deposits/${id}`, {
      method: "PUT",
      headers: this.headers(),
      body: JSON.stringify({ deposit, expected_version: expectedVersion }),
    });
  }

  validate(draft: DepositJson, publishing = false): Promise<ValidationReport> {
    return this.request(`/api/validate${buildQuery({ publishing: publishing ? "true" : "" })}`, {
      method: "POST", headers: this.headers(), body: JSON.stringify(draft),
    });
  }

  publish(id: number): Promise<PublishResponse> {
    return this.request(`/api/deposits/${id}/publish`, {
      method: "POST", headers: this.headers(false),
    });
  }

  uploadDocument(id: number, objectId: number, filename: string, mediaRole: string,
                 data: ArrayBuffer | Blob): Promise<UploadResponse> {
    const query = buildQuery({ filename, media_role: mediaRole });
    return this.request(`/api/deposits/${id}/objects/${objectId}/documents${query}`, {
      method: "POST", headers: this.headers(false), body: data,
    });
  }

  addExternalDocument(id: number, objectId: number, url: string,
                      expectedSha256: string | null, mediaRole: string):
      Promise<{ document: unknown; version: number }> {
    return this.request(`/api/deposits/${id}/objects/${objectId}/documents/external`, {
      method: "POST",
      headers: this.headers(),
      body: JSON.stringify({ url, expected_sha256: expectedSha256, media_role: mediaRole }),
    });
  }

  search(params: SearchParams): Promise<SearchResponse> {
    return this.request(`/api/search${buildQuery(params as Record<string, string | number>)}`,
      { headers: this.headers(false) });
  }

  vocabSearch(scheme: string, q: string, limit = 8): Promise<{ results: VocabEntry[] }> {
    return this.request(`/api/vocab/${encodeURIComponent(scheme)}/search${buildQuery({ q, limit })}`);
  }

  checkLinks(id: number): Promise<ValidationReport> {
    return this.request(`/api/deposits/${id}/check-links`, {
      method: "POST", headers: this.headers(false),
    });
  }

  async fetchPreview(id: number, objectId: number): Promise<ArrayBuffer | null> {
    const response = await this.fetchFn(
      `${this.base}/api/deposits/${id}/objects/${objectId}/preview.ply`,
      { headers: this.headers(false) });
    if (!response.ok) return null;
    return response.arrayBuffer();
  }
}
