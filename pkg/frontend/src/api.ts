import type {
  AnnotationBody,
  AnnotationRecord,
  ArtifactRecord,
  ProgressResponse,
  SuggestionResponse,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    detail: string,
  ) {
    super(detail);
    this.name = "ApiError";
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

/** Thin typed client over the review service; all numbers pass through untouched. */
export class ReviewApi {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(this.baseUrl + path, init);
    if (!response.ok) {
      let detail = `HTTP ${response.status}`;
      try {
        const body = (await response.json()) as { detail?: unknown };
        if (body.detail !== undefined) detail = JSON.stringify(body.detail);
      } catch {
        // non-JSON error body; keep the status line
      }
      throw new ApiError(response.status, detail);
    }
    return (await response.json()) as T;
  }

  taxonomies(): Promise<string[]> {
    return this.request("/taxonomies");
  }

  artifacts(): Promise<ArtifactRecord[]> {
    return this.request("/artifacts");
  }

  suggestions(
    artifactId: string,
    taxonomy: string,
    k?: number,
    radius?: number,
  ): Promise<SuggestionResponse> {
    const params = new URLSearchParams({ taxonomy });
    if (k !== undefined) params.set("k", String(k));
    if (radius !== undefined) params.set("radius", String(radius));
    return this.request(
      `/artifacts/${encodeURIComponent(artifactId)}/suggestions?${params.toString()}`,
    );
  }

  submitAnnotation(body: AnnotationBody): Promise<AnnotationRecord> {
    return this.request("/annotations", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  annotations(artifactId?: string): Promise<AnnotationRecord[]> {
    const suffix = artifactId ? `?artifact_id=${encodeURIComponent(artifactId)}` : "";
    return this.request(`/annotations${suffix}`);
  }

  progress(): Promise<ProgressResponse> {
    return this.request("/reports/progress");
  }

  /** Ground-truth formatted JSONL of effective accepted labels. */
  async exportAccepted(taxonomy: string): Promise<string> {
    const response = await this.fetchFn(
      `${this.baseUrl}/annotations/export?taxonomy=${encodeURIComponent(taxonomy)}`,
    );
    if (!response.ok) throw new ApiError(response.status, `HTTP ${response.status}`);
    return response.text();
  }
}
