/** Typed client for the lingequiv JSON API (the only math source). */

export interface GraphData {
  vertices: string[];
  latent: string[];
  edges: [string, string][];
}

export interface Envelope<T> {
  ok: boolean;
  payload: T | null;
  diagnostics: string[];
  error: string | null;
  revision: unknown;
}

export interface ReducePayload {
  graph: GraphData;
  removed_vertices: string[];
  added_edges: [string, string][];
  was_irreducible: boolean;
}

export interface AbsentEdgeFlag {
  tail: string;
  head: string;
  addable: boolean;
}

export interface PresentEdgeFlag {
  tail: string;
  head: string;
  deletable: boolean;
}

export interface AdmissibilityPayload {
  absent: AbsentEdgeFlag[];
  present: PresentEdgeFlag[];
}

export interface TransitionData {
  from_index: number;
  to_index: number;
  kind: "edge-add" | "edge-del" | "reversal";
}

export interface ClassPayload {
  members: GraphData[];
  transitions: TransitionData[];
  total: number;
  labeled_count: number;
  complete: boolean;
  offset: number;
  limit: number;
}

export interface PresentationPayload {
  base: GraphData;
  solid: [string, string][];
  dashed: [string, string][];
}

export type FetchLike = (url: string, init: RequestInit) => Promise<Response>;

export class ApiError extends Error {}

export class ApiClient {
  constructor(
    readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async post<T>(path: string, body: unknown): Promise<Envelope<T>> {
    const resp = await this.fetchFn(`${this.baseUrl}${path}`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!resp.ok) {
      throw new ApiError(`${path}: HTTP ${resp.status}`);
    }
    return (await resp.json()) as Envelope<T>;
  }

  reduce(graph: GraphData, revision?: unknown): Promise<Envelope<ReducePayload>> {
    return this.post("/reduce", { graph, params: { revision } });
  }

  irreducible(
    graph: GraphData,
    revision?: unknown,
  ): Promise<Envelope<{ irreducible: boolean }>> {
    return this.post("/irreducible", { graph, params: { revision } });
  }

  edgeAdmissible(
    graph: GraphData,
    revision?: unknown,
  ): Promise<Envelope<AdmissibilityPayload>> {
    return this.post("/edge/admissible", { graph, params: { revision } });
  }

  equivClass(
    graph: GraphData,
    params: {
      offset?: number;
      limit?: number;
      with_transitions?: boolean;
      budget_members?: number;
      budget_seconds?: number;
      revision?: unknown;
    } = {},
  ): Promise<Envelope<ClassPayload>> {
    return this.post("/equiv/class", { graph, params });
  }

  present(
    graph: GraphData,
    revision?: unknown,
  ): Promise<Envelope<PresentationPayload>> {
    return this.post("/present", { graph, params: { revision } });
  }

  checkEquivalent(
    graph: GraphData,
    other: GraphData,
  ): Promise<Envelope<{ equivalent: boolean; witness: Record<string, string> | null }>> {
    return this.post("/equiv/check", { graph, graph_b: other, params: {} });
  }
}
