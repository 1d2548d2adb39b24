/** Editor view-model.  Holds the client mirror of the graph, the latest
 * server verdicts (irreducibility, per-edge admissibility), the paged
 * class cache, and the presentation overlay.  All mathematics comes from
 * the service; this file only routes, caches, and discards stale data. */

import {
  AdmissibilityPayload,
  ApiClient,
  ClassPayload,
  GraphData,
  PresentationPayload,
  TransitionData,
} from "./api.js";
import { RevisionGate } from "./revisions.js";

export const PAGE_SIZE = 24;
export const TRANSITION_GRAPH_CAP = 200;

export type EdgeStatus =
  | "present-deletable"
  | "present-fixed"
  | "absent-addable"
  | "absent-inadmissible"
  | "unknown";

export function edgeKey(tail: string, head: string): string {
  return `${tail}->${head}`;
}

export function cloneGraph(g: GraphData): GraphData {
  return {
    vertices: [...g.vertices],
    latent: [...g.latent],
    edges: g.edges.map((e) => [e[0], e[1]] as [string, string]),
  };
}

export class EditorState {
  graph: GraphData;
  selection: string | null = null;
  irreducible: boolean | null = null;
  notice: string | null = null;
  readonly gate = new RevisionGate();
  private admissible = new Map<string, boolean>();
  private deletable = new Map<string, boolean>();
  classCache: {
    pages: Map<number, GraphData[]>;
    transitions: TransitionData[];
    total: number;
    complete: boolean;
  } | null = null;
  presentation: PresentationPayload | null = null;

  constructor(private readonly api: ApiClient, graph: GraphData) {
    this.graph = cloneGraph(graph);
  }

  /** Any edit invalidates every cached server verdict. */
  private edited(): void {
    this.gate.bump();
    this.irreducible = null;
    this.admissible.clear();
    this.deletable.clear();
    this.classCache = null;
    this.presentation = null;
    this.notice = null;
  }

  loadGraph(graph: GraphData): void {
    this.graph = cloneGraph(graph);
    this.edited();
  }

  hasEdge(tail: string, head: string): boolean {
    return this.graph.edges.some((e) => e[0] === tail && e[1] === head);
  }

  addEdge(tail: string, head: string): void {
    if (tail === head || this.hasEdge(tail, head)) return;
    this.graph.edges.push([tail, head]);
    this.edited();
  }

  removeEdge(tail: string, head: string): void {
    this.graph.edges = this.graph.edges.filter(
      (e) => !(e[0] === tail && e[1] === head),
    );
    this.edited();
  }

  toggleLatent(vertex: string): void {
    if (this.graph.latent.includes(vertex)) {
      this.graph.latent = this.graph.latent.filter((v) => v !== vertex);
    } else {
      this.graph.latent = [...this.graph.latent, vertex];
    }
    this.edited();
  }

  /** Re-query irreducibility and per-edge admissibility for the current
   * revision; stale answers are dropped by the gate. */
  async refresh(): Promise<void> {
    const revision = this.gate.revision;
    const [irr, adm] = await Promise.all([
      this.api.irreducible(this.graph, revision),
      this.api.edgeAdmissible(this.graph, revision),
    ]);
    this.gate.accept(irr.revision, () => {
      this.irreducible = irr.ok ? irr.payload!.irreducible : null;
      if (!irr.ok) this.notice = irr.error;
    });
    this.gate.accept(adm.revision, () => {
      if (!adm.ok) {
        this.notice = adm.error;
        return;
      }
      this.applyAdmissibility(adm.payload!);
    });
  }

  private applyAdmissibility(payload: AdmissibilityPayload): void {
    this.admissible.clear();
    this.deletable.clear();
    for (const e of payload.absent) {
      this.admissible.set(edgeKey(e.tail, e.head), e.addable);
    }
    for (const e of payload.present) {
      this.deletable.set(edgeKey(e.tail, e.head), e.deletable);
    }
  }

  edgeStatus(tail: string, head: string): EdgeStatus {
    const key = edgeKey(tail, head);
    if (this.hasEdge(tail, head)) {
      const d = this.deletable.get(key);
      return d === undefined ? "unknown" : d ? "present-deletable" : "present-fixed";
    }
    const a = this.admissible.get(key);
    return a === undefined ? "unknown" : a ? "absent-addable" : "absent-inadmissible";
  }

  /** The class query runs only after the graph round-trips the service's
   * reduction check; a reducible graph blocks with a notice instead. */
  async exploreClass(page = 0): Promise<ClassPayload | null> {
    const revision = this.gate.revision;
    const red = await this.api.reduce(this.graph, revision);
    if (!red.ok) {
      this.notice = red.error;
      return null;
    }
    if (!red.payload!.was_irreducible) {
      this.gate.accept(red.revision, () => {
        this.notice = "graph is reducible; adopt the reduced form first";
      });
      return null;
    }
    const resp = await this.api.equivClass(this.graph, {
      offset: page * PAGE_SIZE,
      limit: PAGE_SIZE,
      revision,
    });
    if (!resp.ok) {
      this.notice = resp.error;
      return null;
    }
    this.gate.accept(resp.revision, () => {
      const payload = resp.payload!;
      if (!this.classCache) {
        this.classCache = {
          pages: new Map(),
          transitions: payload.transitions,
          total: payload.total,
          complete: payload.complete,
        };
      }
      this.classCache.pages.set(page, payload.members);
    });
    return resp.payload;
  }

  async loadPresentation(): Promise<PresentationPayload | null> {
    const revision = this.gate.revision;
    const resp = await this.api.present(this.graph, revision);
    if (!resp.ok) {
      this.notice = resp.error;
      return null;
    }
    this.gate.accept(resp.revision, () => {
      this.presentation = resp.payload;
    });
    return resp.payload;
  }

  showTransitionGraph(): boolean {
    return this.classCache !== null && this.classCache.total <= TRANSITION_GRAPH_CAP;
  }
}
