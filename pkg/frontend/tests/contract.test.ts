/** Contract tests against a live service: the editor's admissibility
 * coloring, the class gallery with its transition structure, the
 * presentation overlay, and the stale-revision discard guarantee. */

import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient, FetchLike, GraphData } from "../src/api.js";
import { EditorState, PAGE_SIZE } from "../src/model.js";
import {
  renderGallery,
  renderPresentationSVG,
  renderTransitionGraph,
  transitionLinks,
} from "../src/render.js";
import { RunningService, startService } from "./service.js";

const REFERENCE_FIVE_VERTEX: GraphData = {
  vertices: ["L1", "L2", "X1", "X2", "X3"],
  latent: ["L1", "L2"],
  edges: [
    ["L1", "X1"],
    ["L1", "X2"],
    ["L2", "X2"],
    ["L2", "X3"],
    ["X2", "X3"],
  ],
};

const REFERENCE_FOUR_VERTEX: GraphData = {
  vertices: ["L", "X1", "X2", "X3"],
  latent: ["L"],
  edges: [
    ["L", "X1"],
    ["L", "X3"],
    ["X2", "L"],
    ["X3", "X1"],
    ["X3", "X2"],
  ],
};

let service: RunningService;

beforeAll(async () => {
  service = await startService(8876);
}, 45_000);

afterAll(() => {
  service?.stop();
});

describe("editor admissibility against the live service", () => {
  it("colors X2->L2 admissible and X2->L1 inadmissible", async () => {
    const api = new ApiClient(service.baseUrl);
    const state = new EditorState(api, REFERENCE_FIVE_VERTEX);
    await state.refresh();
    expect(state.irreducible).toBe(true);
    expect(state.edgeStatus("X2", "L2")).toBe("absent-addable");
    expect(state.edgeStatus("X2", "L1")).toBe("absent-inadmissible");
    // present edges carry live deletability too
    expect(["present-deletable", "present-fixed"]).toContain(
      state.edgeStatus("X2", "X3"),
    );
  }, 30_000);
});

describe("class gallery", () => {
  it("renders 10 thumbnails with 7 edit links and 8 reversal links", async () => {
    const api = new ApiClient(service.baseUrl);
    const state = new EditorState(api, REFERENCE_FOUR_VERTEX);
    const payload = await state.exploreClass(0);
    expect(payload).not.toBeNull();
    expect(payload!.total).toBe(10);
    const members = state.classCache!.pages.get(0)!;
    expect(members.length).toBe(10);
    expect(PAGE_SIZE).toBe(24);

    const gallery = renderGallery(members, 0);
    expect(gallery.match(/<figure class="member">/g)?.length).toBe(10);

    const links = transitionLinks(state.classCache!.transitions);
    expect(links.filter((l) => l.kind === "edge").length).toBe(7);
    expect(links.filter((l) => l.kind === "reversal").length).toBe(8);

    expect(state.showTransitionGraph()).toBe(true);
    const svg = renderTransitionGraph(payload!.total, state.classCache!.transitions);
    expect(svg.match(/class="link link-edit"/g)?.length).toBe(7);
    expect(svg.match(/class="link link-reversal"/g)?.length).toBe(8);
  }, 30_000);

  it("refuses class queries for reducible graphs", async () => {
    const api = new ApiClient(service.baseUrl);
    const reducible: GraphData = {
      vertices: ["L1", "X1", "X2"],
      latent: ["L1"],
      edges: [["L1", "X1"]],
    };
    const state = new EditorState(api, reducible);
    const payload = await state.exploreClass(0);
    expect(payload).toBeNull();
    expect(state.notice).toContain("reducible");
  }, 30_000);
});

describe("presentation overlay", () => {
  it("renders 4 solid and 2 dashed edges for the five-vertex example", async () => {
    const api = new ApiClient(service.baseUrl);
    const state = new EditorState(api, REFERENCE_FIVE_VERTEX);
    const payload = await state.loadPresentation();
    expect(payload).not.toBeNull();
    expect(payload!.solid.length).toBe(4);
    expect(payload!.dashed.length).toBe(2);
    const svg = renderPresentationSVG(payload!);
    expect(svg.match(/edge edge-solid/g)?.length).toBe(4);
    expect(svg.match(/edge edge-dashed/g)?.length).toBe(2);
  }, 30_000);
});

describe("revision gating", () => {
  it("provably discards a delayed stale response", async () => {
    // hold the first admissibility response hostage until after an edit
    // and a fresh refresh have landed, then release it
    let release: (() => void) | null = null;
    const held = new Promise<void>((resolve) => {
      release = resolve;
    });
    let holdNext = false;
    const delayedFetch: FetchLike = async (url, init) => {
      const resp = await fetch(url, init);
      if (holdNext && String(url).endsWith("/edge/admissible")) {
        holdNext = false;
        await held;
      }
      return resp;
    };
    const api = new ApiClient(service.baseUrl, delayedFetch);
    const state = new EditorState(api, REFERENCE_FIVE_VERTEX);

    holdNext = true;
    const stale = state.refresh();          // revision r, response delayed
    state.addEdge("X2", "L2");              // bump to r+1
    await state.refresh();                  // fresh verdicts for r+1
    expect(state.edgeStatus("X2", "L2")).toBe("present-deletable");
    const appliedBefore = state.gate.applied;

    release!();
    await stale;                            // stale response finally arrives
    expect(state.gate.discarded).toBeGreaterThan(0);
    // the late answer (for the pre-edit graph, where X2->L2 was absent)
    // must not have overwritten the current verdicts
    expect(state.edgeStatus("X2", "L2")).toBe("present-deletable");
    expect(state.gate.applied).toBe(appliedBefore);
  }, 30_000);
});
