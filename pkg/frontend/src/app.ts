/** DOM wiring for the explorer: edit the graph, see live irreducibility
 * and admissibility, page through the class, toggle the presentation. */

import { ApiClient, GraphData } from "./api.js";
import { EditorState, PAGE_SIZE, edgeKey } from "./model.js";
import {
  renderClassSummary,
  renderGallery,
  renderGraphSVG,
  renderPresentationSVG,
  renderTransitionGraph,
} from "./render.js";

const DEFAULT_GRAPH: GraphData = {
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

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

export function startApp(): void {
  const base = (el<HTMLInputElement>("service-url").value || "http://127.0.0.1:8321");
  const api = new ApiClient(base);
  const state = new EditorState(api, DEFAULT_GRAPH);
  let page = 0;

  const graphBox = el<HTMLTextAreaElement>("graph-json");
  const canvas = el<HTMLDivElement>("canvas");
  const statusLine = el<HTMLDivElement>("status");
  const edgeTable = el<HTMLDivElement>("edge-table");
  const gallery = el<HTMLDivElement>("gallery");
  const presentationBox = el<HTMLDivElement>("presentation");

  function renderEditor(): void {
    graphBox.value = JSON.stringify(state.graph, null, 2);
    const edgeClasses = new Map<string, string>();
    for (const [t, h] of state.graph.edges) {
      const status = state.edgeStatus(t, h);
      edgeClasses.set(edgeKey(t, h), `edge edge-${status}`);
    }
    canvas.innerHTML = renderGraphSVG(state.graph, { size: 260, edgeClasses });
    const irr = state.irreducible === null ? "…"
      : state.irreducible ? "irreducible" : "reducible";
    statusLine.textContent =
      `rev ${state.gate.revision} — ${irr}` +
      (state.notice ? ` — ${state.notice}` : "");

    const rows: string[] = [];
    for (const tail of state.graph.vertices) {
      for (const head of state.graph.vertices) {
        if (tail === head) continue;
        const status = state.edgeStatus(tail, head);
        const present = state.hasEdge(tail, head);
        const action = present ? "delete" : "add";
        rows.push(
          `<tr class="${status}"><td>${tail}&rarr;${head}</td>` +
            `<td>${status}</td>` +
            `<td><button data-action="${action}" data-tail="${tail}" ` +
            `data-head="${head}">${action}</button></td></tr>`,
        );
      }
    }
    edgeTable.innerHTML =
      `<table><thead><tr><th>edge</th><th>admissibility</th><th></th></tr></thead>` +
      `<tbody>${rows.join("")}</tbody></table>`;
  }

  async function refresh(): Promise<void> {
    renderEditor();
    await state.refresh();
    renderEditor();
  }

  edgeTable.addEventListener("click", (ev) => {
    const btn = ev.target as HTMLElement;
    if (btn.tagName !== "BUTTON") return;
    const tail = btn.dataset.tail!;
    const head = btn.dataset.head!;
    if (btn.dataset.action === "add") state.addEdge(tail, head);
    else state.removeEdge(tail, head);
    void refresh();
  });

  el<HTMLButtonElement>("load-graph").addEventListener("click", () => {
    try {
      state.loadGraph(JSON.parse(graphBox.value) as GraphData);
      void refresh();
    } catch (err) {
      statusLine.textContent = `invalid graph JSON: ${err}`;
    }
  });

  el<HTMLButtonElement>("export-graph").addEventListener("click", () => {
    const blob = new Blob([JSON.stringify(state.graph, null, 2) + "\n"], {
      type: "application/json",
    });
    const a = document.createElement("a");
    a.href = URL.createObjectURL(blob);
    a.download = "model.graph";
    a.click();
  });

  async function showClass(): Promise<void> {
    const payload = await state.exploreClass(page);
    renderEditor();
    if (!payload || !state.classCache) {
      gallery.innerHTML = "";
      return;
    }
    const pages = Math.ceil(payload.total / PAGE_SIZE);
    const members = state.classCache.pages.get(page) ?? [];
    const graphPart = state.showTransitionGraph()
      ? renderTransitionGraph(payload.total, state.classCache.transitions)
      : renderClassSummary(payload.total, payload.complete);
    gallery.innerHTML =
      `<p>${payload.total} members, page ${page + 1}/${pages}</p>` +
      renderGallery(members, page * PAGE_SIZE) +
      graphPart;
  }

  el<HTMLButtonElement>("explore-class").addEventListener("click", () => {
    page = 0;
    void showClass();
  });
  el<HTMLButtonElement>("next-page").addEventListener("click", () => {
    page += 1;
    void showClass();
  });
  el<HTMLButtonElement>("prev-page").addEventListener("click", () => {
    page = Math.max(0, page - 1);
    void showClass();
  });

  el<HTMLButtonElement>("show-presentation").addEventListener("click", async () => {
    const payload = await state.loadPresentation();
    renderEditor();
    presentationBox.innerHTML = payload
      ? renderPresentationSVG(payload)
      : "";
  });

  void refresh();
}

if (typeof document !== "undefined" && document.getElementById("canvas")) {
  startApp();
}
