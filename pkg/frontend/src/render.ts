/** Pure SVG builders: graph thumbnails (squares for latents, circles for
 * observed, dashed strokes for removable edges), the class gallery, and
 * the transition graph with solid edit links and dashed reversal links. */

import { GraphData, PresentationPayload, TransitionData } from "./api.js";
import { edgeKey } from "./model.js";

export interface Point {
  x: number;
  y: number;
}

export function circleLayout(labels: string[], size: number): Map<string, Point> {
  const out = new Map<string, Point>();
  const r = size * 0.38;
  const cx = size / 2;
  const cy = size / 2;
  labels.forEach((label, i) => {
    const angle = (2 * Math.PI * i) / labels.length - Math.PI / 2;
    out.set(label, { x: cx + r * Math.cos(angle), y: cy + r * Math.sin(angle) });
  });
  return out;
}

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

function arrow(a: Point, b: Point, cls: string, curved: boolean): string {
  const dx = b.x - a.x;
  const dy = b.y - a.y;
  const len = Math.hypot(dx, dy) || 1;
  const ux = dx / len;
  const uy = dy / len;
  const pad = 11;
  const sx = a.x + ux * pad;
  const sy = a.y + uy * pad;
  const ex = b.x - ux * pad;
  const ey = b.y - uy * pad;
  if (!curved) {
    return `<line class="${cls}" x1="${sx.toFixed(1)}" y1="${sy.toFixed(1)}" ` +
      `x2="${ex.toFixed(1)}" y2="${ey.toFixed(1)}" marker-end="url(#arrow)"/>`;
  }
  const mx = (sx + ex) / 2 - uy * 10;
  const my = (sy + ey) / 2 + ux * 10;
  return `<path class="${cls}" d="M ${sx.toFixed(1)} ${sy.toFixed(1)} ` +
    `Q ${mx.toFixed(1)} ${my.toFixed(1)} ${ex.toFixed(1)} ${ey.toFixed(1)}" ` +
    `fill="none" marker-end="url(#arrow)"/>`;
}

export interface RenderOptions {
  size?: number;
  solid?: Set<string>;
  dashed?: Set<string>;
  edgeClasses?: Map<string, string>;
  title?: string;
}

export function renderGraphSVG(graph: GraphData, opts: RenderOptions = {}): string {
  const size = opts.size ?? 160;
  const pos = circleLayout(graph.vertices, size);
  const latent = new Set(graph.latent);
  const parts: string[] = [];
  parts.push(
    `<svg class="graph-thumb" viewBox="0 0 ${size} ${size}" xmlns="http://www.w3.org/2000/svg">`,
    `<defs><marker id="arrow" viewBox="0 0 10 10" refX="9" refY="5" ` +
      `markerWidth="6" markerHeight="6" orient="auto-start-reverse">` +
      `<path d="M 0 0 L 10 5 L 0 10 z"/></marker></defs>`,
  );
  if (opts.title) {
    parts.push(`<title>${esc(opts.title)}</title>`);
  }
  const pairs = new Set(graph.edges.map((e) => edgeKey(e[0], e[1])));
  for (const [tail, head] of graph.edges) {
    const key = edgeKey(tail, head);
    let cls = opts.edgeClasses?.get(key) ?? "edge";
    if (opts.solid?.has(key)) cls = "edge edge-solid";
    else if (opts.dashed?.has(key)) cls = "edge edge-dashed";
    const curved = pairs.has(edgeKey(head, tail));
    parts.push(arrow(pos.get(tail)!, pos.get(head)!, cls, curved));
  }
  for (const v of graph.vertices) {
    const p = pos.get(v)!;
    if (latent.has(v)) {
      parts.push(
        `<rect class="vertex vertex-latent" x="${(p.x - 9).toFixed(1)}" ` +
          `y="${(p.y - 9).toFixed(1)}" width="18" height="18"/>`,
      );
    } else {
      parts.push(
        `<circle class="vertex vertex-observed" cx="${p.x.toFixed(1)}" ` +
          `cy="${p.y.toFixed(1)}" r="10"/>`,
      );
    }
    parts.push(
      `<text class="vertex-label" x="${p.x.toFixed(1)}" y="${(p.y + 3).toFixed(1)}" ` +
        `text-anchor="middle">${esc(v)}</text>`,
    );
  }
  parts.push("</svg>");
  return parts.join("");
}

export function renderPresentationSVG(p: PresentationPayload, size = 220): string {
  const solid = new Set(p.solid.map((e) => edgeKey(e[0], e[1])));
  const dashed = new Set(p.dashed.map((e) => edgeKey(e[0], e[1])));
  return renderGraphSVG(p.base, { size, solid, dashed, title: "presentation" });
}

export function renderGallery(members: GraphData[], offset: number): string {
  const cells = members.map(
    (m, i) =>
      `<figure class="member"><figcaption>#${offset + i + 1}</figcaption>` +
      renderGraphSVG(m, { size: 150 }) +
      `</figure>`,
  );
  return `<div class="gallery">${cells.join("")}</div>`;
}

export interface UndirectedLink {
  a: number;
  b: number;
  kind: "edge" | "reversal";
}

/** Collapse directed add/del transitions into undirected links. */
export function transitionLinks(transitions: TransitionData[]): UndirectedLink[] {
  const seen = new Map<string, UndirectedLink>();
  for (const t of transitions) {
    const kind = t.kind === "reversal" ? "reversal" : "edge";
    const a = Math.min(t.from_index, t.to_index);
    const b = Math.max(t.from_index, t.to_index);
    seen.set(`${a}|${b}|${kind}`, { a, b, kind });
  }
  return [...seen.values()].sort(
    (u, v) => u.a - v.a || u.b - v.b || u.kind.localeCompare(v.kind),
  );
}

export function renderTransitionGraph(
  memberCount: number,
  transitions: TransitionData[],
  size = 320,
): string {
  const links = transitionLinks(transitions);
  const labels = Array.from({ length: memberCount }, (_, i) => `${i + 1}`);
  const pos = circleLayout(labels, size);
  const parts = [
    `<svg class="transition-graph" viewBox="0 0 ${size} ${size}" ` +
      `xmlns="http://www.w3.org/2000/svg">`,
  ];
  for (const link of links) {
    const a = pos.get(labels[link.a]!)!;
    const b = pos.get(labels[link.b]!)!;
    const cls = link.kind === "edge" ? "link link-edit" : "link link-reversal";
    const dash = link.kind === "reversal" ? ` stroke-dasharray="5 4"` : "";
    parts.push(
      `<line class="${cls}" x1="${a.x.toFixed(1)}" y1="${a.y.toFixed(1)}" ` +
        `x2="${b.x.toFixed(1)}" y2="${b.y.toFixed(1)}"${dash}/>`,
    );
  }
  for (const label of labels) {
    const p = pos.get(label)!;
    parts.push(
      `<circle class="member-node" cx="${p.x.toFixed(1)}" cy="${p.y.toFixed(1)}" r="11"/>`,
      `<text class="member-label" x="${p.x.toFixed(1)}" y="${(p.y + 3).toFixed(1)}" ` +
        `text-anchor="middle">${label}</text>`,
    );
  }
  parts.push("</svg>");
  return parts.join("");
}

export function renderClassSummary(total: number, complete: boolean): string {
  const note = complete ? "" : " (partial: budget hit)";
  return `<p class="class-summary">${total} members${note}; transition graph ` +
    `omitted above 200 members.</p>`;
}
