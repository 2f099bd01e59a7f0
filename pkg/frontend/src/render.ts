/**
 * SVG rendering of a DiagramModel.
 *
 * Processes are boxes, buffer/split/merge stations are the auxiliary
 * triangles, boundary ports are plain labels; optional flows are dashed.
 * The output is a plain SVG string so it renders identically in the
 * browser (via innerHTML) and in tests.
 */

import type { DiagramEdge, DiagramModel, DiagramNode } from "./diagram";

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

function nodeSvg(n: DiagramNode): string {
  const cx = n.x + n.w / 2;
  const title = n.formula ? `<title>${esc(n.formula)}</title>` : "";
  if (n.shape === "box") {
    return (
      `<g class="node process" data-id="${n.id}" data-process="${esc(n.process ?? "")}">` +
      `<rect x="${n.x}" y="${n.y}" width="${n.w}" height="${n.h}" rx="6"/>` +
      `<text x="${cx}" y="${n.y + n.h / 2 + 4}" text-anchor="middle">${esc(n.label)}</text>` +
      title +
      `</g>`
    );
  }
  if (n.shape === "triangle") {
    const pts = `${n.x},${n.y + n.h} ${n.x + n.w},${n.y + n.h} ${cx},${n.y}`;
    return (
      `<g class="node station ${n.role}" data-id="${n.id}">` +
      `<polygon points="${pts}"/>` +
      `<text x="${cx}" y="${n.y + n.h + 12}" text-anchor="middle" class="station-label">${esc(n.label)}</text>` +
      title +
      `</g>`
    );
  }
  const anchor = n.kind === "input" ? "end" : "start";
  return (
    `<g class="node boundary ${n.kind}" data-id="${n.id}">` +
    `<text x="${n.x + (n.kind === "input" ? n.w : 0)}" y="${n.y + 14}" text-anchor="${anchor}">${esc(n.label)}</text>` +
    `</g>`
  );
}

function edgeSvg(e: DiagramEdge): string {
  const dash = e.dashed ? ' stroke-dasharray="6 4" class="edge optional"' : ' class="edge"';
  const mx = (e.x1 + e.x2) / 2;
  return (
    `<g data-from="${e.from}" data-to="${e.to}">` +
    `<path d="M ${e.x1} ${e.y1} C ${mx} ${e.y1}, ${mx} ${e.y2}, ${e.x2} ${e.y2}"` +
    `${dash} fill="none" marker-end="url(#arrow)"/>` +
    `<text x="${mx}" y="${(e.y1 + e.y2) / 2 - 6}" text-anchor="middle" class="edge-label">${esc(e.type)}</text>` +
    `</g>`
  );
}

export function renderSvg(model: DiagramModel): string {
  const defs =
    `<defs><marker id="arrow" viewBox="0 0 10 10" refX="9" refY="5" ` +
    `markerWidth="7" markerHeight="7" orient="auto-start-reverse">` +
    `<path d="M 0 0 L 10 5 L 0 10 z"/></marker></defs>`;
  const parts = [
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${model.width} ${model.height}" ` +
      `width="${model.width}" height="${model.height}">`,
    defs,
    ...model.edges.map(edgeSvg),
    ...model.nodes.map(nodeSvg),
    `</svg>`,
  ];
  return parts.join("\n");
}
