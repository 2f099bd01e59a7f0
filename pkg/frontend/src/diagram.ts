/**
 * DiagramModel: the workflow graph plus layout and edge styling.
 *
 * Layout is left-to-right layered (longest path from the boundary inputs),
 * matching the dataflow reading: inputs on the left, the single composite
 * output on the right.  Nothing is persisted; positions are recomputed on
 * every render.
 *
 * Edge styling is a pure function of the formula's position under a `+`:
 * the variant edges of a decision station and the branch feeding an
 * injection station carry a formula that sits under the station's optional
 * type, so they render dashed; everything else is a required (solid) flow.
 * The classification is recomputed here from node/port types rather than
 * trusted from the wire.
 */

import type { GraphEdge, GraphNode, WorkflowGraph } from "./types";

export interface DiagramNode {
  id: string;
  kind: GraphNode["kind"];
  role: string;
  label: string;
  shape: "box" | "triangle" | "port";
  x: number;
  y: number;
  w: number;
  h: number;
  formula: string | null;
  process: string | null;
}

export interface DiagramEdge {
  from: string;
  to: string;
  type: string;
  dashed: boolean;
  cut: boolean;
  x1: number;
  y1: number;
  x2: number;
  y2: number;
}

export interface DiagramModel {
  nodes: DiagramNode[];
  edges: DiagramEdge[];
  boundary: { inputs: string[]; output: string };
  width: number;
  height: number;
}

const SHAPES: Record<GraphNode["kind"], DiagramNode["shape"]> = {
  process: "box",
  buffer: "triangle",
  split: "triangle",
  merge: "triangle",
  input: "port",
  output: "port",
};

const NODE_W: Record<DiagramNode["shape"], number> = { box: 120, triangle: 36, port: 80 };
const NODE_H: Record<DiagramNode["shape"], number> = { box: 48, triangle: 30, port: 20 };
const DX = 170;
const DY = 70;

/**
 * True when the edge's formula occupies an optional position: it is one
 * variant of an adjacent station whose type is a `+` of which the edge
 * carries a proper branch.
 */
export function isOptionalEdge(edge: GraphEdge, byId: Map<string, GraphNode>): boolean {
  const dst = byId.get(edge.dst);
  if (dst && dst.kind === "merge" && dst.role.startsWith("inject") && edge.dst_port === "in") {
    return true; // the branch flowing into L+R
  }
  const src = byId.get(edge.src);
  if (src && src.kind === "merge" && src.role === "case" && edge.src_port.startsWith("branch")) {
    return true; // the variant leaving a decision on ~(L+R)
  }
  return false;
}

function layer(graph: WorkflowGraph): Map<string, number> {
  const preds = new Map<string, string[]>();
  for (const n of graph.nodes) preds.set(n.id, []);
  for (const e of graph.edges) preds.get(e.dst)!.push(e.src);
  const depth = new Map<string, number>();
  const visit = (id: string): number => {
    const seen = depth.get(id);
    if (seen !== undefined) return seen;
    depth.set(id, 0); // placeholder; the graph is acyclic
    const d = Math.max(-1, ...preds.get(id)!.map(visit)) + 1;
    depth.set(id, d);
    return d;
  };
  for (const n of graph.nodes) visit(n.id);
  // push the boundary output to its own last column
  const maxd = Math.max(0, ...depth.values());
  for (const n of graph.nodes) if (n.kind === "output") depth.set(n.id, maxd);
  return depth;
}

export function buildDiagram(graph: WorkflowGraph): DiagramModel {
  const byId = new Map(graph.nodes.map((n) => [n.id, n]));
  const depth = layer(graph);
  const columns = new Map<number, string[]>();
  for (const n of graph.nodes) {
    const d = depth.get(n.id)!;
    if (!columns.has(d)) columns.set(d, []);
    columns.get(d)!.push(n.id);
  }
  const placed = new Map<string, DiagramNode>();
  const nodes: DiagramNode[] = [];
  for (const [d, ids] of [...columns.entries()].sort((a, b) => a[0] - b[0])) {
    ids.sort();
    ids.forEach((id, row) => {
      const g = byId.get(id)!;
      const shape = SHAPES[g.kind];
      const node: DiagramNode = {
        id,
        kind: g.kind,
        role: g.role,
        label: g.label,
        shape,
        x: 40 + d * DX,
        y: 40 + row * DY,
        w: NODE_W[shape],
        h: NODE_H[shape],
        formula: g.formula,
        process: g.process,
      };
      placed.set(id, node);
      nodes.push(node);
    });
  }
  const edges: DiagramEdge[] = graph.edges.map((e) => {
    const a = placed.get(e.src)!;
    const b = placed.get(e.dst)!;
    return {
      from: e.src,
      to: e.dst,
      type: e.type,
      dashed: isOptionalEdge(e, byId),
      cut: e.cut,
      x1: a.x + a.w,
      y1: a.y + a.h / 2,
      x2: b.x,
      y2: b.y + b.h / 2,
    };
  });
  const width = Math.max(...nodes.map((n) => n.x + n.w)) + 40;
  const height = Math.max(...nodes.map((n) => n.y + n.h)) + 40;
  return { nodes, edges, boundary: graph.boundary, width, height };
}

/** Process boxes in the diagram (one composite-output port each). */
export function processBoxes(model: DiagramModel): DiagramNode[] {
  return model.nodes.filter((n) => n.kind === "process");
}
