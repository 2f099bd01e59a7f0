import { readFileSync } from "node:fs";

import { describe, expect, it } from "vitest";

import { buildDiagram, isOptionalEdge, processBoxes } from "../src/diagram";
import { renderSvg } from "../src/render";
import type { ComposeResponse, WorkflowGraph } from "../src/types";

function fixture<T>(name: string): T {
  return JSON.parse(readFileSync(new URL(`../fixtures/${name}`, import.meta.url), "utf8"));
}

const drug = fixture<ComposeResponse>("drug_response.json");
const row5 = fixture<WorkflowGraph>("row5_graph.json");

describe("diagram model", () => {
  it("keeps boundary fidelity with the composition spec", () => {
    const model = buildDiagram(drug.graph);
    expect(model.boundary.output).toBe(drug.composition.output);
    const inputLabels = model.nodes.filter((n) => n.kind === "input").map((n) => n.label).sort();
    const specInputs = drug.composition.inputs.map((t) => t.replace(/^~/, "")).sort();
    expect(inputLabels).toEqual(specInputs);
  });

  it("lays out left-to-right: sources at the left edge, output at the right", () => {
    const model = buildDiagram(drug.graph);
    const xsIn = model.nodes.filter((n) => n.kind === "input").map((n) => n.x);
    const out = model.nodes.find((n) => n.kind === "output")!;
    expect(Math.min(...xsIn)).toBeLessThan(out.x);
    for (const e of model.edges) {
      expect(e.x1).toBeLessThanOrEqual(e.x2);
    }
  });

  it("renders the drug workflow as two boxes plus triangles", () => {
    const model = buildDiagram(drug.graph);
    expect(processBoxes(model).map((n) => n.label).sort()).toEqual([
      "DeliverDrug",
      "Reassess",
    ]);
    expect(model.nodes.some((n) => n.shape === "triangle")).toBe(true);
  });

  it("classifies optional edges purely from + positions and matches the service", () => {
    for (const graph of [drug.graph, row5]) {
      const byId = new Map(graph.nodes.map((n) => [n.id, n]));
      for (const edge of graph.edges) {
        expect(isOptionalEdge(edge, byId)).toBe(edge.optional);
      }
    }
  });

  it("dashes both optional outcome branches of the delivery", () => {
    const model = buildDiagram(drug.graph);
    const dashed = model.edges.filter((e) => e.dashed).map((e) => e.type).sort();
    expect(dashed).toContain("Treated");
    expect(dashed).toContain("Failed");
    expect(dashed).toContain("Reassessed");
    const solid = model.edges.filter((e) => !e.dashed).map((e) => e.type);
    expect(solid).toContain("Patient");
    expect(solid).toContain("Treated+Failed");
  });

  it("renders the buffered-optional fixture with a buffer triangle on the C edge", () => {
    const model = buildDiagram(row5);
    const buffers = model.nodes.filter((n) => n.kind === "buffer").map((n) => n.label);
    expect(buffers).toContain("C");
    expect(model.nodes.filter((n) => n.kind === "process")).toHaveLength(2);
  });
});

describe("svg rendering", () => {
  it("draws boxes, triangles, and dashed optional branches", () => {
    const svg = renderSvg(buildDiagram(drug.graph));
    expect(svg).toContain("<svg");
    expect(svg).toContain('class="node process"');
    expect(svg).toContain("<polygon");
    expect(svg).toContain('stroke-dasharray="6 4"');
    expect(svg).toContain(">DeliverDrug</text>");
  });

  it("escapes labels", () => {
    const svg = renderSvg(buildDiagram(row5));
    expect(svg).not.toContain("<script");
  });
});
