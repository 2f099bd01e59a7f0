/**
 * Composer application: a single-session state machine over the service.
 *
 * Interaction model: selecting a stored process (or composition) opens its
 * detail panel, whose input edges and output-type breakdown are clickable;
 * two selections plus an action button emit one compose request.  At most
 * one request is in flight, actions are disabled until the reply arrives,
 * and every successful composition immediately re-renders as the current
 * diagram so it can feed the next step.  Service failures surface inline
 * with their machine-readable code next to the diagram.
 */

import { ServiceClient, ServiceError } from "./api";
import { buildDiagram } from "./diagram";
import { parseFormula, sequentInputs, subterms } from "./formula";
import { Gesture, gestureToRequest } from "./gestures";
import { renderSvg } from "./render";
import type { ProcessSpec, Side } from "./types";

interface OperandInfo {
  ref: string;
  sequent: string;
  output: string;
  inputs: string[];
}

class ComposerApp {
  private client: ServiceClient;
  private specs: ProcessSpec[] = [];
  private compositions: { id: string; spec: string; output: string }[] = [];
  private selections: Gesture[] = [];
  private inFlight = false;

  constructor(private root: HTMLElement, base: string) {
    this.client = new ServiceClient(base);
  }

  async start(): Promise<void> {
    this.root.innerHTML = `
      <div class="composer">
        <aside>
          <h2>Processes</h2>
          <form id="add-form">
            <input id="add-name" placeholder="name" required>
            <input id="add-seq" placeholder="~A, ~B, X*Y" required>
            <button>add</button>
          </form>
          <ul id="process-list"></ul>
          <h2>Compositions</h2>
          <ul id="composition-list"></ul>
        </aside>
        <main>
          <div id="selection-bar">
            <span id="selections">select two operands</span>
            <button id="act-tensor" disabled>tensor</button>
            <button id="act-with" disabled>with</button>
            <button id="act-join" disabled>join</button>
            <button id="act-clear">clear</button>
          </div>
          <div id="error" class="error" hidden></div>
          <div id="detail"></div>
          <div id="canvas"></div>
          <pre id="sim"></pre>
        </main>
      </div>`;
    this.el("add-form").addEventListener("submit", (ev) => {
      ev.preventDefault();
      void this.addProcess();
    });
    this.el("act-clear").addEventListener("click", () => {
      this.selections = [];
      this.sync();
    });
    for (const action of ["tensor", "with", "join"] as const) {
      this.el(`act-${action}`).addEventListener("click", () => void this.compose(action));
    }
    await this.refresh();
  }

  private el(id: string): HTMLElement {
    return this.root.querySelector(`#${id}`) as HTMLElement;
  }

  private async refresh(): Promise<void> {
    const listing = await this.client.listProcesses();
    this.specs = listing.processes;
    const list = this.el("process-list");
    list.innerHTML = "";
    for (const spec of this.specs) {
      const li = document.createElement("li");
      li.textContent = `${spec.name}: |- ${spec.sequent}`;
      li.addEventListener("click", () => this.openDetail(this.operandOf(spec.name)));
      list.appendChild(li);
    }
    const clist = this.el("composition-list");
    clist.innerHTML = "";
    for (const comp of this.compositions) {
      const li = document.createElement("li");
      li.textContent = `${comp.id}: ${comp.output}`;
      li.addEventListener("click", () => this.openDetail(this.operandOf(comp.id)));
      clist.appendChild(li);
    }
    this.sync();
  }

  private operandOf(ref: string): OperandInfo {
    const comp = this.compositions.find((c) => c.id === ref);
    const sequent = comp ? comp.spec : this.specs.find((s) => s.name === ref)!.sequent;
    const members = sequent.split(",").map((s) => s.trim());
    const inputs = sequentInputs(sequent);
    const output = members.find((m) => !inputs.includes(m))!;
    return { ref, sequent, output, inputs };
  }

  /** Detail panel: clickable box, input edges, and output-type breakdown. */
  private openDetail(op: OperandInfo): void {
    const detail = this.el("detail");
    const items = subterms(parseFormula(op.output))
      .map(
        (s, i) =>
          `<button class="subterm" data-i="${i}" data-path="${s.path.join(",")}">` +
          `${s.optional ? "◌ " : ""}${s.text}</button>`,
      )
      .join(" ");
    const inputs = op.inputs
      .map((text, i) => `<button class="input-edge" data-i="${i}" data-text="${text}">${text}</button>`)
      .join(" ");
    detail.innerHTML = `
      <h3><button id="pick-box">${op.ref}</button> |- ${op.sequent}</h3>
      <div>inputs: ${inputs || "(none)"}</div>
      <div>output breakdown: ${items}</div>`;
    (detail.querySelector("#pick-box") as HTMLElement).addEventListener("click", () =>
      this.pick({ kind: "box", ref: op.ref }),
    );
    detail.querySelectorAll(".input-edge").forEach((b) =>
      b.addEventListener("click", () =>
        this.pick({ kind: "input", ref: op.ref, input: (b as HTMLElement).dataset.text! }),
      ),
    );
    detail.querySelectorAll(".subterm").forEach((b) =>
      b.addEventListener("click", () => {
        const raw = (b as HTMLElement).dataset.path!;
        const path = raw === "" ? [] : (raw.split(",") as Side[]);
        this.pick({ kind: "output", ref: op.ref, path });
      }),
    );
  }

  private pick(g: Gesture): void {
    if (this.selections.length >= 2) this.selections = [];
    this.selections.push(g);
    this.sync();
  }

  private sync(): void {
    const describe = (g: Gesture) =>
      g.kind === "box"
        ? g.ref
        : g.kind === "input"
          ? `${g.ref}:${g.input}`
          : `${g.ref}:out/${g.path.join("/") || "whole"}`;
    this.el("selections").textContent =
      this.selections.map(describe).join("  +  ") || "select two operands";
    const ready = this.selections.length === 2 && !this.inFlight;
    for (const action of ["tensor", "with", "join"]) {
      (this.el(`act-${action}`) as HTMLButtonElement).disabled = !ready;
    }
  }

  private async addProcess(): Promise<void> {
    const name = (this.el("add-name") as HTMLInputElement).value.trim();
    const seq = (this.el("add-seq") as HTMLInputElement).value.trim();
    try {
      await this.client.addProcess(name, seq);
      this.showError(null);
      await this.refresh();
    } catch (e) {
      this.showError(e);
    }
  }

  private async compose(action: "tensor" | "with" | "join"): Promise<void> {
    if (this.selections.length !== 2 || this.inFlight) return;
    this.inFlight = true;
    this.sync();
    try {
      const request = gestureToRequest(action, this.selections[0], this.selections[1]);
      const response = await this.client.compose(request);
      this.compositions.push({
        id: response.composition.id,
        spec: response.composition.spec,
        output: response.composition.output,
      });
      this.selections = [];
      this.showError(null);
      this.el("canvas").innerHTML = renderSvg(buildDiagram(response.graph));
      this.attachSimulate(response.composition.id);
      await this.refresh();
    } catch (e) {
      this.showError(e);
    } finally {
      this.inFlight = false;
      this.sync();
    }
  }

  private attachSimulate(id: string): void {
    const sim = this.el("sim");
    sim.textContent = "";
    const btn = document.createElement("button");
    btn.textContent = `simulate ${id}`;
    btn.addEventListener("click", async () => {
      const out = await this.client.simulate(id);
      sim.textContent = out.reports
        .map(
          (r) =>
            `${r.completed ? "completed" : "DEADLOCK"} choices=${JSON.stringify(r.branch_choices)} ` +
            `consumed=${JSON.stringify(r.consumed)} produced=${JSON.stringify(r.produced)}`,
        )
        .join("\n");
    });
    sim.before(btn);
  }

  private showError(e: unknown): void {
    const banner = this.el("error");
    if (e == null) {
      banner.hidden = true;
      return;
    }
    banner.hidden = false;
    banner.textContent =
      e instanceof ServiceError ? `[${e.code}] ${e.message}` : String(e);
  }
}

export function mount(root: HTMLElement, base = ""): Promise<void> {
  return new ComposerApp(root, base).start();
}
