/**
 * Formula text syntax: parsing and structural helpers for the composer.
 *
 * The diagram needs just enough formula structure to (a) break an output
 * type into clickable subterms with their left/right paths for the
 * priority popover, and (b) decide which positions sit under a `+` and so
 * render as optional (dashed).
 *
 * Grammar (shared with the service):
 *   formula := term ('+' term)*      left-associative
 *   term    := factor ('*' factor)*  left-associative, binds tighter
 *   factor  := '~' factor | '(' formula ')' | identifier
 */

import type { Side } from "./types";

export type Formula =
  | { kind: "atom"; name: string }
  | { kind: "natom"; name: string }
  | { kind: "tensor"; l: Formula; r: Formula }
  | { kind: "plus"; l: Formula; r: Formula }
  | { kind: "par"; l: Formula; r: Formula }
  | { kind: "with"; l: Formula; r: Formula };

export class FormulaSyntaxError extends Error {
  constructor(message: string, readonly position: number) {
    super(`${message} (at ${position})`);
  }
}

type Token = { kind: string; pos: number; text?: string };

function tokenize(text: string): Token[] {
  const tokens: Token[] = [];
  let i = 0;
  while (i < text.length) {
    const c = text[i];
    if (c === " " || c === "\t" || c === "\n") {
      i++;
      continue;
    }
    if ("~*+(),".includes(c)) {
      tokens.push({ kind: c, pos: i });
      i++;
      continue;
    }
    if (/[A-Za-z_]/.test(c)) {
      let j = i + 1;
      while (j < text.length && /[A-Za-z0-9_]/.test(text[j])) j++;
      tokens.push({ kind: "ident", pos: i, text: text.slice(i, j) });
      i = j;
      continue;
    }
    throw new FormulaSyntaxError(`unexpected character '${c}'`, i);
  }
  tokens.push({ kind: "end", pos: text.length });
  return tokens;
}

export function dual(f: Formula): Formula {
  switch (f.kind) {
    case "atom":
      return { kind: "natom", name: f.name };
    case "natom":
      return { kind: "atom", name: f.name };
    case "tensor":
      return { kind: "par", l: dual(f.l), r: dual(f.r) };
    case "par":
      return { kind: "tensor", l: dual(f.l), r: dual(f.r) };
    case "plus":
      return { kind: "with", l: dual(f.l), r: dual(f.r) };
    case "with":
      return { kind: "plus", l: dual(f.l), r: dual(f.r) };
  }
}

class Parser {
  private pos = 0;
  constructor(private tokens: Token[]) {}

  private peek(): Token {
    return this.tokens[this.pos];
  }

  private next(): Token {
    return this.tokens[this.pos++];
  }

  formula(): Formula {
    let f = this.term();
    while (this.peek().kind === "+") {
      this.next();
      f = { kind: "plus", l: f, r: this.term() };
    }
    return f;
  }

  private term(): Formula {
    let f = this.factor();
    while (this.peek().kind === "*") {
      this.next();
      f = { kind: "tensor", l: f, r: this.factor() };
    }
    return f;
  }

  private factor(): Formula {
    const t = this.next();
    if (t.kind === "~") return dual(this.factor());
    if (t.kind === "(") {
      const f = this.formula();
      const close = this.next();
      if (close.kind !== ")") throw new FormulaSyntaxError("expected ')'", close.pos);
      return f;
    }
    if (t.kind === "ident") return { kind: "atom", name: t.text! };
    throw new FormulaSyntaxError(`unexpected token '${t.kind}'`, t.pos);
  }

  finish<T>(value: T): T {
    const t = this.peek();
    if (t.kind !== "end") throw new FormulaSyntaxError("trailing input", t.pos);
    return value;
  }
}

export function parseFormula(text: string): Formula {
  const p = new Parser(tokenize(text));
  return p.finish(p.formula());
}

const PREC: Record<string, number> = { plus: 1, with: 1, tensor: 2, par: 2 };

export function formatFormula(f: Formula): string {
  return fmt(f, 0, false);
}

function fmt(f: Formula, parentPrec: number, rightChild: boolean): string {
  if (f.kind === "atom") return f.name;
  if (f.kind === "natom" || f.kind === "par" || f.kind === "with") {
    const inner = dual(f);
    return inner.kind === "atom" ? `~${inner.name}` : `~(${fmt(inner, 0, false)})`;
  }
  const op = f.kind === "tensor" ? "*" : "+";
  const prec = PREC[f.kind];
  const s = `${fmt(f.l, prec, false)}${op}${fmt(f.r, prec, true)}`;
  return prec < parentPrec || (prec === parentPrec && rightChild) ? `(${s})` : s;
}

export interface Subterm {
  path: Side[];
  text: string;
  /** true when this position sits under at least one `+` above it */
  optional: boolean;
}

/**
 * Every subterm of an output type with its path, preorder.  This drives
 * the priority popover: clicking an entry selects that subterm.
 */
export function subterms(f: Formula): Subterm[] {
  const out: Subterm[] = [];
  const walk = (node: Formula, path: Side[], optional: boolean) => {
    out.push({ path: [...path], text: formatFormula(node), optional });
    if (node.kind === "tensor" || node.kind === "plus") {
      const childOptional = optional || node.kind === "plus";
      walk(node.l, [...path, "left"], childOptional);
      walk(node.r, [...path, "right"], childOptional);
    }
  };
  walk(f, [], false);
  return out;
}

export function subtermAt(f: Formula, path: Side[]): Formula {
  let cur = f;
  for (const step of path) {
    if (cur.kind !== "tensor" && cur.kind !== "plus" && cur.kind !== "par" && cur.kind !== "with") {
      throw new Error(`path descends below a leaf of ${formatFormula(f)}`);
    }
    cur = step === "left" ? cur.l : cur.r;
  }
  return cur;
}

/** The inputs of a sequent (text form), i.e. every negative member. */
export function sequentInputs(sequent: string): string[] {
  return sequent
    .split(",")
    .map((s) => s.trim())
    .filter((s) => {
      const f = parseFormula(s);
      return f.kind === "natom" || f.kind === "par" || f.kind === "with";
    });
}
