/**
 * Mouse gestures to compose requests.
 *
 * The composer's interaction grammar:
 *   - click two process boxes, choose "tensor"          -> parallel
 *   - click an output subterm (via the type-breakdown popover) of one
 *     process, then an input edge of another, choose "join" -> sequential,
 *     with the clicked subterm's path as the priority
 *   - click an input edge of each process, choose "with" -> conditional
 *
 * Selections carry the operand reference (stored name or composition id)
 * plus what was clicked; this module turns a pair of them into the exact
 * `POST /compose` body.
 */

import type { ComposeRequest, Side } from "./types";

export type Gesture =
  | { kind: "box"; ref: string }
  | { kind: "output"; ref: string; path: Side[] }
  | { kind: "input"; ref: string; input: string };

export class GestureError extends Error {}

export function gestureToRequest(
  action: "tensor" | "with" | "join",
  first: Gesture,
  second: Gesture,
): ComposeRequest {
  if (action === "tensor") {
    return { action, operands: [first.ref, second.ref], name: null };
  }
  if (action === "join") {
    if (first.kind !== "output") {
      throw new GestureError("join starts from an output subterm of the producer");
    }
    if (second.kind !== "input") {
      throw new GestureError("join ends on an input of the consumer");
    }
    const selections: ComposeRequest["selections"] = { input_q: second.input };
    if (first.path.length > 0) {
      selections.priority = first.path;
    }
    return { action, operands: [first.ref, second.ref], selections, name: null };
  }
  if (first.kind !== "input" || second.kind !== "input") {
    throw new GestureError("conditional composition selects one input on each process");
  }
  return {
    action,
    operands: [first.ref, second.ref],
    selections: { input_p: first.input, input_q: second.input },
    name: null,
  };
}
