/**
 * Payload types for the composition service API.
 *
 * These mirror the JSON the service emits; formulas travel as text in the
 * shared syntax (`*` parallel, `+` optional, `~` negation/input).
 */

export type Side = "left" | "right";

export interface GraphNode {
  id: string;
  kind: "process" | "buffer" | "split" | "merge" | "input" | "output";
  role: string;
  label: string;
  process: string | null;
  formula: string | null;
  ports: Record<string, string>;
}

export interface GraphEdge {
  src: string;
  src_port: string;
  dst: string;
  dst_port: string;
  type: string;
  optional: boolean;
  cut: boolean;
}

export interface WorkflowGraph {
  nodes: GraphNode[];
  edges: GraphEdge[];
  boundary: { inputs: string[]; output: string };
  case_cones: Record<string, { left: string[]; right: string[] }>;
}

export interface ProcessSpec {
  name: string;
  sequent: string;
}

export interface ComposeSelections {
  priority?: Side[];
  input_p?: string | number;
  input_q?: string | number;
}

export interface ComposeRequest {
  action: "tensor" | "with" | "join";
  operands: [string, string];
  selections?: ComposeSelections;
  name?: string | null;
}

export interface CompositionSummary {
  id: string;
  name: string;
  spec: string;
  output: string;
  inputs: string[];
  components: string[];
  rules: Record<string, number>;
  verified: boolean;
}

export interface ComposeResponse {
  composition: CompositionSummary;
  graph: WorkflowGraph;
  revision: number;
}

export interface SimReport {
  branch_choices: Record<string, string>;
  consumed: Record<string, number>;
  produced: Record<string, number>;
  completed: boolean;
  step_count: number;
  output: string | null;
}

export interface ServiceErrorBody {
  code: string;
  message: string;
}
