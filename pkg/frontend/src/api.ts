/**
 * Thin typed client for the composition service.
 *
 * Failures surface as ServiceError carrying the machine-readable code the
 * service returns ("no_matching_input", "priority_unmatchable", ...), which
 * the app renders as inline diagram annotations.
 */

import type {
  ComposeRequest,
  ComposeResponse,
  ProcessSpec,
  ServiceErrorBody,
  SimReport,
  WorkflowGraph,
} from "./types";

export class ServiceError extends Error {
  constructor(readonly code: string, message: string, readonly status: number) {
    super(message);
  }
}

async function unwrap<T>(res: Response): Promise<T> {
  if (res.ok) {
    return (await res.json()) as T;
  }
  let body: ServiceErrorBody | null = null;
  try {
    body = (await res.json()) as ServiceErrorBody;
  } catch {
    // non-JSON error body
  }
  throw new ServiceError(body?.code ?? "http_error", body?.message ?? res.statusText, res.status);
}

export class ServiceClient {
  constructor(private base: string = "") {}

  private url(path: string): string {
    return `${this.base}${path}`;
  }

  async listProcesses(): Promise<{ revision: number; processes: ProcessSpec[] }> {
    return unwrap(await fetch(this.url("/processes")));
  }

  async addProcess(name: string, sequent: string): Promise<ProcessSpec> {
    return unwrap(
      await fetch(this.url("/processes"), {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify({ name, sequent }),
      }),
    );
  }

  async compose(request: ComposeRequest): Promise<ComposeResponse> {
    return unwrap(
      await fetch(this.url("/compose"), {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify(request),
      }),
    );
  }

  async graph(compositionId: string): Promise<WorkflowGraph> {
    return unwrap(await fetch(this.url(`/compositions/${compositionId}/graph`)));
  }

  async simulate(compositionId: string): Promise<{ id: string; reports: SimReport[] }> {
    return unwrap(
      await fetch(this.url(`/compositions/${compositionId}/simulate`), {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify({}),
      }),
    );
  }
}
