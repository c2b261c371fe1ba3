/** Thin typed client for the chat service HTTP API. */

import type { ChatTurn, SchemaInfo, VizGraph } from "./types.js";

export class ApiError extends Error {
  constructor(
    message: string,
    public readonly status: number | null,
  ) {
    super(message);
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ChatApi {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetcher: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let response: Response;
    try {
      response = await this.fetcher(`${this.baseUrl}${path}`, init);
    } catch (err) {
      throw new ApiError(`network failure: ${String(err)}`, null);
    }
    if (!response.ok) {
      let detail = response.statusText;
      try {
        const body = (await response.json()) as { detail?: string };
        if (body.detail) detail = body.detail;
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(detail, response.status);
    }
    return (await response.json()) as T;
  }

  chat(sessionId: string, question: string): Promise<ChatTurn> {
    return this.request<ChatTurn>("/api/chat", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ session_id: sessionId, question }),
    });
  }

  session(sessionId: string): Promise<{ turns: ChatTurn[] }> {
    return this.request(`/api/session/${encodeURIComponent(sessionId)}`);
  }

  schema(): Promise<SchemaInfo> {
    return this.request("/api/schema");
  }

  subgraph(ids: string[]): Promise<VizGraph> {
    return this.request(`/api/subgraph?ids=${encodeURIComponent(ids.join(","))}`);
  }

  health(): Promise<{ status: string; nodes: number; edges: number }> {
    return this.request("/api/health");
  }
}
