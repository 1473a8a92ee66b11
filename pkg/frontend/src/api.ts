/**
 * Typed client for the intervention service. Every number shown in the UI
 * comes from these payloads; the client never derives rewards or posterior
 * values itself.
 */

import type {
  AckPayload,
  ResponseToken,
  SessionPayload,
  StatePayload,
  SuggestionPayload,
} from "./types.js";

/** Network-level failure: the service did not answer at all. */
export class ServiceUnreachableError extends Error {
  constructor(cause: unknown) {
    super("service unreachable");
    this.name = "ServiceUnreachableError";
    this.cause = cause;
  }
}

/** The service answered with a non-2xx status. */
export class ApiError extends Error {
  constructor(
    public readonly status: number,
    detail: string,
  ) {
    super(detail);
    this.name = "ApiError";
  }
}

export class ServiceClient {
  constructor(private readonly baseUrl: string) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    let response: Response;
    try {
      response = await fetch(this.baseUrl + path, {
        method,
        headers: body === undefined ? undefined : { "content-type": "application/json" },
        body: body === undefined ? undefined : JSON.stringify(body),
      });
    } catch (err) {
      throw new ServiceUnreachableError(err);
    }
    if (!response.ok) {
      let detail = `HTTP ${response.status}`;
      try {
        const parsed = (await response.json()) as { detail?: string };
        if (parsed.detail) detail = parsed.detail;
      } catch {
        // keep the generic detail
      }
      throw new ApiError(response.status, detail);
    }
    return (await response.json()) as T;
  }

  createSession(userId: string): Promise<SessionPayload> {
    return this.request("POST", "/sessions", { user_id: userId });
  }

  submitContext(sessionId: string, activity: string, social: string): Promise<SuggestionPayload> {
    return this.request("POST", `/sessions/${sessionId}/context`, { activity, social });
  }

  submitResponse(
    sessionId: string,
    response: ResponseToken,
    suggestionId: string,
  ): Promise<AckPayload> {
    return this.request("POST", `/sessions/${sessionId}/response`, {
      response,
      suggestion_id: suggestionId,
    });
  }

  getState(sessionId: string): Promise<StatePayload> {
    return this.request("GET", `/sessions/${sessionId}/state`);
  }
}
