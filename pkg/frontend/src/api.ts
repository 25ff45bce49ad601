// Thin typed client for the session service.  Every number shown in the
// UI originates from these responses; the client never computes one.

import type {
  AnswerResponse,
  CreateSessionRequest,
  CreateSessionResponse,
  FitMethod,
  NextResponse,
  UtilityResponse,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
  }
}

async function parseOrThrow<T>(response: Response): Promise<T> {
  if (!response.ok) {
    let detail = response.statusText;
    try {
      const body = (await response.json()) as { detail?: string };
      if (body.detail) detail = body.detail;
    } catch {
      // non-JSON error body; keep the status text
    }
    throw new ApiError(response.status, detail);
  }
  return (await response.json()) as T;
}

export class SessionApi {
  private readonly fetchImpl: typeof fetch;

  constructor(
    readonly baseUrl: string,
    fetchImpl?: typeof fetch,
  ) {
    // Wrap the global fetch so it is never invoked with this class as
    // its receiver (browsers require window as `this`).
    this.fetchImpl = fetchImpl ?? ((input, init) => fetch(input, init));
  }

  private url(path: string): string {
    return this.baseUrl.replace(/\/$/, "") + path;
  }

  async createSession(request: CreateSessionRequest): Promise<CreateSessionResponse> {
    const response = await this.fetchImpl(this.url("/sessions"), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(request),
    });
    return parseOrThrow<CreateSessionResponse>(response);
  }

  async next(sessionId: string): Promise<NextResponse> {
    const response = await this.fetchImpl(this.url(`/sessions/${sessionId}/next`));
    return parseOrThrow<NextResponse>(response);
  }

  async answer(sessionId: string, gambleId: string, y: 0 | 1): Promise<AnswerResponse> {
    const response = await this.fetchImpl(this.url(`/sessions/${sessionId}/answers`), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ gamble_id: gambleId, y }),
    });
    return parseOrThrow<AnswerResponse>(response);
  }

  async utility(sessionId: string, method?: FitMethod): Promise<UtilityResponse> {
    const query = method ? `?method=${method}` : "";
    const response = await this.fetchImpl(this.url(`/sessions/${sessionId}/utility${query}`));
    return parseOrThrow<UtilityResponse>(response);
  }

  async exportSession(sessionId: string): Promise<unknown> {
    const response = await this.fetchImpl(this.url(`/sessions/${sessionId}`));
    return parseOrThrow<unknown>(response);
  }
}
