// Session flow controller: the state machine behind the screen.
//
// All session state is authoritative on the server.  An answer is
// acknowledged by the server before the flow advances, and a gamble id
// is never submitted twice: a retry after a dropped response that hits
// the server's duplicate guard (409) is treated as acknowledged.

import { ApiError, SessionApi } from "./api.js";
import type {
  CreateSessionRequest,
  FitMethod,
  Gamble,
  Progress,
  UtilityPointWire,
} from "./types.js";

export type FlowState =
  | { phase: "idle" }
  | { phase: "asking"; gamble: Gamble; progress: Progress }
  | { phase: "submitting"; gamble: Gamble; progress: Progress }
  | { phase: "complete"; curve: UtilityPointWire[]; progress: Progress }
  | { phase: "failed"; message: string; pending: { gamble: Gamble; y: 0 | 1 } | null };

export class SessionFlow {
  private state: FlowState = { phase: "idle" };
  private sessionId: string | null = null;
  private submitted = new Set<string>();
  private listeners: Array<(state: FlowState) => void> = [];
  private lastProgress: Progress = { answered: 0, total: 0 };

  constructor(private readonly api: SessionApi) {}

  get current(): FlowState {
    return this.state;
  }

  get id(): string | null {
    return this.sessionId;
  }

  onChange(listener: (state: FlowState) => void): void {
    this.listeners.push(listener);
  }

  private setState(state: FlowState): void {
    this.state = state;
    for (const listener of this.listeners) listener(state);
  }

  async start(request: CreateSessionRequest): Promise<void> {
    const created = await this.api.createSession(request);
    this.sessionId = created.session_id;
    this.submitted.clear();
    await this.refresh();
  }

  /** Attach to an existing session, e.g. after a page refresh. */
  async resume(sessionId: string): Promise<void> {
    this.sessionId = sessionId;
    this.submitted.clear();
    await this.refresh();
  }

  private requireSession(): string {
    if (this.sessionId === null) {
      throw new Error("no session started");
    }
    return this.sessionId;
  }

  async refresh(): Promise<void> {
    const sid = this.requireSession();
    const next = await this.api.next(sid);
    this.lastProgress = next.progress;
    if (next.complete) {
      this.setState({ phase: "complete", curve: next.curve ?? [], progress: next.progress });
    } else if (next.gamble) {
      this.setState({ phase: "asking", gamble: next.gamble, progress: next.progress });
    } else {
      this.setState({ phase: "failed", message: "service returned no gamble", pending: null });
    }
  }

  /** Submit the answer for the gamble currently on screen. */
  async answer(y: 0 | 1): Promise<void> {
    if (this.state.phase !== "asking") {
      throw new Error(`cannot answer in phase ${this.state.phase}`);
    }
    const { gamble, progress } = this.state;
    if (this.submitted.has(gamble.id)) {
      throw new Error(`gamble ${gamble.id} was already submitted`);
    }
    this.setState({ phase: "submitting", gamble, progress });
    await this.send(gamble, y);
  }

  /** Retry after a network failure; a no-op unless a submit is pending. */
  async retry(): Promise<void> {
    if (this.state.phase !== "failed" || this.state.pending === null) {
      throw new Error("nothing to retry");
    }
    const { gamble, y } = this.state.pending;
    this.setState({ phase: "submitting", gamble, progress: this.lastProgress });
    await this.send(gamble, y);
  }

  private async send(gamble: Gamble, y: 0 | 1): Promise<void> {
    const sid = this.requireSession();
    try {
      await this.api.answer(sid, gamble.id, y);
    } catch (error) {
      if (error instanceof ApiError && error.status === 409) {
        // The server already holds this answer (lost acknowledgment).
      } else {
        const message = error instanceof Error ? error.message : String(error);
        this.setState({ phase: "failed", message, pending: { gamble, y } });
        return;
      }
    }
    this.submitted.add(gamble.id);
    await this.refresh();
  }

  /** Fetch the curve for a method toggle; never computed locally. */
  async curve(method: FitMethod): Promise<UtilityPointWire[]> {
    const sid = this.requireSession();
    const body = await this.api.utility(sid, method);
    return body.points;
  }
}
