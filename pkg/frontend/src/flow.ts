/**
 * Session flow state machine, free of DOM concerns.
 *
 * Screens advance activity_grid -> social_choice -> prompt and then either
 * dashboard (answered) or back to activity_grid (prompt expired server-side).
 * One request may be in flight at a time; a duplicate action while busy is
 * dropped, and the pending suggestion's id rides along with the response so
 * the service deduplicates anything that slips through. A network failure
 * only raises the retry banner; it never mutates local state.
 */

import { ApiError, ServiceClient, ServiceUnreachableError } from "./api.js";
import type {
  AckPayload,
  ContextStatePayload,
  ResponseToken,
  SuggestionPayload,
} from "./types.js";

export type Screen = "activity_grid" | "social_choice" | "prompt" | "dashboard";

export interface DashboardView {
  context: string;
  decision_count: number;
  arms: ContextStatePayload["arms"];
  last_ack: AckPayload | null;
}

export class SessionFlow {
  screen: Screen = "activity_grid";
  sessionId: string | null = null;
  activity: string | null = null;
  social: string | null = null;
  suggestion: SuggestionPayload | null = null;
  dashboard: DashboardView | null = null;
  banner: string | null = null;
  busy = false;

  private listeners: Array<() => void> = [];

  constructor(
    private readonly client: ServiceClient,
    private readonly userId: string,
  ) {}

  onChange(listener: () => void): void {
    this.listeners.push(listener);
  }

  private notify(): void {
    for (const listener of this.listeners) listener();
  }

  /** Create the server session up front so check-ins are one round trip. */
  async start(): Promise<void> {
    if (this.sessionId !== null || this.busy) return;
    this.busy = true;
    this.notify();
    try {
      const session = await this.client.createSession(this.userId);
      this.sessionId = session.session_id;
      this.banner = null;
    } catch (err) {
      this.banner = this.describe(err);
    } finally {
      this.busy = false;
      this.notify();
    }
  }

  /** activity_grid -> social_choice (no network involved). */
  selectActivity(activity: string): void {
    if (this.screen !== "activity_grid" || this.busy) return;
    this.activity = activity;
    this.screen = "social_choice";
    this.banner = null;
    this.notify();
  }

  /** social_choice -> prompt via POST context. */
  async confirmSocial(social: string): Promise<void> {
    if (this.screen !== "social_choice" || this.busy) return;
    if (this.sessionId === null || this.activity === null) return;
    this.busy = true;
    this.notify();
    try {
      const suggestion = await this.client.submitContext(this.sessionId, this.activity, social);
      this.social = social;
      this.suggestion = suggestion;
      this.screen = "prompt";
      this.banner = null;
    } catch (err) {
      this.banner = this.describe(err);
    } finally {
      this.busy = false;
      this.notify();
    }
  }

  /** prompt -> dashboard via POST response, or back to the grid when the
   * suggestion already expired on the server. */
  async respond(response: ResponseToken): Promise<void> {
    if (this.screen !== "prompt" || this.busy) return;
    if (this.sessionId === null || this.activity === null || this.suggestion === null) return;
    this.busy = true;
    this.notify();
    try {
      const ack = await this.client.submitResponse(
        this.sessionId,
        response,
        this.suggestion.suggestion_id,
      );
      const state = await this.client.getState(this.sessionId);
      const context = state.contexts[this.activity];
      this.dashboard = {
        context: this.activity,
        decision_count: context ? context.decision_count : 0,
        arms: context ? context.arms : [],
        last_ack: ack,
      };
      this.suggestion = null;
      this.screen = "dashboard";
      this.banner = null;
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        // the pending suggestion aged out server-side: a missed check-in
        this.suggestion = null;
        this.screen = "activity_grid";
        this.banner = "The prompt expired before you answered; it was logged as missed.";
      } else {
        this.banner = this.describe(err);
      }
    } finally {
      this.busy = false;
      this.notify();
    }
  }

  /** dashboard -> activity_grid for the next check-in. */
  nextCheckIn(): void {
    if (this.screen !== "dashboard" || this.busy) return;
    this.screen = "activity_grid";
    this.activity = null;
    this.social = null;
    this.banner = null;
    this.notify();
  }

  private describe(err: unknown): string {
    if (err instanceof ServiceUnreachableError) {
      return "Cannot reach the service; check the connection and try again.";
    }
    if (err instanceof ApiError) {
      return `Service error: ${err.message}`;
    }
    return "Unexpected error; try again.";
  }
}
