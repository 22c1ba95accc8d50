// Chat state machine: mirrors the service history plus at most one
// optimistic (pending or failed) human bubble, and enforces a single
// in-flight request per session.

import { ApiError, type ChatApi, type WireMessage } from "./api.js";

export type UiRole = "human" | "ai";

export interface UiMessage {
  role: UiRole;
  content: string;
  /** True only for the latest human message still awaiting its reply. */
  pending: boolean;
  /** True when the send failed; the bubble offers a retry. */
  failed: boolean;
}

export interface ChatState {
  sessionId: string | null;
  messages: UiMessage[];
  requestInFlight: boolean;
  /** Connection-level problem (service unreachable); offers a retry. */
  banner: string | null;
}

export interface KeyValueStorage {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
  removeItem(key: string): void;
}

export const SESSION_STORAGE_KEY = "mindguide.session_id";

function settled(role: UiRole, content: string): UiMessage {
  return { role, content, pending: false, failed: false };
}

function fromHistory(history: WireMessage[]): UiMessage[] {
  return history
    .filter((m) => m.role === "ai" || m.role === "human")
    .map((m) => settled(m.role as UiRole, m.content));
}

export class ChatStore {
  private state: ChatState = {
    sessionId: null,
    messages: [],
    requestInFlight: false,
    banner: null,
  };
  private listeners = new Set<(state: ChatState) => void>();

  constructor(
    private readonly api: ChatApi,
    private readonly storage: KeyValueStorage,
  ) {}

  getState(): ChatState {
    return this.state;
  }

  subscribe(listener: (state: ChatState) => void): () => void {
    this.listeners.add(listener);
    return () => this.listeners.delete(listener);
  }

  private setState(patch: Partial<ChatState>): void {
    this.state = { ...this.state, ...patch };
    for (const listener of this.listeners) {
      listener(this.state);
    }
  }

  /** Rejoin the stored session if it is still alive, else create a fresh one. */
  async start(): Promise<void> {
    this.setState({ banner: null });
    const stored = this.storage.getItem(SESSION_STORAGE_KEY);
    if (stored !== null) {
      try {
        const history = await this.api.getHistory(stored);
        this.setState({ sessionId: stored, messages: fromHistory(history) });
        return;
      } catch (error) {
        if (error instanceof ApiError) {
          // Session gone (expired or restarted service): fall through to create.
          this.storage.removeItem(SESSION_STORAGE_KEY);
        } else {
          this.setState({ banner: "Cannot reach the chat service." });
          return;
        }
      }
    }
    await this.createFresh();
  }

  private async createFresh(): Promise<void> {
    try {
      const created = await this.api.createSession();
      this.storage.setItem(SESSION_STORAGE_KEY, created.session_id);
      this.setState({
        sessionId: created.session_id,
        messages: [settled("ai", created.welcome.content)],
        banner: null,
      });
    } catch {
      this.setState({ banner: "Cannot reach the chat service." });
    }
  }

  /** Drop the current thread and greet again in a brand-new session. */
  async newSession(): Promise<void> {
    const old = this.state.sessionId;
    this.storage.removeItem(SESSION_STORAGE_KEY);
    this.setState({ sessionId: null, messages: [], banner: null });
    if (old !== null) {
      try {
        await this.api.deleteSession(old);
      } catch {
        // Best effort; the server expires idle sessions anyway.
      }
    }
    await this.createFresh();
  }

  canSend(content: string): boolean {
    return (
      this.state.sessionId !== null &&
      !this.state.requestInFlight &&
      content.trim().length > 0
    );
  }

  async send(content: string): Promise<void> {
    if (!this.canSend(content)) {
      return;
    }
    const sessionId = this.state.sessionId as string;
    // Optimistic bubble: rendered immediately, resolved or failed later.
    this.setState({
      requestInFlight: true,
      messages: [
        ...this.state.messages,
        { role: "human", content, pending: true, failed: false },
      ],
    });
    try {
      const reply = await this.api.postMessage(sessionId, content);
      this.setState({
        requestInFlight: false,
        messages: [
          ...this.state.messages.slice(0, -1),
          settled("human", content),
          settled("ai", reply.content),
        ],
      });
    } catch {
      this.setState({
        requestInFlight: false,
        messages: [
          ...this.state.messages.slice(0, -1),
          { role: "human", content, pending: false, failed: true },
        ],
      });
    }
  }

  /** Re-send the trailing failed bubble, if any. */
  async retryLastFailed(): Promise<void> {
    const last = this.state.messages[this.state.messages.length - 1];
    if (!last || !last.failed || this.state.requestInFlight) {
      return;
    }
    this.setState({ messages: this.state.messages.slice(0, -1) });
    await this.send(last.content);
  }
}
