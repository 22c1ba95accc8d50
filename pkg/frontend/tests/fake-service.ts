// In-memory stand-in implementing the chat service API semantics:
// scripted replies consumed in order, welcome-seeded histories, and the
// same error codes the real service emits.

import { ApiError, type ChatApi, type SessionCreated, type WireMessage } from "../src/api.js";

export const WELCOME =
  "Welcome! to your therapy session. I'm here to listen, support, and guide you.";

type Deferred = { resolve(): void; promise: Promise<void> };

function deferred(): Deferred {
  let resolve!: () => void;
  const promise = new Promise<void>((r) => {
    resolve = r;
  });
  return { resolve, promise };
}

export class FakeService implements ChatApi {
  private replies: string[];
  private histories = new Map<string, WireMessage[]>();
  private counter = 0;
  /** When true every call rejects like an unreachable host. */
  down = false;
  /** Pending gates: postMessage awaits these before answering, in order. */
  private gates: Deferred[] = [];

  constructor(replies: string[]) {
    this.replies = [...replies];
  }

  /** Queue more scripted replies (e.g. after exercising exhaustion). */
  addReplies(...replies: string[]): void {
    this.replies.push(...replies);
  }

  /** Make the next postMessage hang until the returned release() is called. */
  holdNextReply(): () => void {
    const gate = deferred();
    this.gates.push(gate);
    return gate.resolve;
  }

  private offline(): Error {
    return new TypeError("fetch failed");
  }

  async createSession(): Promise<SessionCreated> {
    if (this.down) throw this.offline();
    const sessionId = `fake-${++this.counter}`;
    const welcome: WireMessage = { role: "ai", content: WELCOME };
    this.histories.set(sessionId, [welcome]);
    return { session_id: sessionId, welcome };
  }

  async postMessage(sessionId: string, content: string): Promise<WireMessage> {
    if (this.down) throw this.offline();
    const gate = this.gates.shift();
    if (gate) await gate.promise;
    const history = this.histories.get(sessionId);
    if (!history) throw new ApiError(404, "unknown_session", "no such session");
    if (content.trim().length === 0) throw new ApiError(400, "empty_message", "empty");
    const reply = this.replies.shift();
    if (reply === undefined) {
      throw new ApiError(502, "upstream_error", "ScriptExhausted: no replies left");
    }
    history.push({ role: "human", content });
    const wire: WireMessage = { role: "ai", content: reply };
    history.push(wire);
    return wire;
  }

  async getHistory(sessionId: string): Promise<WireMessage[]> {
    if (this.down) throw this.offline();
    const history = this.histories.get(sessionId);
    if (!history) throw new ApiError(404, "unknown_session", "no such session");
    return [...history];
  }

  async deleteSession(sessionId: string): Promise<void> {
    if (this.down) throw this.offline();
    if (!this.histories.delete(sessionId)) {
      throw new ApiError(404, "unknown_session", "no such session");
    }
  }
}

export class MemoryStorage {
  private map = new Map<string, string>();
  getItem(key: string): string | null {
    return this.map.has(key) ? (this.map.get(key) as string) : null;
  }
  setItem(key: string, value: string): void {
    this.map.set(key, value);
  }
  removeItem(key: string): void {
    this.map.delete(key);
  }
}
