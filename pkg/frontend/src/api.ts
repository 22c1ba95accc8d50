// Typed client for the chat service HTTP/JSON API.

export interface WireMessage {
  role: "ai" | "human" | "system";
  content: string;
}

export interface SessionCreated {
  session_id: string;
  welcome: WireMessage;
}

/** Error body the service returns: {"error": {"code", "message"}}. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

async function asApiError(response: Response): Promise<ApiError> {
  let code = "unknown_error";
  let message = `HTTP ${response.status}`;
  try {
    const body = (await response.json()) as { error?: { code?: string; message?: string } };
    if (body.error) {
      code = body.error.code ?? code;
      message = body.error.message ?? message;
    }
  } catch {
    // non-JSON error body; keep the status-based message
  }
  return new ApiError(response.status, code, message);
}

/** The surface the store needs; tests substitute an in-memory fake. */
export interface ChatApi {
  createSession(personaId?: string): Promise<SessionCreated>;
  postMessage(sessionId: string, content: string): Promise<WireMessage>;
  getHistory(sessionId: string): Promise<WireMessage[]>;
  deleteSession(sessionId: string): Promise<void>;
}

export class ApiClient implements ChatApi {
  constructor(private readonly base: string = "") {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await fetch(this.base + path, init);
    if (!response.ok) {
      throw await asApiError(response);
    }
    if (response.status === 204) {
      return undefined as T;
    }
    return (await response.json()) as T;
  }

  async createSession(personaId?: string): Promise<SessionCreated> {
    return this.request<SessionCreated>("/api/sessions", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(personaId ? { persona_id: personaId } : {}),
    });
  }

  async postMessage(sessionId: string, content: string): Promise<WireMessage> {
    const body = await this.request<{ reply: WireMessage }>(
      `/api/sessions/${encodeURIComponent(sessionId)}/messages`,
      {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ content }),
      },
    );
    return body.reply;
  }

  async getHistory(sessionId: string): Promise<WireMessage[]> {
    const body = await this.request<{ messages: WireMessage[] }>(
      `/api/sessions/${encodeURIComponent(sessionId)}/history`,
    );
    return body.messages;
  }

  async deleteSession(sessionId: string): Promise<void> {
    await this.request<void>(`/api/sessions/${encodeURIComponent(sessionId)}`, {
      method: "DELETE",
    });
  }
}
