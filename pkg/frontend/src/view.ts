// DOM rendering: bubbles in order, role-tagged styling, controls that
// follow the store state. Message content is always set via textContent
// (plain text with preserved newlines; never parsed as markup).

import type { ChatState } from "./store.js";

export interface ViewHandlers {
  onSend(content: string): void;
  onNewSession(): void;
  onRetryFailed(): void;
  onRetryConnect(): void;
}

export interface View {
  render(state: ChatState): void;
}

export function createView(root: HTMLElement, handlers: ViewHandlers): View {
  root.innerHTML = `
    <header class="topbar">
      <h1>MindGuide</h1>
      <button type="button" class="new-session">New session</button>
    </header>
    <div class="banner" hidden>
      <span class="banner-text"></span>
      <button type="button" class="banner-retry">Retry</button>
    </div>
    <main class="thread" aria-live="polite"></main>
    <form class="composer">
      <textarea class="input" rows="2" placeholder="Type your message…"></textarea>
      <button type="submit" class="send" disabled>Send</button>
    </form>
  `;

  const banner = root.querySelector(".banner") as HTMLElement;
  const bannerText = root.querySelector(".banner-text") as HTMLElement;
  const thread = root.querySelector(".thread") as HTMLElement;
  const form = root.querySelector(".composer") as HTMLFormElement;
  const input = root.querySelector(".input") as HTMLTextAreaElement;
  const sendButton = root.querySelector(".send") as HTMLButtonElement;

  let lastState: ChatState | null = null;

  const updateControls = () => {
    const busy = lastState === null || lastState.requestInFlight || lastState.sessionId === null;
    input.disabled = lastState !== null && lastState.requestInFlight;
    sendButton.disabled = busy || input.value.trim().length === 0;
  };

  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const content = input.value;
    if (content.trim().length === 0) {
      return;
    }
    input.value = "";
    handlers.onSend(content);
  });
  input.addEventListener("input", updateControls);
  input.addEventListener("keydown", (event) => {
    if (event.key === "Enter" && !event.shiftKey) {
      event.preventDefault();
      form.requestSubmit();
    }
  });
  (root.querySelector(".new-session") as HTMLButtonElement).addEventListener("click", () =>
    handlers.onNewSession(),
  );
  (root.querySelector(".banner-retry") as HTMLButtonElement).addEventListener("click", () =>
    handlers.onRetryConnect(),
  );

  const render = (state: ChatState) => {
    lastState = state;

    banner.hidden = state.banner === null;
    bannerText.textContent = state.banner ?? "";

    thread.replaceChildren(
      ...state.messages.map((message) => {
        const bubble = document.createElement("div");
        bubble.className = `bubble ${message.role}`;
        if (message.pending) bubble.classList.add("pending");
        if (message.failed) bubble.classList.add("failed");
        const text = document.createElement("p");
        text.className = "content";
        text.textContent = message.content;
        bubble.append(text);
        if (message.failed) {
          const retry = document.createElement("button");
          retry.type = "button";
          retry.className = "retry";
          retry.textContent = "Retry";
          retry.addEventListener("click", () => handlers.onRetryFailed());
          bubble.append(retry);
        }
        return bubble;
      }),
    );
    thread.scrollTop = thread.scrollHeight;

    updateControls();
  };

  return { render };
}
