import { ApiClient } from "./api.js";
import { ChatStore } from "./store.js";
import { createView } from "./view.js";

const root = document.getElementById("app");
if (root === null) {
  throw new Error("missing #app container");
}

const store = new ChatStore(new ApiClient(""), window.localStorage);
const view = createView(root, {
  onSend: (content) => void store.send(content),
  onNewSession: () => void store.newSession(),
  onRetryFailed: () => void store.retryLastFailed(),
  onRetryConnect: () => void store.start(),
});

store.subscribe((state) => view.render(state));
view.render(store.getState());
void store.start();
