/** Application wiring: tabs, the question input, and renders on state change. */

import { ApiError, ChatApi } from "./api.js";
import { conversationVM, queryPanelVM, renderConversation, renderQueryPanel } from "./chat.js";
import { initialState, newSessionId, selectedTurn, Store, validateQuestion } from "./state.js";
import { renderGraph, renderLegend } from "./viz.js";

function byId<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
}

export function startApp(api: ChatApi = new ChatApi()): Store {
  const store = new Store(initialState(newSessionId()));

  const conversation = byId<HTMLElement>("conversation");
  const queryPanel = byId<HTMLElement>("query-panel");
  const vizRoot = byId<HTMLElement>("viz-root");
  const legend = byId<HTMLElement>("legend");
  const banner = byId<HTMLElement>("banner");
  const hint = byId<HTMLElement>("input-hint");
  const input = byId<HTMLInputElement>("question-input");
  const sendButton = byId<HTMLButtonElement>("send-button");
  const chatTab = byId<HTMLButtonElement>("tab-chat");
  const vizTab = byId<HTMLButtonElement>("tab-viz");
  const chatPane = byId<HTMLElement>("chat-pane");
  const vizPane = byId<HTMLElement>("viz-pane");

  api
    .schema()
    .then((schema) => renderLegend(legend, schema.labels))
    .catch(() => renderLegend(legend, []));

  function render(): void {
    const state = store.state;
    banner.textContent = state.banner ?? "";
    banner.hidden = state.banner === null;
    hint.textContent = state.inputHint ?? "";
    hint.hidden = state.inputHint === null;
    input.disabled = state.pending;
    sendButton.disabled = state.pending;

    chatPane.hidden = state.activeTab !== "chat";
    vizPane.hidden = state.activeTab !== "viz";
    chatTab.classList.toggle("active", state.activeTab === "chat");
    vizTab.classList.toggle("active", state.activeTab === "viz");

    renderConversation(conversation, conversationVM(state), {
      onSelectTurn: (turnId) => store.selectTurn(turnId),
    });
    renderQueryPanel(queryPanel, queryPanelVM(state));
    if (state.activeTab === "viz") {
      const turn = selectedTurn(state);
      renderGraph(vizRoot, state, turn ? turn.subgraph : null, {
        onDrag: (key, x, y) => store.overridePosition(key, x, y),
      });
    }
  }

  store.subscribe(render);

  async function submit(): Promise<void> {
    const question = validateQuestion(input.value);
    if (question === null) {
      store.failRequest("hint", "Type a question first.");
      return;
    }
    if (!store.beginRequest()) return; // one request in flight at a time
    try {
      const turn = await api.chat(store.state.sessionId, question);
      input.value = "";
      store.addTurn(turn);
    } catch (err) {
      if (err instanceof ApiError && err.status === 400) {
        store.failRequest("hint", err.message);
      } else {
        store.failRequest("banner", err instanceof Error ? err.message : String(err));
      }
    }
  }

  sendButton.addEventListener("click", () => void submit());
  input.addEventListener("keydown", (event) => {
    if (event.key === "Enter") void submit();
  });
  chatTab.addEventListener("click", () => store.switchTab("chat"));
  vizTab.addEventListener("click", () => store.switchTab("viz"));

  render();
  return store;
}

declare global {
  interface Window {
    __SKGCHAT_TEST__?: boolean;
  }
}

if (typeof window !== "undefined" && !window.__SKGCHAT_TEST__) {
  window.addEventListener("DOMContentLoaded", () => startApp());
}
