import { describe, expect, it } from "vitest";

import { answerItem, conversationVM, queryPanelVM, renderConversation, renderQueryPanel } from "../src/chat.js";
import { initialState, Store } from "../src/state.js";
import { makeTurn } from "./helpers.js";

describe("answerItem", () => {
  it("splits LINK rows into text and clickable href", () => {
    const item = answerItem("American Health Values Survey LINK: https://doi.org/10.3886/E100001");
    expect(item.text).toBe("American Health Values Survey");
    expect(item.href).toBe("https://doi.org/10.3886/E100001");
  });

  it("leaves plain cells untouched", () => {
    expect(answerItem("HMCA")).toEqual({ text: "HMCA", href: null });
    expect(answerItem(42)).toEqual({ text: "42", href: null });
    expect(answerItem(null)).toEqual({ text: "null", href: null });
    expect(answerItem("odd LINK: not-a-url")).toEqual({ text: "odd LINK: not-a-url", href: null });
  });
});

describe("conversation view model", () => {
  it("orders messages oldest first so the newest sits next to the input", () => {
    const store = new Store(initialState("s"));
    store.addTurn(makeTurn({ turn_id: 1, question: "first?" }));
    store.addTurn(makeTurn({ turn_id: 2, question: "second?" }));
    const messages = conversationVM(store.state);
    expect(messages.map((m) => m.question)).toEqual(["first?", "second?"]);
    expect(messages[1]!.selected).toBe(true);
  });

  it("marks failed turns and carries their error text", () => {
    const store = new Store(initialState("s"));
    store.addTurn(
      makeTurn({ turn_id: 1, error: "translation failed", rows: [], query_text: "broken (" }),
    );
    const [message] = conversationVM(store.state);
    expect(message!.error).toBe("translation failed");
    expect(message!.items).toEqual([]);
  });
});

describe("query panel view model", () => {
  it("always shows the selected turn's query, including failures", () => {
    const store = new Store(initialState("s"));
    store.addTurn(makeTurn({ turn_id: 1 }));
    store.addTurn(
      makeTurn({
        turn_id: 2,
        query_text: "broken (",
        error: "translation failed",
        rows: [],
        diagnostics: [
          { severity: "error", code: "SYNTAX", start: 7, end: 8, message: "1:8: expected..." },
        ],
      }),
    );
    let panel = queryPanelVM(store.state);
    expect(panel.queryText).toBe("broken (");
    expect(panel.diagnostics).toHaveLength(1);
    store.selectTurn(1);
    panel = queryPanelVM(store.state);
    expect(panel.queryText).toContain("MATCH");
    expect(panel.diagnostics).toHaveLength(0);
  });
});

describe("DOM rendering", () => {
  it("renders answers as list items with anchors", () => {
    const store = new Store(initialState("s"));
    store.addTurn(makeTurn({ turn_id: 1 }));
    const container = document.createElement("div");
    renderConversation(container, conversationVM(store.state), { onSelectTurn: () => {} });
    const link = container.querySelector("a");
    expect(link?.getAttribute("href")).toBe("https://doi.org/10.3886/E100001");
    expect(container.textContent).toContain("American Health Values Survey");
  });

  it("renders diagnostics of failed turns under the query panel", () => {
    const store = new Store(initialState("s"));
    store.addTurn(
      makeTurn({
        turn_id: 1,
        query_text: "broken (",
        error: "translation failed",
        rows: [],
        diagnostics: [
          { severity: "error", code: "UNKNOWN_PROPERTY", start: 0, end: 7, message: "no owner" },
        ],
      }),
    );
    const panel = document.createElement("div");
    renderQueryPanel(panel, queryPanelVM(store.state));
    expect(panel.querySelector(".query-text")?.textContent).toBe("broken (");
    const diag = panel.querySelector(".diag.error");
    expect(diag?.textContent).toContain("UNKNOWN_PROPERTY");
  });

  it("clicking an exchange selects its turn", () => {
    const store = new Store(initialState("s"));
    store.addTurn(makeTurn({ turn_id: 1 }));
    store.addTurn(makeTurn({ turn_id: 2 }));
    const container = document.createElement("div");
    document.body.appendChild(container);
    const selected: number[] = [];
    renderConversation(container, conversationVM(store.state), {
      onSelectTurn: (id) => selected.push(id),
    });
    const first = container.querySelector<HTMLElement>('[data-turn-id="1"]');
    first?.click();
    expect(selected).toEqual([1]);
  });

  it("notes multi-attempt translations", () => {
    const store = new Store(initialState("s"));
    store.addTurn(makeTurn({ turn_id: 1, attempts: 2 }));
    const panel = document.createElement("div");
    renderQueryPanel(panel, queryPanelVM(store.state));
    expect(panel.querySelector(".attempts")?.textContent).toContain("2 attempts");
  });
});
