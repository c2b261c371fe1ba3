/** Chat tab: conversation panel, generated-query panel, input at the bottom.
 *
 * View models are pure functions of state so they can be tested without a
 * browser; the render step below them is a thin DOM projection.
 */

import { selectedTurn, type UiState } from "./state.js";
import type { ChatTurn, Diagnostic } from "./types.js";

export interface AnswerItem {
  text: string;
  href: string | null;
}

export interface MessageVM {
  turnId: number;
  question: string;
  items: AnswerItem[];
  error: string | null;
  selected: boolean;
}

export interface QueryPanelVM {
  queryText: string | null;
  attempts: number | null;
  diagnostics: Diagnostic[];
  error: string | null;
}

const LINK_SEPARATOR = " LINK: ";

/** Split "Title LINK: https://…" row cells into text plus clickable href. */
export function answerItem(cell: unknown): AnswerItem {
  const text = cell === null ? "null" : String(cell);
  const at = text.lastIndexOf(LINK_SEPARATOR);
  if (at >= 0) {
    const href = text.slice(at + LINK_SEPARATOR.length).trim();
    if (/^https?:\/\//.test(href)) {
      return { text: text.slice(0, at), href };
    }
  }
  return { text, href: null };
}

function turnItems(turn: ChatTurn): AnswerItem[] {
  if (turn.error !== null) return [];
  if (turn.rows.length === 0) return [{ text: "(no matching datasets)", href: null }];
  return turn.rows.map((row) => answerItem(row.length === 1 ? row[0] : row.map(String).join(" | ")));
}

/** Conversation in chronological order: the newest exchange renders last,
 * nearest the input, and the panel scrolls up through history. */
export function conversationVM(state: UiState): MessageVM[] {
  return state.turns.map((turn) => ({
    turnId: turn.turn_id,
    question: turn.question,
    items: turnItems(turn),
    error: turn.error,
    selected: turn.turn_id === state.selectedTurnId,
  }));
}

/** The query panel always mirrors the selected turn, failures included. */
export function queryPanelVM(state: UiState): QueryPanelVM {
  const turn = selectedTurn(state);
  if (turn === null) {
    return { queryText: null, attempts: null, diagnostics: [], error: null };
  }
  return {
    queryText: turn.query_text,
    attempts: turn.attempts,
    diagnostics: turn.diagnostics,
    error: turn.error,
  };
}

export interface ChatHandlers {
  onSelectTurn: (turnId: number) => void;
}

export function renderConversation(
  container: HTMLElement,
  messages: MessageVM[],
  handlers: ChatHandlers,
): void {
  container.replaceChildren();
  for (const message of messages) {
    const block = document.createElement("div");
    block.className = "exchange" + (message.selected ? " selected" : "");
    block.dataset["turnId"] = String(message.turnId);
    block.addEventListener("click", () => handlers.onSelectTurn(message.turnId));

    const question = document.createElement("div");
    question.className = "bubble question";
    question.textContent = message.question;
    block.appendChild(question);

    const answer = document.createElement("div");
    answer.className = "bubble answer" + (message.error !== null ? " failed" : "");
    if (message.error !== null) {
      const note = document.createElement("div");
      note.className = "error-note";
      note.textContent = message.error;
      answer.appendChild(note);
    } else {
      const list = document.createElement("ul");
      list.className = "answer-rows";
      for (const item of message.items) {
        const li = document.createElement("li");
        if (item.href !== null) {
          li.textContent = `${item.text} `;
          const link = document.createElement("a");
          link.href = item.href;
          link.textContent = item.href;
          link.target = "_blank";
          li.appendChild(link);
        } else {
          li.textContent = item.text;
        }
        list.appendChild(li);
      }
      answer.appendChild(list);
    }
    block.appendChild(answer);
    container.appendChild(block);
  }
  // newest exchange sits at the bottom, next to the input
  container.scrollTop = container.scrollHeight;
}

export function renderQueryPanel(container: HTMLElement, vm: QueryPanelVM): void {
  container.replaceChildren();
  const heading = document.createElement("h3");
  heading.textContent = "Generated query";
  container.appendChild(heading);

  const code = document.createElement("pre");
  code.className = "query-text";
  code.textContent = vm.queryText ?? "(no query yet)";
  container.appendChild(code);

  if (vm.attempts !== null && vm.attempts > 1) {
    const note = document.createElement("div");
    note.className = "attempts";
    note.textContent = `translated in ${vm.attempts} attempts`;
    container.appendChild(note);
  }
  if (vm.diagnostics.length > 0) {
    const list = document.createElement("ul");
    list.className = "diagnostics";
    for (const diag of vm.diagnostics) {
      const li = document.createElement("li");
      li.className = `diag ${diag.severity}`;
      li.textContent = `${diag.severity} ${diag.code}: ${diag.message}`;
      list.appendChild(li);
    }
    container.appendChild(list);
  }
}
