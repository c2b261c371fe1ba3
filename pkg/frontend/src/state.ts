/** Client state: session turns, active tab, selected turn, drag overrides.
 *
 * Node position overrides live here rather than in the renderer so a drag
 * survives tab switches and re-renders within the session. At most one chat
 * request is in flight; the input stays disabled while pending.
 */

import type { ChatTurn } from "./types.js";

export type Tab = "chat" | "viz";

export interface UiState {
  sessionId: string;
  turns: ChatTurn[];
  activeTab: Tab;
  selectedTurnId: number | null;
  pending: boolean;
  banner: string | null; // network failures and other transport problems
  inputHint: string | null; // inline validation hints (empty input, 400s)
  positionOverrides: Map<number, { x: number; y: number }>;
}

export function initialState(sessionId: string): UiState {
  return {
    sessionId,
    turns: [],
    activeTab: "chat",
    selectedTurnId: null,
    pending: false,
    banner: null,
    inputHint: null,
    positionOverrides: new Map(),
  };
}

export function selectedTurn(state: UiState): ChatTurn | null {
  if (state.selectedTurnId === null) return null;
  return state.turns.find((t) => t.turn_id === state.selectedTurnId) ?? null;
}

type Listener = (state: UiState) => void;

export class Store {
  private listeners: Listener[] = [];

  constructor(public state: UiState) {}

  subscribe(listener: Listener): void {
    this.listeners.push(listener);
  }

  update(mutate: (state: UiState) => void): void {
    mutate(this.state);
    for (const listener of this.listeners) listener(this.state);
  }

  /** Append a completed turn and select it. */
  addTurn(turn: ChatTurn): void {
    this.update((s) => {
      s.turns.push(turn);
      s.selectedTurnId = turn.turn_id;
      s.pending = false;
      s.banner = null;
      s.inputHint = null;
    });
  }

  beginRequest(): boolean {
    if (this.state.pending) return false;
    this.update((s) => {
      s.pending = true;
      s.banner = null;
      s.inputHint = null;
    });
    return true;
  }

  failRequest(kind: "banner" | "hint", message: string): void {
    this.update((s) => {
      s.pending = false;
      if (kind === "banner") s.banner = message;
      else s.inputHint = message;
    });
  }

  switchTab(tab: Tab): void {
    this.update((s) => {
      s.activeTab = tab;
    });
  }

  selectTurn(turnId: number): void {
    this.update((s) => {
      if (s.turns.some((t) => t.turn_id === turnId)) s.selectedTurnId = turnId;
    });
  }

  overridePosition(key: number, x: number, y: number): void {
    this.update((s) => {
      s.positionOverrides.set(key, { x, y });
    });
  }
}

/** Client-side gate: whitespace-only input never reaches the network. */
export function validateQuestion(raw: string): string | null {
  const trimmed = raw.trim();
  return trimmed.length > 0 ? trimmed : null;
}

export function newSessionId(): string {
  return `ui-${Date.now().toString(36)}-${Math.floor(Math.random() * 1e6).toString(36)}`;
}
