/** Client-side mirror of the server's public game state.
 *
 * The board only ever grows; deltas from answers are merged in, and a
 * refresh replaces everything wholesale so the rendered board is always
 * field-for-field what the server reported. */

import type { CreateResponse, Outcome, PublicState, VariableInfo } from "./api.js";

export interface PendingOffer {
  variable: number;
  options: number[];
}

export class GameState {
  readonly gameId: string;
  readonly problem: "arrows" | "sperner";
  readonly n: number;
  readonly k: number;
  readonly glyphs: string[];
  readonly variables: VariableInfo[];
  board = new Map<number, number>();
  t = 0;
  phase: "await_query" | "await_choice" | "terminal" = "await_query";
  pending: PendingOffer | null = null;
  outcome: Outcome | null = null;

  constructor(created: CreateResponse) {
    this.gameId = created.game_id;
    this.problem = created.problem;
    this.n = created.n;
    this.k = created.k;
    this.glyphs = created.glyphs;
    this.variables = created.variables;
    this.mergeDelta(created.board);
  }

  /** 2^t grows past Number.MAX_SAFE_INTEGER quickly; display as BigInt. */
  get certificate(): bigint {
    return 1n << BigInt(this.t);
  }

  mergeDelta(delta: Record<string, number> | undefined): void {
    if (!delta) return;
    for (const [key, value] of Object.entries(delta)) {
      this.board.set(Number(key), value);
    }
  }

  applyServerState(state: PublicState): void {
    this.board = new Map(
      Object.entries(state.board).map(([k, v]) => [Number(k), v]),
    );
    this.t = state.t;
    this.phase = state.phase;
    this.outcome = state.outcome;
    this.pending = state.pending
      ? { variable: state.pending.var, options: state.pending.options }
      : null;
  }

  beginOffer(variable: number, options: number[], t: number): void {
    this.pending = { variable, options };
    this.phase = "await_choice";
    this.t = t;
  }

  resolveOffer(): void {
    this.pending = null;
    if (this.phase === "await_choice") this.phase = "await_query";
  }

  finish(outcome: Outcome): void {
    this.outcome = outcome;
    this.phase = "terminal";
    this.pending = null;
  }

  /** Variable ids to highlight at game end: the falsified nogood's cells. */
  highlightVars(): number[] {
    if (!this.outcome || this.outcome.kind !== "falsified") return [];
    return (this.outcome.literals ?? []).map(([v]) => v);
  }

  /** Field-wise equality against a server snapshot, for round-trip checks. */
  matches(state: PublicState): boolean {
    if (state.t !== this.t || state.phase !== this.phase) return false;
    const entries = Object.entries(state.board);
    if (entries.length !== this.board.size) return false;
    for (const [k, v] of entries) {
      if (this.board.get(Number(k)) !== v) return false;
    }
    return true;
  }
}
