// @vitest-environment jsdom
//
// Scripted browser sessions against the real service: full games played
// by clicking SVG cells, with offer dialogs and terminal highlighting
// checked against the server's word.

import { spawn, ChildProcess } from "node:child_process";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { GameApi } from "../src/api.js";
import { GameState } from "../src/state.js";
import { GameView } from "../src/ui.js";

const PORT = 8763;
const BASE = `http://127.0.0.1:${PORT}`;

let server: ChildProcess;

async function waitFor(check: () => boolean, ms = 20000): Promise<void> {
  const start = Date.now();
  while (!check()) {
    if (Date.now() - start > ms) throw new Error("timed out waiting");
    await new Promise((r) => setTimeout(r, 5));
  }
}

beforeAll(async () => {
  server = spawn("python3", ["-m", "planarcsp.cli", "serve", "--port", String(PORT)], {
    stdio: "ignore",
  });
  const api = new GameApi(BASE);
  const start = Date.now();
  for (;;) {
    try {
      await api.health();
      break;
    } catch {
      if (Date.now() - start > 15000) throw new Error("service did not come up");
      await new Promise((r) => setTimeout(r, 150));
    }
  }
}, 30000);

afterAll(() => {
  server.kill();
});

function clickCell(root: HTMLElement, variable: number): void {
  const el = root.querySelector(`[data-var="${variable}"]`);
  expect(el, `cell ${variable} must be rendered`).toBeTruthy();
  (el as SVGElement).dispatchEvent(
    new MouseEvent("click", { bubbles: true }),
  );
}

function dialogOptions(root: HTMLElement): number[] {
  return Array.from(root.querySelectorAll(".offer button.option")).map((b) =>
    Number((b as HTMLButtonElement).dataset.value),
  );
}

/** Click toward the unknown frontier until the game ends. */
async function playOut(
  root: HTMLElement,
  api: GameApi,
  state: GameState,
  maxMoves: number,
): Promise<void> {
  for (let move = 0; move < maxMoves && state.phase !== "terminal"; move++) {
    const unknown = state.variables
      .map((v) => v.id)
      .filter((id) => !state.board.has(id));
    if (unknown.length === 0) break;
    // rightmost-frontier heuristic: the hidden region hugs the revealed area
    const target = unknown[unknown.length - 1]!;
    const before = state.t;
    clickCell(root, target);
    await waitFor(
      () =>
        state.phase === "terminal" ||
        state.pending !== null ||
        state.board.has(target),
    );
    if (state.pending) {
      // the dialog must offer exactly the server's option set
      const serverState = await api.state(state.gameId);
      expect(serverState.pending?.options ?? []).toEqual(
        state.pending.options,
      );
      await waitFor(() => dialogOptions(root).length > 0);
      expect(new Set(dialogOptions(root))).toEqual(
        new Set(state.pending.options),
      );
      const pick = dialogOptions(root)[0]!;
      const btn = root.querySelector(
        `.offer button.option[data-value="${pick}"]`,
      ) as HTMLButtonElement;
      btn.dispatchEvent(new MouseEvent("click", { bubbles: true }));
      await waitFor(() => state.pending === null);
      expect(state.t).toBe(before + 1);
    }
  }
}

describe("scripted sessions", () => {
  it("completes a full sperner game at n=32", async () => {
    const api = new GameApi(BASE);
    const created = await api.createGame("sperner", 32);
    const state = new GameState(created);
    const root = document.createElement("div");
    document.body.appendChild(root);
    const view = new GameView(root, api, state);
    await playOut(root, api, state, 600);
    expect(state.phase).toBe("terminal");
    expect(["falsified", "conceded"]).toContain(state.outcome?.kind);
    expect(state.t).toBeGreaterThanOrEqual(1);
    // round-trip fidelity: rendered state equals a fresh server snapshot
    await view.refresh();
    expect(state.matches(await api.state(state.gameId))).toBe(true);
  }, 120000);

  it("completes a full arrows game at n=64", async () => {
    const api = new GameApi(BASE);
    const created = await api.createGame("arrows", 64);
    const state = new GameState(created);
    const root = document.createElement("div");
    document.body.appendChild(root);
    new GameView(root, api, state);
    await playOut(root, api, state, 400);
    expect(state.phase).toBe("terminal");
    expect(state.t).toBeGreaterThanOrEqual(1);
  }, 240000);

  it("highlights the falsified nogood's cells at game end", async () => {
    const api = new GameApi(BASE);
    const created = await api.createGame("sperner", 2);
    const state = new GameState(created);
    const root = document.createElement("div");
    document.body.appendChild(root);
    new GameView(root, api, state);
    await playOut(root, api, state, 10);
    expect(state.phase).toBe("terminal");
    expect(state.outcome?.kind).toBe("falsified");
    const literals = state.outcome?.literals ?? [];
    expect(literals.length).toBeGreaterThan(0);
    const highlighted = Array.from(
      root.querySelectorAll(".terminal-highlight"),
    ).map((el) => Number((el as SVGElement).dataset.var));
    expect(new Set(highlighted)).toEqual(
      new Set(literals.map(([v]) => v)),
    );
  }, 60000);

  it("clicking a revealed cell issues no request", async () => {
    const api = new GameApi(BASE);
    const created = await api.createGame("arrows", 32);
    const state = new GameState(created);
    const root = document.createElement("div");
    document.body.appendChild(root);
    new GameView(root, api, state);
    const revealed = Number(Object.keys(created.board)[0]);
    const movesBefore = (await api.state(state.gameId)).moves;
    clickCell(root, revealed);
    await new Promise((r) => setTimeout(r, 100));
    expect((await api.state(state.gameId)).moves).toBe(movesBefore);
  }, 30000);
});
