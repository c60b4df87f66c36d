import { GameApi } from "./api.js";
import { GameState } from "./state.js";
import { GameView } from "./ui.js";

export async function startGame(
  root: HTMLElement,
  problem: string,
  n: number,
  api = new GameApi(),
): Promise<GameView> {
  const created = await api.createGame(problem, n);
  const state = new GameState(created);
  return new GameView(root, api, state);
}

function wireForm(): void {
  const form = document.getElementById("new-game") as HTMLFormElement | null;
  const root = document.getElementById("board-root");
  if (!form || !root) return;
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const problem = (form.elements.namedItem("problem") as HTMLSelectElement).value;
    const n = Number((form.elements.namedItem("n") as HTMLInputElement).value);
    void startGame(root, problem, n).catch((err) => {
      root.textContent = String(err);
    });
  });
}

if (typeof document !== "undefined" && document.readyState !== "loading") {
  wireForm();
} else if (typeof document !== "undefined") {
  document.addEventListener("DOMContentLoaded", wireForm);
}
