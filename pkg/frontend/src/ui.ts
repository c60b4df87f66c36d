/** DOM rendering and interaction: an SVG board, a status line, and a
 * modal offering exactly the server's option set. */

import { GameApi } from "./api.js";
import { cellShape, SPERNER_FILLS } from "./board.js";
import { GameState } from "./state.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const BOARD_PIXELS = 640;

export class GameView {
  private svg: SVGSVGElement;
  private status: HTMLElement;
  private dialog: HTMLElement;
  private cells = new Map<number, SVGElement>();
  private busy = false;

  constructor(
    private root: HTMLElement,
    private api: GameApi,
    private state: GameState,
  ) {
    root.textContent = "";
    this.status = document.createElement("div");
    this.status.className = "status";
    root.appendChild(this.status);
    this.svg = document.createElementNS(SVG_NS, "svg") as SVGSVGElement;
    this.svg.setAttribute("viewBox", `0 0 ${BOARD_PIXELS} ${BOARD_PIXELS}`);
    this.svg.setAttribute("class", "board");
    root.appendChild(this.svg);
    this.dialog = document.createElement("div");
    this.dialog.className = "offer hidden";
    root.appendChild(this.dialog);
    this.buildBoard();
    this.renderAll();
  }

  private buildBoard(): void {
    const { state } = this;
    for (const v of state.variables) {
      const shape = cellShape(state.problem, v, state.n, BOARD_PIXELS);
      let el: SVGElement;
      if (state.problem === "arrows") {
        el = document.createElementNS(SVG_NS, "rect");
        el.setAttribute("x", String(shape.cx - shape.size / 2));
        el.setAttribute("y", String(shape.cy - shape.size / 2));
        el.setAttribute("width", String(shape.size));
        el.setAttribute("height", String(shape.size));
      } else {
        el = document.createElementNS(SVG_NS, "circle");
        el.setAttribute("cx", String(shape.cx));
        el.setAttribute("cy", String(shape.cy));
        el.setAttribute("r", String(shape.size * 0.42));
      }
      el.setAttribute("class", "cell unknown");
      el.dataset.var = String(v.id);
      el.addEventListener("click", () => void this.onCellClick(v.id));
      this.svg.appendChild(el);
      this.cells.set(v.id, el);
    }
  }

  private async onCellClick(variable: number): Promise<void> {
    const { state } = this;
    if (this.busy || state.phase === "terminal") return;
    if (state.board.has(variable)) {
      // already revealed: show its value without a request
      this.flash(`cell ${variable} = ${this.label(state.board.get(variable)!)}`);
      return;
    }
    if (state.phase !== "await_query") return;
    this.busy = true;
    try {
      const answer = await this.api.query(state.gameId, variable);
      state.mergeDelta(answer.board_delta);
      state.t = answer.t;
      if (answer.kind === "choose") {
        state.beginOffer(variable, answer.options ?? [], answer.t);
        this.showOffer();
      } else if (answer.kind === "terminal" && answer.outcome) {
        state.finish(answer.outcome);
      }
      this.renderAll();
    } catch (err) {
      this.flash(String(err));
    } finally {
      this.busy = false;
    }
  }

  private async onPick(value: number): Promise<void> {
    const { state } = this;
    if (!state.pending) return;
    this.busy = true;
    try {
      const result = await this.api.choose(state.gameId, value);
      state.mergeDelta(result.board_delta);
      state.t = result.t;
      state.resolveOffer();
      if (result.kind === "terminal" && result.outcome) {
        state.finish(result.outcome);
      }
      this.hideOffer();
      this.renderAll();
    } catch (err) {
      this.flash(String(err));
    } finally {
      this.busy = false;
    }
  }

  private showOffer(): void {
    const pending = this.state.pending;
    if (!pending) return;
    this.dialog.textContent = "";
    const label = document.createElement("div");
    label.textContent = `choose a value for cell ${pending.variable}:`;
    this.dialog.appendChild(label);
    for (const option of pending.options) {
      const button = document.createElement("button");
      button.className = "option";
      button.dataset.value = String(option);
      button.textContent = this.label(option);
      button.addEventListener("click", () => void this.onPick(option));
      this.dialog.appendChild(button);
    }
    this.dialog.classList.remove("hidden");
  }

  private hideOffer(): void {
    this.dialog.classList.add("hidden");
    this.dialog.textContent = "";
  }

  private label(value: number): string {
    return this.state.glyphs[value] ?? String(value);
  }

  renderAll(): void {
    const { state } = this;
    const highlight = new Set(state.highlightVars());
    for (const [id, el] of this.cells) {
      const value = state.board.get(id);
      el.textContent = "";
      if (value === undefined) {
        el.setAttribute("class", "cell unknown");
        el.removeAttribute("fill");
      } else if (state.problem === "sperner") {
        el.setAttribute("class", "cell revealed");
        el.setAttribute("fill", SPERNER_FILLS[value] ?? "#999");
      } else {
        el.setAttribute("class", "cell revealed");
      }
      if (highlight.has(id)) {
        el.setAttribute("class", "cell revealed terminal-highlight");
      }
    }
    if (state.problem === "arrows") {
      this.renderArrowGlyphs();
    }
    const outcome =
      state.phase === "terminal"
        ? state.outcome?.kind === "falsified"
          ? "contradiction found"
          : "adversary conceded"
        : state.phase;
    this.status.textContent =
      `${state.problem} n=${state.n} | ChooseAny answers: ${state.t} | ` +
      `certified leaves ≥ ${state.certificate} | ${outcome}`;
  }

  private renderArrowGlyphs(): void {
    for (const old of Array.from(this.svg.querySelectorAll("text"))) {
      old.remove();
    }
    const { state } = this;
    for (const v of state.variables) {
      const value = state.board.get(v.id);
      if (value === undefined) continue;
      const shape = cellShape(state.problem, v, state.n, BOARD_PIXELS);
      const text = document.createElementNS(SVG_NS, "text");
      text.setAttribute("x", String(shape.cx));
      text.setAttribute("y", String(shape.cy));
      text.setAttribute("class", "glyph");
      text.setAttribute("font-size", String(shape.size * 0.8));
      text.textContent = state.glyphs[value] ?? "?";
      this.svg.appendChild(text);
    }
  }

  private flash(message: string): void {
    this.status.textContent = message;
    setTimeout(() => this.renderAll(), 1200);
  }

  /** Re-pull the full server state; the board must match field-for-field. */
  async refresh(): Promise<void> {
    const state = await this.api.state(this.state.gameId);
    this.state.applyServerState(state);
    this.renderAll();
  }
}
