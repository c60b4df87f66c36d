/** Board geometry: pure coordinate math shared by rendering and tests.
 *
 * Arrows boards are square grids with (0,0) at the bottom-left; the
 * triangle board uses the same lattice embedding as the generator's
 * sidecar maps, so vertex (x, y) from the server is drawn directly. */

import type { VariableInfo } from "./api.js";

export interface CellShape {
  id: number;
  cx: number;
  cy: number;
  size: number;
}

const SQRT3_2 = Math.sqrt(3) / 2;

export function arrowsCellShape(
  v: VariableInfo,
  n: number,
  pixels: number,
): CellShape {
  const size = pixels / n;
  const col = v.col ?? 0;
  const row = v.row ?? 0;
  return {
    id: v.id,
    cx: (col + 0.5) * size,
    cy: pixels - (row + 0.5) * size,
    size,
  };
}

export function spernerVertexShape(
  v: VariableInfo,
  n: number,
  pixels: number,
): CellShape {
  const step = pixels / n;
  const x = v.x ?? 0;
  const y = v.y ?? 0;
  return {
    id: v.id,
    cx: (x + y / 2) * step + step / 2,
    cy: pixels - (y * SQRT3_2 * step + step / 2),
    size: step,
  };
}

export function cellShape(
  problem: "arrows" | "sperner",
  v: VariableInfo,
  n: number,
  pixels: number,
): CellShape {
  return problem === "arrows"
    ? arrowsCellShape(v, n, pixels)
    : spernerVertexShape(v, n, pixels);
}

export const SPERNER_FILLS = ["#d64545", "#3f9d4f", "#3b6fd4"];

export function valueLabel(
  problem: "arrows" | "sperner",
  glyphs: string[],
  value: number,
): string {
  if (problem === "arrows") return glyphs[value] ?? String(value);
  return glyphs[value] ?? String(value);
}
