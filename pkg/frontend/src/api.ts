/** Typed client for the game service. The UI never computes game rules;
 * it posts intents and renders what comes back. */

export interface VariableInfo {
  id: number;
  col?: number;
  row?: number;
  x?: number;
  y?: number;
}

export interface CreateResponse {
  game_id: string;
  problem: "arrows" | "sperner";
  n: number;
  k: number;
  glyphs: string[];
  variables: VariableInfo[];
  board: Record<string, number>;
}

export interface Outcome {
  kind: "falsified" | "conceded";
  literals?: [number, number][];
}

export interface QueryResponse {
  kind: "fixed" | "choose" | "terminal";
  value?: number;
  options?: number[];
  outcome?: Outcome;
  board_delta?: Record<string, number>;
  t: number;
  phase: string;
}

export interface ChooseResponse {
  kind: "ok" | "terminal";
  board_delta?: Record<string, number>;
  outcome?: Outcome;
  t: number;
  certificate?: number;
  phase: string;
}

export interface PublicState {
  game_id: string;
  problem: "arrows" | "sperner";
  n: number;
  k: number;
  phase: "await_query" | "await_choice" | "terminal";
  board: Record<string, number>;
  t: number;
  certificate: number;
  moves: number;
  outcome: Outcome | null;
  pending: { var: number; options: number[] } | null;
}

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  const resp = await fetch(url, init);
  const body = (await resp.json()) as T & { error?: string };
  if (!resp.ok) {
    throw new ApiError(resp.status, body.error ?? `http ${resp.status}`);
  }
  return body;
}

export class GameApi {
  constructor(private base: string = "") {}

  private post<T>(path: string, payload: unknown): Promise<T> {
    return request<T>(`${this.base}/api/v1${path}`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(payload),
    });
  }

  health(): Promise<{ version: string; ok: boolean }> {
    return request(`${this.base}/api/v1/health`);
  }

  createGame(problem: string, n: number): Promise<CreateResponse> {
    return this.post("/game", { problem, n });
  }

  query(gameId: string, variable: number): Promise<QueryResponse> {
    return this.post(`/game/${gameId}/query`, { var: variable });
  }

  choose(gameId: string, value: number): Promise<ChooseResponse> {
    return this.post(`/game/${gameId}/choose`, { value });
  }

  state(gameId: string): Promise<PublicState> {
    return request(`${this.base}/api/v1/game/${gameId}`);
  }
}
