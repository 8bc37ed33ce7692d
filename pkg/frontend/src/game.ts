/**
 * Framework-free game session logic.
 *
 * Holds the server-confirmed state only: every score, image and counter the
 * UI shows comes from server responses, never from local recomputation, so
 * the display can never diverge from what the leaderboard will verify.
 */

import { GameApi } from "./api.js";
import { placementToAction } from "./mapping.js";
import type { Placement, Problem, SessionState } from "./types.js";

export type GamePhase = "placing" | "done" | "submitted";

export interface GameEvents {
  onState?: (state: SessionState) => void;
  onPhase?: (phase: GamePhase) => void;
}

export class GameSession {
  state: SessionState | null = null;
  phase: GamePhase = "placing";
  placements: Placement[] = [];

  constructor(
    private api: GameApi,
    private events: GameEvents = {},
  ) {}

  get problem(): Problem {
    if (!this.state) throw new Error("no active session");
    return this.state.problem;
  }

  get componentsLeft(): number {
    if (!this.state) return 0;
    return this.state.t_max - this.state.t;
  }

  get score(): number {
    return this.state?.score ?? 0;
  }

  /** Heatmap is meaningful only once the load path is connected. */
  get heatmapVisible(): boolean {
    const img = this.state?.observation.strain_image;
    if (!img) return false;
    return img.some((plane) => plane.some((row) => row.some((v) => v !== 0)));
  }

  async start(options: { seed?: number; problem?: Problem }): Promise<SessionState> {
    this.state = await this.api.createSession({ ...options, mode: "game" });
    this.placements = [];
    this.setPhase("placing");
    this.events.onState?.(this.state);
    return this.state;
  }

  async resume(sessionId: string): Promise<SessionState> {
    this.state = await this.api.getSession(sessionId);
    this.setPhase(this.state.done ? "done" : "placing");
    this.events.onState?.(this.state);
    return this.state;
  }

  async place(placement: Placement): Promise<SessionState> {
    if (!this.state) throw new Error("no active session");
    if (this.state.done) throw new Error("episode is over");
    const action = placementToAction(placement, this.problem);
    this.state = await this.api.postAction(this.state.session_id, action);
    this.placements.push(placement);
    if (this.state.done) this.setPhase("done");
    this.events.onState?.(this.state);
    return this.state;
  }

  async submit(player: string) {
    if (!this.state) throw new Error("no active session");
    if (!this.state.done) throw new Error("finish the episode before submitting");
    const entry = await this.api.submit(this.state.session_id, player);
    this.setPhase("submitted");
    return entry;
  }

  async restart(): Promise<SessionState> {
    if (!this.state) throw new Error("no active session");
    this.state = await this.api.reset(this.state.session_id);
    this.placements = [];
    this.setPhase("placing");
    this.events.onState?.(this.state);
    return this.state;
  }

  private setPhase(phase: GamePhase) {
    this.phase = phase;
    this.events.onPhase?.(phase);
  }
}

/** Drive a recorded action sequence through a fresh session, step by step. */
export async function replayEntry(
  api: GameApi,
  problem: Problem,
  actions: number[][],
  onStep?: (state: SessionState, index: number) => void,
): Promise<SessionState> {
  let state = await api.createSession({ problem, mode: "game" });
  for (let i = 0; i < actions.length; i++) {
    state = await api.postAction(state.session_id, actions[i]);
    onStep?.(state, i);
  }
  return state;
}
