/** Thin typed client for the session service. */

import type { LeaderboardEntry, Problem, SessionState } from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  const resp = await fetch(url, {
    headers: { "Content-Type": "application/json" },
    ...init,
  });
  if (!resp.ok) {
    let detail = resp.statusText;
    try {
      const body = (await resp.json()) as { detail?: string };
      if (body.detail) detail = JSON.stringify(body.detail);
    } catch {
      // non-JSON error body; keep the status text
    }
    throw new ApiError(resp.status, detail);
  }
  return (await resp.json()) as T;
}

export class GameApi {
  constructor(public baseUrl: string) {}

  createSession(options: {
    seed?: number;
    problem?: Problem;
    mode?: string;
  }): Promise<SessionState> {
    return request(`${this.baseUrl}/sessions`, {
      method: "POST",
      body: JSON.stringify({ mode: "game", ...options }),
    });
  }

  getSession(id: string): Promise<SessionState> {
    return request(`${this.baseUrl}/sessions/${id}`);
  }

  postAction(id: string, action: number[]): Promise<SessionState> {
    return request(`${this.baseUrl}/sessions/${id}/actions`, {
      method: "POST",
      body: JSON.stringify({ action }),
    });
  }

  reset(id: string): Promise<SessionState> {
    return request(`${this.baseUrl}/sessions/${id}/reset`, { method: "POST" });
  }

  submit(id: string, player: string): Promise<LeaderboardEntry> {
    return request(`${this.baseUrl}/sessions/${id}/submit`, {
      method: "POST",
      body: JSON.stringify({ player }),
    });
  }

  leaderboard(problemId?: string): Promise<LeaderboardEntry[]> {
    const query = problemId ? `?problem=${encodeURIComponent(problemId)}` : "";
    return request(`${this.baseUrl}/leaderboard${query}`);
  }
}
