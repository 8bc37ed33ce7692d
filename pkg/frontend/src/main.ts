/** DOM entry point: play view, thickness sliders, leaderboard and replay. */

import { ApiError, GameApi } from "./api.js";
import { GameSession, replayEntry } from "./game.js";
import { canvasToDomain, thicknessBounds, viewport, Viewport } from "./mapping.js";
import { drawPreview, drawProblem, drawRaster } from "./render.js";
import type { LeaderboardEntry, Placement, SessionState } from "./types.js";

const CANVAS_SIZE = 512;

document.body.innerHTML = `
<div id="app">
  <h1>structure game</h1>
  <div id="controls">
    <label>seed <input id="seed" type="number" value="7"></label>
    <button id="new-game">new game</button>
    <button id="restart">restart</button>
    <span id="status"></span>
  </div>
  <div id="boards">
    <div>
      <canvas id="board" width="${CANVAS_SIZE}" height="${CANVAS_SIZE}"></canvas>
      <div>
        <label>end A thickness <input id="ta" type="range" min="0" max="100" value="50"></label>
        <label>end B thickness <input id="tb" type="range" min="0" max="100" value="50"></label>
      </div>
    </div>
    <div>
      <canvas id="heatmap" width="256" height="256"></canvas>
      <div id="gauges">
        <div>score: <span id="score">0</span></div>
        <div>components left: <span id="left">-</span></div>
        <div>volume: <span id="volume">0</span> / budget <span id="budget">-</span></div>
      </div>
      <div id="submit-row">
        <input id="player" placeholder="player name">
        <button id="submit" disabled>submit score</button>
      </div>
    </div>
  </div>
  <h2>leaderboard</h2>
  <div id="leaderboard"></div>
</div>`;

const api = new GameApi("");
const board = document.getElementById("board") as HTMLCanvasElement;
const heatmap = document.getElementById("heatmap") as HTMLCanvasElement;
const boardCtx = board.getContext("2d")!;
const heatCtx = heatmap.getContext("2d")!;
const status = document.getElementById("status")!;
const scoreEl = document.getElementById("score")!;
const leftEl = document.getElementById("left")!;
const volumeEl = document.getElementById("volume")!;
const budgetEl = document.getElementById("budget")!;
const submitBtn = document.getElementById("submit") as HTMLButtonElement;
const playerInput = document.getElementById("player") as HTMLInputElement;
const taSlider = document.getElementById("ta") as HTMLInputElement;
const tbSlider = document.getElementById("tb") as HTMLInputElement;

let vp: Viewport | null = null;
let drag: { xa: number; ya: number } | null = null;
let preview: Placement | null = null;

const session = new GameSession(api, {
  onState: redraw,
  onPhase: (phase) => {
    submitBtn.disabled = phase !== "done";
    status.textContent =
      phase === "done"
        ? "episode over - submit your score"
        : phase === "submitted"
          ? "submitted!"
          : "drag on the board to place a bar";
  },
});

function sliderThickness(slider: HTMLInputElement): number {
  const { lo, hi } = thicknessBounds(session.problem);
  return lo + (Number(slider.value) / 100) * (hi - lo);
}

function redraw(state: SessionState) {
  vp = viewport(state.problem, CANVAS_SIZE);
  boardCtx.clearRect(0, 0, CANVAS_SIZE, CANVAS_SIZE);
  if (state.observation.design_image) {
    drawRaster(boardCtx, state.observation.design_image, CANVAS_SIZE);
  }
  drawProblem(boardCtx, vp, state.problem);
  if (preview) drawPreview(boardCtx, vp, preview);

  heatCtx.clearRect(0, 0, heatmap.width, heatmap.height);
  if (session.heatmapVisible && state.observation.strain_image) {
    drawRaster(heatCtx, state.observation.strain_image, heatmap.width);
  } else {
    heatCtx.fillStyle = "#111";
    heatCtx.fillRect(0, 0, heatmap.width, heatmap.height);
    heatCtx.fillStyle = "#ddd";
    heatCtx.fillText("connect the load path to see strain", 16, 128);
  }

  scoreEl.textContent = state.score.toFixed(4);
  leftEl.textContent = String(session.componentsLeft);
  volumeEl.textContent = state.observation.volume.toFixed(3);
  budgetEl.textContent = state.problem.volume_target.toFixed(3);
}

board.addEventListener("mousedown", (e: MouseEvent) => {
  if (!vp || session.phase !== "placing") return;
  const p = canvasToDomain(vp, session.problem, e.offsetX, e.offsetY);
  drag = { xa: p.x, ya: p.y };
});

board.addEventListener("mousemove", (e: MouseEvent) => {
  if (!drag || !vp || !session.state) return;
  const p = canvasToDomain(vp, session.problem, e.offsetX, e.offsetY);
  preview = {
    ...drag,
    xb: p.x,
    yb: p.y,
    ta: sliderThickness(taSlider),
    tb: sliderThickness(tbSlider),
  };
  redraw(session.state);
});

board.addEventListener("mouseup", async () => {
  if (!drag || !preview) return;
  const placement = preview;
  drag = null;
  preview = null;
  try {
    await session.place(placement);
  } catch (err) {
    showError(err);
  }
});

document.getElementById("new-game")!.addEventListener("click", async () => {
  const seed = Number((document.getElementById("seed") as HTMLInputElement).value);
  try {
    await session.start({ seed });
    await refreshLeaderboard();
  } catch (err) {
    showError(err);
  }
});

document.getElementById("restart")!.addEventListener("click", async () => {
  try {
    await session.restart();
  } catch (err) {
    showError(err);
  }
});

submitBtn.addEventListener("click", async () => {
  try {
    await session.submit(playerInput.value || "anonymous");
    await refreshLeaderboard();
  } catch (err) {
    showError(err);
  }
});

function showError(err: unknown) {
  if (err instanceof ApiError && err.status === 404) {
    status.textContent = "session expired - start a new game";
  } else {
    status.textContent = String(err);
  }
}

async function refreshLeaderboard() {
  const root = document.getElementById("leaderboard")!;
  // scope the board to the problem being played, when there is one
  const entries = await api.leaderboard(session.state?.problem_id);
  if (entries.length === 0) {
    root.textContent = "no submissions yet";
    return;
  }
  root.innerHTML = "";
  const table = document.createElement("table");
  table.innerHTML = "<tr><th>player</th><th>problem</th><th>score</th><th></th></tr>";
  for (const entry of entries) {
    const row = document.createElement("tr");
    row.innerHTML = `<td>${entry.player}</td><td>${entry.problem_id}</td><td>${entry.score.toFixed(4)}</td>`;
    const cell = document.createElement("td");
    const btn = document.createElement("button");
    btn.textContent = "replay";
    btn.addEventListener("click", () => runReplay(entry));
    cell.appendChild(btn);
    row.appendChild(cell);
    table.appendChild(row);
  }
  root.appendChild(table);
}

async function runReplay(entry: LeaderboardEntry) {
  status.textContent = `replaying ${entry.player}...`;
  const final = await replayEntry(api, entry.episode.problem, entry.episode.actions, (state) => {
    redraw(state);
  });
  status.textContent = `replay score ${final.score.toFixed(4)} (stored ${entry.score.toFixed(4)})`;
}

refreshLeaderboard().catch(showError);
