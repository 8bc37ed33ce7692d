"""Session service: episodes over HTTP for remote policies and the game UI.

Sessions wrap one episode each and are independent; requests to the same
session are serialized by a per-session lock. Episodes and leaderboard
entries persist to append-only JSON-lines files with an in-memory index
rebuilt at startup, and every leaderboard score is recomputed server-side
by replaying the submitted action sequence.
"""

from __future__ import annotations

import base64
import io
import json
import threading
import time
import uuid
from pathlib import Path

import numpy as np
from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel

from .env import DesignEnv, EnvConfig, Observation, ObsMode, RewardConfig, RewardMode
from .problems import BoundaryProblem, sample

DEFAULT_CAPACITY = 256
DEFAULT_TTL_S = 3600.0


class CreateSessionRequest(BaseModel):
    seed: int | None = None
    problem: dict | None = None
    mode: str = "game"
    reward_mode: str = "sparse"
    t_max: int = 8


class ActionRequest(BaseModel):
    action: list[float]


class SubmitRequest(BaseModel):
    player: str


class _Session:
    def __init__(self, sid: str, env: DesignEnv, problem: BoundaryProblem):
        self.id = sid
        self.env = env
        self.problem = problem
        self.lock = threading.Lock()
        self.created_at = time.time()
        self.touched_at = self.created_at
        self.last_reward = 0.0
        self.submitted = False

    def touch(self):
        self.touched_at = time.time()


def _png_b64(raster: np.ndarray) -> str:
    from PIL import Image

    img = Image.fromarray(np.ascontiguousarray(raster.transpose(1, 2, 0)))
    buf = io.BytesIO()
    img.save(buf, format="PNG")
    return base64.b64encode(buf.getvalue()).decode("ascii")


def observation_payload(obs: Observation) -> dict:
    payload = {
        "beta": [float(v) for v in obs.beta],
        "steps_left": obs.steps_left,
        "design_variables": [float(v) for v in obs.design_variables],
        "volume": obs.volume,
    }
    for name, raster in (("design_image", obs.design_image), ("strain_image", obs.strain_image)):
        if raster is not None:
            payload[name] = raster.tolist()
            payload[name + "_png"] = _png_b64(raster)
    if obs.score is not None:
        payload["score"] = obs.score
    return payload


class _Store:
    """Append-only JSON-lines persistence with an in-memory leaderboard."""

    def __init__(self, directory: Path):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self.episodes_path = self.directory / "episodes.jsonl"
        self.leaderboard_path = self.directory / "leaderboard.jsonl"
        self.lock = threading.Lock()
        self.leaderboard: list[dict] = []
        if self.leaderboard_path.exists():
            with open(self.leaderboard_path) as fh:
                for line in fh:
                    line = line.strip()
                    if line:
                        self.leaderboard.append(json.loads(line))

    def append_episode(self, record: dict) -> None:
        with self.lock, open(self.episodes_path, "a") as fh:
            fh.write(json.dumps(record) + "\n")

    def append_leaderboard(self, entry: dict) -> None:
        with self.lock:
            with open(self.leaderboard_path, "a") as fh:
                fh.write(json.dumps(entry) + "\n")
            self.leaderboard.append(entry)


def _replay_score(problem: BoundaryProblem, actions, config: EnvConfig) -> float:
    env = DesignEnv(config)
    env.reset(problem=problem)
    reward = 0.0
    for action in actions:
        _, reward, _ = env.step(action)
    return reward if config.obs_mode is not ObsMode.GAME else env.state.score


def create_app(
    store_dir: Path | str = "./sogym-data",
    capacity: int = DEFAULT_CAPACITY,
    ttl_s: float = DEFAULT_TTL_S,
    ui_dir: Path | str | None = None,
) -> FastAPI:
    app = FastAPI(title="sogym session service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    if ui_dir is not None and Path(ui_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/app", StaticFiles(directory=ui_dir, html=True), name="ui")
    store = _Store(Path(store_dir))
    sessions: dict[str, _Session] = {}
    registry_lock = threading.Lock()

    def _purge_expired() -> None:
        now = time.time()
        expired = [sid for sid, s in sessions.items() if now - s.touched_at > ttl_s]
        for sid in expired:
            sessions.pop(sid, None)

    def _get_session(sid: str) -> _Session:
        with registry_lock:
            _purge_expired()
            session = sessions.get(sid)
        if session is None:
            raise HTTPException(status_code=404, detail="unknown session")
        session.touch()
        return session

    def _session_payload(session: _Session, obs: Observation, reward=None, done=None) -> dict:
        payload = {
            "session_id": session.id,
            "seed": session.problem.seed,
            "problem": session.problem.to_dict(),
            "problem_id": session.problem.problem_id,
            "mode": session.env.config.obs_mode.value,
            "t": session.env.state.t,
            "t_max": session.env.config.t_max,
            "done": session.env.state.done,
            "score": session.env.state.score,
            "observation": observation_payload(obs),
        }
        if reward is not None:
            payload["reward"] = reward
        if done is not None:
            payload["done"] = done
        return payload

    @app.post("/sessions", status_code=201)
    def create_session(req: CreateSessionRequest):
        try:
            obs_mode = ObsMode(req.mode)
            reward_mode = RewardMode(req.reward_mode)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=f"invalid mode: {exc}")
        if req.problem is not None:
            try:
                problem = BoundaryProblem.from_dict(req.problem)
            except (ValueError, TypeError, KeyError) as exc:
                raise HTTPException(status_code=400, detail=f"malformed problem: {exc}")
        else:
            seed = req.seed if req.seed is not None else int(uuid.uuid4().int % 2**63)
            problem = sample(seed)
        config = EnvConfig(obs_mode=obs_mode, reward=RewardConfig(mode=reward_mode), t_max=req.t_max)
        env = DesignEnv(config)
        obs = env.reset(problem=problem)
        session = _Session(uuid.uuid4().hex, env, problem)
        with registry_lock:
            _purge_expired()
            if len(sessions) >= capacity:
                raise HTTPException(status_code=503, detail="session capacity reached")
            sessions[session.id] = session
        return _session_payload(session, obs)

    @app.get("/sessions/{sid}")
    def get_session(sid: str):
        session = _get_session(sid)
        with session.lock:
            return _session_payload(session, session.env._observe())

    @app.post("/sessions/{sid}/actions")
    def post_action(sid: str, req: ActionRequest):
        session = _get_session(sid)
        if len(req.action) != 6 or not all(isinstance(v, (int, float)) for v in req.action):
            raise HTTPException(status_code=422, detail="action must be 6 numbers")
        with session.lock:
            if session.env.state.done:
                raise HTTPException(status_code=409, detail="episode is over")
            obs, reward, done = session.env.step(req.action)
            session.last_reward = reward
            return _session_payload(session, obs, reward=reward, done=done)

    @app.post("/sessions/{sid}/reset")
    def reset_session(sid: str):
        session = _get_session(sid)
        with session.lock:
            obs = session.env.reset(problem=session.problem)
            session.last_reward = 0.0
            session.submitted = False
            return _session_payload(session, obs)

    @app.post("/sessions/{sid}/submit")
    def submit(sid: str, req: SubmitRequest):
        session = _get_session(sid)
        with session.lock:
            state = session.env.state
            if not state.done:
                raise HTTPException(status_code=409, detail="episode is not finished")
            actions = [list(map(float, a)) for a in state.actions]
            recomputed = _replay_score(session.problem, actions, session.env.config)
            cached = (
                state.score
                if session.env.config.obs_mode is ObsMode.GAME
                else session.last_reward
            )
            if recomputed != cached:
                raise HTTPException(
                    status_code=500,
                    detail=f"score integrity failure: {recomputed} != {cached}",
                )
            entry = {
                "player": req.player,
                "problem_id": session.problem.problem_id,
                "score": recomputed,
                "timestamp": time.time(),
                "session_id": session.id,
                "episode": {
                    "problem": session.problem.to_dict(),
                    "actions": actions,
                    "reward": session.last_reward,
                },
            }
            store.append_episode(entry["episode"] | {"problem_id": session.problem.problem_id})
            store.append_leaderboard(entry)
            session.submitted = True
            return entry

    @app.get("/leaderboard")
    def leaderboard(problem: str | None = None):
        entries = store.leaderboard
        if problem is not None:
            entries = [e for e in entries if e["problem_id"] == problem]
        return sorted(entries, key=lambda e: -e["score"])

    return app
