"""Batch rollout, benchmark metrics, learning-rate fits and cost accounting.

A rollout plays a policy over a set of problems, one episode each, on a
bounded worker pool; per-episode failures are recorded, never fatal.
Metrics compare a set of episode records against baseline records for the
same problems: median compliance deviation over connected pairs,
disconnection rate, and mean volume deviation from the budget.
"""

from __future__ import annotations

import csv
import json
import math
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .env import DesignEnv, EnvConfig
from .problems import BoundaryProblem

CSV_COLUMNS = (
    "problem_id",
    "connected",
    "compliance",
    "volume",
    "volume_target",
    "reward",
    "failed",
    "wall_time_s",
)


@dataclass
class EpisodeRecord:
    problem_id: str
    actions: list[list[float]]
    compliance: float | None
    volume: float
    volume_target: float
    connected: bool
    reward: float
    wall_time_s: float
    failed: bool = False

    def to_dict(self) -> dict:
        return {
            "problem_id": self.problem_id,
            "actions": self.actions,
            "compliance": self.compliance,
            "volume": self.volume,
            "volume_target": self.volume_target,
            "connected": self.connected,
            "reward": self.reward,
            "wall_time_s": self.wall_time_s,
            "failed": self.failed,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "EpisodeRecord":
        return cls(**{k: data[k] for k in cls.__dataclass_fields__ if k in data})


@dataclass
class MetricsReport:
    median_compliance_delta_pct: float
    disconnection_rate_pct: float
    mean_volume_delta_pct: float
    n_records: int
    n_pairs: int

    def to_dict(self) -> dict:
        return {
            "median_compliance_delta_pct": self.median_compliance_delta_pct,
            "disconnection_rate_pct": self.disconnection_rate_pct,
            "mean_volume_delta_pct": self.mean_volume_delta_pct,
            "n_records": self.n_records,
            "n_pairs": self.n_pairs,
        }


class RandomPolicy:
    """Uniform actions in [-1, 1]^6; deterministic per (seed, episode index)."""

    def __init__(self, seed: int = 0):
        self.seed = seed

    def actions(self, problem: BoundaryProblem, t_max: int, episode_index: int) -> np.ndarray:
        rng = np.random.default_rng([self.seed, episode_index])
        return rng.uniform(-1.0, 1.0, size=(t_max, 6))


class ReplayPolicy:
    """Plays a fixed action sequence on every problem."""

    def __init__(self, actions):
        self._actions = np.asarray(actions, dtype=float)

    def actions(self, problem, t_max, episode_index) -> np.ndarray:
        if self._actions.shape[0] != t_max:
            raise ValueError("replay length does not match the episode length")
        return self._actions


def play_episode(
    problem: BoundaryProblem, actions, config: EnvConfig | None = None
) -> EpisodeRecord:
    """Run one full episode from a fixed action sequence."""
    config = config or EnvConfig()
    env = DesignEnv(config)
    started = time.perf_counter()
    env.reset(problem=problem)
    reward, done = 0.0, False
    for action in actions:
        _, reward, done = env.step(action)
    if not done:
        raise ValueError("action sequence did not complete the episode")
    state = env.state
    return EpisodeRecord(
        problem_id=problem.problem_id,
        actions=[[float(v) for v in a] for a in state.actions],
        compliance=state.result.compliance if (state.connected and state.result) else None,
        volume=float(np.mean(state.field.rho)),
        volume_target=problem.volume_target,
        connected=state.connected,
        reward=reward,
        wall_time_s=time.perf_counter() - started,
        failed=state.analysis_failed,
    )


def _episode_task(args) -> dict:
    problem_dict, actions, config, index = args
    problem = BoundaryProblem.from_dict(problem_dict)
    try:
        record = play_episode(problem, actions, config)
    except Exception as exc:  # per-episode failures never abort the batch
        record = EpisodeRecord(
            problem_id=problem.problem_id,
            actions=[[float(v) for v in a] for a in actions],
            compliance=None,
            volume=float("nan"),
            volume_target=problem.volume_target,
            connected=False,
            reward=0.0,
            wall_time_s=0.0,
            failed=True,
        )
        warnings.warn(f"episode {index} failed: {exc}")
    return record.to_dict()


def rollout(
    policy,
    problems: list[BoundaryProblem],
    config: EnvConfig | None = None,
    workers: int = 1,
) -> list[EpisodeRecord]:
    """One episode per problem; order of results matches the input order."""
    config = config or EnvConfig()
    tasks = []
    failed = {}
    for i, p in enumerate(problems):
        try:
            tasks.append((p.to_dict(), policy.actions(p, config.t_max, i), config, i))
        except Exception as exc:
            warnings.warn(f"policy failed on episode {i}: {exc}")
            failed[i] = EpisodeRecord(
                problem_id=p.problem_id,
                actions=[],
                compliance=None,
                volume=float("nan"),
                volume_target=p.volume_target,
                connected=False,
                reward=0.0,
                wall_time_s=0.0,
                failed=True,
            ).to_dict()
    if workers <= 1 or len(tasks) <= 1:
        results = [_episode_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_episode_task, tasks))
    by_index = dict(zip((t[3] for t in tasks), results)) | failed
    return [EpisodeRecord.from_dict(by_index[i]) for i in range(len(problems))]


def metrics(records: list[EpisodeRecord], baseline: list[EpisodeRecord]) -> MetricsReport:
    """Aggregate comparison against baseline records with matching ids.

    The compliance deviation is a median over pairs where both runs are
    connected, so disconnected outliers cannot poison it; the volume
    deviation is measured against each problem's budget.
    """
    base_by_id = {r.problem_id: r for r in baseline}
    deltas = []
    for rec in records:
        base = base_by_id.get(rec.problem_id)
        if base is None:
            continue
        if rec.connected and base.connected and rec.compliance is not None and base.compliance is not None:
            deltas.append(100.0 * (rec.compliance - base.compliance) / base.compliance)
    if not records or not any(r.problem_id in base_by_id for r in records):
        raise ValueError("no records matched the baseline problem ids")
    n = len(records)
    disconnected = sum(1 for r in records if not r.connected)
    vol_deltas = [
        100.0 * (r.volume - r.volume_target) / r.volume_target
        for r in records
        if math.isfinite(r.volume)
    ]
    return MetricsReport(
        median_compliance_delta_pct=float(np.median(deltas)) if deltas else float("nan"),
        disconnection_rate_pct=100.0 * disconnected / n,
        mean_volume_delta_pct=float(np.mean(vol_deltas)) if vol_deltas else float("nan"),
        n_records=n,
        n_pairs=len(deltas),
    )


def reward_from_compliance(compliance: float) -> float:
    return 1.0 / math.log(compliance)


def inverse_compliance(reward: float) -> float:
    """Invert the reward squashing back to 1/compliance."""
    return math.exp(-1.0 / reward)


def fit_learning_rate(curve, normalization: float | None = None) -> float:
    """Through-origin slope of normalized inverse compliance over episodes.

    ``curve`` is a sequence of (episode, reward) points. Non-positive
    rewards cannot be inverted and are excluded with a warning. Pass
    ``normalization`` to share a scale across several training runs;
    otherwise the curve is normalized by its own peak.
    """
    xs, ics = [], []
    for episode, reward in curve:
        if reward <= 0:
            warnings.warn(f"excluding non-positive reward {reward!r} at episode {episode}")
            continue
        xs.append(float(episode))
        ics.append(inverse_compliance(reward))
    if not xs:
        raise ValueError("no usable points in the curve")
    norm = max(ics) if normalization is None else normalization
    x = np.asarray(xs)
    y = np.asarray(ics) / norm
    return float((x @ y) / (x @ x))


def breakeven(training_minutes: float, baseline_minutes: float, baseline_batch_size: int) -> int:
    """Problems the trained model must amortize to repay its training cost."""
    if baseline_minutes <= 0 or baseline_batch_size <= 0:
        raise ValueError("baseline cost and batch size must be positive")
    if training_minutes < 0:
        raise ValueError("training time cannot be negative")
    per_problem = baseline_minutes / baseline_batch_size
    return math.ceil(training_minutes / per_problem)


def write_records_jsonl(records: list[EpisodeRecord], path) -> None:
    with open(path, "w") as fh:
        for rec in records:
            fh.write(json.dumps(rec.to_dict()) + "\n")


def read_records_jsonl(path) -> list[EpisodeRecord]:
    records = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(EpisodeRecord.from_dict(json.loads(line)))
    return records


def write_records_csv(records: list[EpisodeRecord], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS, extrasaction="ignore")
        writer.writeheader()
        for rec in records:
            writer.writerow(rec.to_dict())
