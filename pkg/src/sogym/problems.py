"""Random boundary-condition problems and their 27-entry description vector.

A problem is one task instance: a support segment on one boundary, a unit
point load on the opposite boundary, a volume budget and the domain shape.
All quantities are drawn from uniform distributions; the generator is PCG64
so problems replay bit-exactly from their seed on any platform.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.special import cosdg, sindg

from .geometry import DomainSpec

BOUNDARIES = ("left", "right", "top", "bottom")
_OPPOSITE = {"left": "right", "right": "left", "top": "bottom", "bottom": "top"}

BETA_SIZE = 27
SUPPORT_TYPE_FULL = 0.0  # only support type in use; other codes reserved

SUPPORT_LENGTH_RANGE = (0.25, 1.0)
VOLUME_RANGE = (0.20, 0.40)
DIM_RANGE = (1.0, 2.0)

# Seed of the checked-in evaluation set (monitoring benchmark of 10 problems).
EVAL_SET_SEED = 2024


def opposite(boundary: str) -> str:
    return _OPPOSITE[boundary]


@dataclass(frozen=True)
class BoundaryProblem:
    """One sampled task. Positions and lengths are boundary fractions."""

    support_boundary: str
    support_length: float
    support_start: float
    load_boundary: str
    load_position: float
    load_angle_deg: float
    volume_target: float
    height: float
    width: float
    seed: int | None = None

    def __post_init__(self):
        if self.support_boundary not in BOUNDARIES:
            raise ValueError(f"unknown boundary {self.support_boundary!r}")
        if self.load_boundary != opposite(self.support_boundary):
            raise ValueError("load boundary must be opposite the support boundary")
        if not SUPPORT_LENGTH_RANGE[0] <= self.support_length <= SUPPORT_LENGTH_RANGE[1]:
            raise ValueError("support length out of range")
        if not 0.0 <= self.support_start <= 1.0 - self.support_length + 1e-12:
            raise ValueError("support segment exceeds its boundary")
        if not 0.0 <= self.load_position <= 1.0:
            raise ValueError("load position out of range")
        if not 0.0 <= self.load_angle_deg < 360.0:
            raise ValueError("load angle out of range")
        if not VOLUME_RANGE[0] <= self.volume_target <= VOLUME_RANGE[1]:
            raise ValueError("volume target out of range")

    def domain(self, elements_per_unit: int = 50) -> DomainSpec:
        return DomainSpec(self.width, self.height, elements_per_unit)

    @property
    def problem_id(self) -> str:
        digest = hashlib.sha1(self.to_json().encode()).hexdigest()
        return digest[:12]

    def to_dict(self) -> dict:
        return {
            "support_boundary": self.support_boundary,
            "support_length": self.support_length,
            "support_start": self.support_start,
            "load_boundary": self.load_boundary,
            "load_position": self.load_position,
            "load_angle_deg": self.load_angle_deg,
            "volume_target": self.volume_target,
            "height": self.height,
            "width": self.width,
            "seed": self.seed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "BoundaryProblem":
        return cls(**{k: data[k] for k in cls.__dataclass_fields__ if k in data})

    @classmethod
    def from_json(cls, text: str) -> "BoundaryProblem":
        return cls.from_dict(json.loads(text))


def sample(seed: int) -> BoundaryProblem:
    """Draw one problem; identical seeds give identical problems."""
    rng = np.random.default_rng(seed)
    for _ in range(100):
        support_length = rng.uniform(*SUPPORT_LENGTH_RANGE)
        support_boundary = BOUNDARIES[rng.integers(0, 4)]
        support_start = rng.uniform(0.0, 1.0 - support_length)
        load_position = rng.uniform(0.0, 1.0)
        load_angle = rng.uniform(0.0, 360.0)
        height = rng.uniform(*DIM_RANGE)
        width = rng.uniform(*DIM_RANGE)
        volume_target = rng.uniform(*VOLUME_RANGE)
        problem = BoundaryProblem(
            support_boundary=support_boundary,
            support_length=support_length,
            support_start=support_start,
            load_boundary=opposite(support_boundary),
            load_position=load_position,
            load_angle_deg=load_angle,
            volume_target=volume_target,
            height=height,
            width=width,
            seed=int(seed),
        )
        if _support_node_count(problem) >= 2:
            return problem
    raise RuntimeError("could not sample a non-degenerate support segment")


def _support_node_count(p: BoundaryProblem, elements_per_unit: int = 50) -> int:
    d = p.domain(elements_per_unit)
    n_edge = d.ny if p.support_boundary in ("left", "right") else d.nx
    frac = np.arange(n_edge + 1) / n_edge
    lo = p.support_start - 1e-9
    hi = p.support_start + p.support_length + 1e-9
    return int(np.count_nonzero((frac >= lo) & (frac <= hi)))


def eval_set(seed: int = EVAL_SET_SEED, n: int = 10) -> list[BoundaryProblem]:
    """Deterministic list of problems derived from one master seed."""
    if n < 1:
        raise ValueError("n must be >= 1")
    child_seeds = np.random.SeedSequence(seed).generate_state(n, dtype=np.uint64)
    return [sample(int(s)) for s in child_seeds]


def encode_beta(p: BoundaryProblem) -> np.ndarray:
    """Pack a problem into the fixed 27-entry description vector.

    Layout (0-based): 0 support-boundary code / 3, 1 support type,
    2 support length, 3 support start, 4-8 load positions, 9-13 load
    orientations / 360, 14-18 load x-components, 19-23 load y-components,
    24 volume target, 25 width, 26 height. Only the first load slot is used;
    unused slots stay zero.
    """
    beta = np.zeros(BETA_SIZE)
    beta[0] = BOUNDARIES.index(p.support_boundary) / 3.0
    beta[1] = SUPPORT_TYPE_FULL
    beta[2] = p.support_length
    beta[3] = p.support_start
    beta[4] = p.load_position
    beta[9] = p.load_angle_deg / 360.0
    beta[14] = cosdg(p.load_angle_deg)
    beta[19] = sindg(p.load_angle_deg)
    beta[24] = p.volume_target
    beta[25] = p.width
    beta[26] = p.height
    return beta


def decode_beta(beta) -> BoundaryProblem:
    """Inverse of :func:`encode_beta`; rejects malformed vectors.

    The seed is not part of the vector, so the decoded problem carries
    ``seed=None``.
    """
    beta = np.asarray(beta, dtype=float).reshape(-1)
    if beta.size != BETA_SIZE:
        raise ValueError(f"description vector must have {BETA_SIZE} entries, got {beta.size}")
    code = beta[0] * 3.0
    idx = int(round(code))
    if not 0 <= idx <= 3 or abs(code - idx) > 1e-9:
        raise ValueError(f"invalid support boundary code {beta[0]!r}")
    if beta[1] != SUPPORT_TYPE_FULL:
        raise ValueError("unsupported support-type code")
    unused = np.concatenate([beta[5:9], beta[10:14], beta[15:19], beta[20:24]])
    if np.any(unused != 0.0):
        raise ValueError("unused load slots must be zero")
    angle = beta[9] * 360.0
    if not math.isclose(cosdg(angle), beta[14], abs_tol=1e-9) or not math.isclose(
        sindg(angle), beta[19], abs_tol=1e-9
    ):
        raise ValueError("load components inconsistent with the load orientation")
    try:
        return BoundaryProblem(
            support_boundary=BOUNDARIES[idx],
            support_length=float(beta[2]),
            support_start=float(beta[3]),
            load_boundary=opposite(BOUNDARIES[idx]),
            load_position=float(beta[4]),
            load_angle_deg=float(angle),
            volume_target=float(beta[24]),
            width=float(beta[25]),
            height=float(beta[26]),
        )
    except ValueError as exc:
        raise ValueError(f"malformed description vector: {exc}") from exc


def with_seed(p: BoundaryProblem, seed: int | None) -> BoundaryProblem:
    return replace(p, seed=seed)
