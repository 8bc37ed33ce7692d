"""Episodic design environment: sequential bar placement scored by stiffness.

An episode fixes one boundary-condition problem. The agent (or player)
places up to ``t_max`` bars; the design is projected to densities after each
placement. Structural analysis runs per step in game mode, otherwise only at
the end of the episode. The terminal reward squashes compliance through
1/ln(C), gated on a connected load path.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from . import fea, problems
from .geometry import DomainSpec, MmcComponent, scale_action, tdf_grid
from .projection import (
    EMPTY_LEVELSET,
    DensityField,
    ProjectionParams,
    project_density,
    volume_fraction,
)

IMAGE_SIZE = 64
DEFAULT_T_MAX = 8

# Qualitative palette for component fills, one entry per placement slot.
PALETTE = (
    (31, 119, 180),
    (255, 127, 14),
    (44, 160, 44),
    (214, 39, 40),
    (148, 103, 189),
    (140, 86, 75),
    (227, 119, 194),
    (127, 127, 127),
)
BACKGROUND_RGB = (255, 255, 255)
SUPPORT_RGB = (0, 0, 0)
LOAD_RGB = (178, 34, 34)


class ObsMode(str, enum.Enum):
    VECTOR = "vector"
    IMAGE = "image"
    GAME = "game"


class RewardMode(str, enum.Enum):
    SPARSE = "sparse"
    SOFT_VOLUME = "soft_volume"
    STRAIN_UNIFORM = "strain_uniform"


@dataclass(frozen=True)
class RewardConfig:
    mode: RewardMode = RewardMode.SPARSE
    require_connectivity: bool = True
    # 1/ln(C) diverges as C -> 1+; compliances at or below 1 + this guard
    # map to the cap so random inputs can never produce inf/NaN.
    reward_cap: float = 10.0
    compliance_guard: float = 1e-9


@dataclass(frozen=True)
class EnvConfig:
    obs_mode: ObsMode = ObsMode.VECTOR
    reward: RewardConfig = dc_field(default_factory=RewardConfig)
    t_max: int = DEFAULT_T_MAX
    elements_per_unit: int = 50
    projection: ProjectionParams = dc_field(default_factory=ProjectionParams)
    nu: float = fea.POISSON_RATIO


@dataclass
class Observation:
    beta: np.ndarray
    steps_left: float
    design_variables: np.ndarray
    volume: float
    design_image: np.ndarray | None = None
    strain_image: np.ndarray | None = None
    score: float | None = None


@dataclass
class EpisodeState:
    problem: problems.BoundaryProblem
    config: EnvConfig
    domain: DomainSpec
    mesh: fea.Mesh
    loadcase: fea.LoadCase
    t: int = 0
    placed: list[MmcComponent] = dc_field(default_factory=list)
    actions: list[np.ndarray] = dc_field(default_factory=list)
    phi_nodes: np.ndarray | None = None
    field: DensityField | None = None
    result: fea.SolveResult | None = None
    connected: bool = False
    analysis_failed: bool = False
    score: float = 0.0

    @property
    def done(self) -> bool:
        return self.t >= self.config.t_max


class EpisodeDoneError(RuntimeError):
    """Raised on step() after the episode has ended."""


def compute_reward(
    cfg: RewardConfig,
    compliance: float | None,
    volume: float,
    volume_target: float,
    connected: bool,
    strain_energy: np.ndarray | None = None,
) -> float:
    """Reward of a (usually terminal) design under the configured mode."""
    if cfg.require_connectivity and not connected:
        return 0.0
    if compliance is None:
        return 0.0
    if compliance <= 1.0 + cfg.compliance_guard:
        base = cfg.reward_cap
    else:
        base = 1.0 / math.log(compliance)
    if cfg.mode is RewardMode.SPARSE:
        if volume > volume_target:
            return 0.0
        r = base
    elif cfg.mode is RewardMode.SOFT_VOLUME:
        r = base * (1.0 - abs(volume - volume_target)) ** 2
    else:  # strain-uniformity factor
        if strain_energy is None:
            return 0.0
        sigma = float(np.std(strain_energy))
        mu = float(np.mean(strain_energy))
        factor = 1.0 if sigma + mu == 0.0 else 1.0 - sigma / (sigma + mu)
        r = base * factor
    return float(min(max(r, 0.0), cfg.reward_cap))


class DesignEnv:
    """Reset/step interface around :class:`EpisodeState`.

    Fully deterministic: the problem (or its seed), the action sequence and
    the configuration decide every observation byte and reward.
    """

    def __init__(self, config: EnvConfig | None = None):
        self.config = config or EnvConfig()
        self.state: EpisodeState | None = None

    def reset(
        self,
        problem: problems.BoundaryProblem | None = None,
        seed: int | None = None,
    ) -> Observation:
        if problem is None:
            if seed is None:
                raise ValueError("reset needs a problem or a seed")
            problem = problems.sample(seed)
        domain = problem.domain(self.config.elements_per_unit)
        mesh = fea.Mesh.from_domain(domain)
        lc = fea.build_loadcase(problem, mesh)
        phi = np.full((domain.nx + 1, domain.ny + 1), EMPTY_LEVELSET)
        self.state = EpisodeState(
            problem=problem,
            config=self.config,
            domain=domain,
            mesh=mesh,
            loadcase=lc,
            phi_nodes=phi,
            field=project_density(phi, self.config.projection),
        )
        return self._observe()

    def step(self, action) -> tuple[Observation, float, bool]:
        state = self.state
        if state is None:
            raise RuntimeError("reset() must be called before step()")
        if state.done:
            raise EpisodeDoneError("episode is over; call reset()")

        component = scale_action(action, state.domain)
        state.placed.append(component)
        state.actions.append(np.clip(np.asarray(action, dtype=float).reshape(-1), -1.0, 1.0))
        state.t += 1
        np.maximum(state.phi_nodes, tdf_grid(component, state.domain), out=state.phi_nodes)
        state.field = project_density(state.phi_nodes, self.config.projection)

        reward = 0.0
        if self.config.obs_mode is ObsMode.GAME or state.done:
            self._analyze(state)
            state.score = self._current_score(state)
        if state.done:
            reward = self._terminal_reward(state)
        return self._observe(), reward, state.done

    def _analyze(self, state: EpisodeState) -> None:
        state.connected = fea.connectivity(state.field, state.loadcase, state.mesh)
        state.result = None
        state.analysis_failed = False
        # disconnected designs score zero, so their solve is skipped unless
        # the connectivity gate has been turned off
        if state.connected or not self.config.reward.require_connectivity:
            try:
                state.result = fea.analyze(
                    state.field, state.mesh, state.loadcase, self.config.nu
                )
            except fea.FeaError:
                state.analysis_failed = True

    def _terminal_reward(self, state: EpisodeState) -> float:
        if state.analysis_failed:
            return 0.0
        compliance = state.result.compliance if state.result else None
        energy = state.result.strain_energy if state.result else None
        return compute_reward(
            self.config.reward,
            compliance,
            volume_fraction(state.field),
            state.problem.volume_target,
            state.connected,
            energy,
        )

    def _current_score(self, state: EpisodeState) -> float:
        if state.analysis_failed or state.result is None:
            return 0.0
        return compute_reward(
            self.config.reward,
            state.result.compliance,
            volume_fraction(state.field),
            state.problem.volume_target,
            state.connected,
            state.result.strain_energy,
        )

    def _observe(self) -> Observation:
        state = self.state
        t_max = self.config.t_max
        design = np.zeros(6 * t_max)
        for k, a in enumerate(state.actions):
            design[6 * k : 6 * k + 6] = a
        obs = Observation(
            beta=problems.encode_beta(state.problem),
            steps_left=(t_max - state.t) / t_max,
            design_variables=design,
            volume=volume_fraction(state.field),
        )
        if self.config.obs_mode in (ObsMode.IMAGE, ObsMode.GAME):
            obs.design_image = render_design_image(state)
        if self.config.obs_mode is ObsMode.GAME:
            obs.strain_image = render_strain_image(state)
            obs.score = state.score
        return obs


def jet_colormap(v: float) -> tuple[int, int, int]:
    """Classic jet colour of a value in [0, 1] as 8-bit RGB.

    Red is 0 until 3/8, ramps to 1 at 5/8, holds until 7/8, then falls to
    0.5 at 1; green ramps over [1/8, 3/8], holds, falls over [5/8, 7/8];
    blue mirrors red (blue(v) = red(1 - v)).
    """
    arr = _jet_rgb(np.array([v], dtype=float))
    return int(arr[0, 0]), int(arr[0, 1]), int(arr[0, 2])


def _jet_rgb(v: np.ndarray) -> np.ndarray:
    """Vectorized jet: returns uint8 array of shape v.shape + (3,)."""
    v = np.clip(np.asarray(v, dtype=float), 0.0, 1.0)
    r = np.clip(np.minimum((v - 0.375) * 4.0, 1.0 - (v - 0.875) * 4.0), 0.0, 1.0)
    g = np.clip(np.minimum((v - 0.125) * 4.0, 1.0 - (v - 0.625) * 4.0), 0.0, 1.0)
    b = np.clip(np.minimum((0.625 - v) * 4.0, 1.0 + (v - 0.125) * 4.0), 0.0, 1.0)
    return np.rint(np.stack([r, g, b], axis=-1) * 255.0).astype(np.uint8)


def _letterbox(domain: DomainSpec) -> tuple[float, int, int, int, int]:
    """Scale and offsets mapping the domain into a centered 64x64 raster."""
    scale = IMAGE_SIZE / max(domain.width, domain.height)
    pw = max(1, int(round(domain.width * scale)))
    ph = max(1, int(round(domain.height * scale)))
    x_off = (IMAGE_SIZE - pw) // 2
    y_off = (IMAGE_SIZE - ph) // 2
    return scale, pw, ph, x_off, y_off


def _pixel_centers(domain: DomainSpec):
    """Domain coordinates of every letterboxed pixel center.

    Returns (xs[pw], ys[ph], x_off, y_off, pw, ph); image row r (top down)
    maps to ys[r].
    """
    scale, pw, ph, x_off, y_off = _letterbox(domain)
    xs = (np.arange(pw) + 0.5) / scale
    ys = (ph - np.arange(ph) - 0.5) / scale
    return xs, ys, x_off, y_off, pw, ph


def render_design_image(state: EpisodeState) -> np.ndarray:
    """Raster of the current design: components, support band, load arrow.

    Components fill pixels where their own field is non-negative, painted in
    placement order with the fixed palette. Shape (3, 64, 64), uint8.
    """
    domain = state.domain
    img = np.zeros((IMAGE_SIZE, IMAGE_SIZE, 3), dtype=np.uint8)
    xs, ys, x_off, y_off, pw, ph = _pixel_centers(domain)
    img[y_off : y_off + ph, x_off : x_off + pw] = BACKGROUND_RGB

    for k, comp in enumerate(state.placed):
        color = PALETTE[k % len(PALETTE)]
        phi = _component_field(comp, xs, ys)
        mask = phi >= 0.0
        img[y_off : y_off + ph, x_off : x_off + pw][mask] = color

    _draw_support(img, state, xs, ys, x_off, y_off, pw, ph)
    _draw_load(img, state, x_off, y_off, pw, ph)
    return np.ascontiguousarray(img.transpose(2, 0, 1))


def _component_field(comp: MmcComponent, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    from .geometry import THICKNESS_FLOOR, component_frame

    f = component_frame(comp)
    ct, st = math.cos(f.theta), math.sin(f.theta)
    dx = xs[None, :] - f.x0
    dy = ys[:, None] - f.y0
    x1 = ct * dx + st * dy
    y1 = -st * dx + ct * dy
    t = 0.5 * (comp.ta + comp.tb) + 0.5 * (comp.tb - comp.ta) * x1 / f.length
    np.maximum(t, THICKNESS_FLOOR, out=t)
    u = x1 / f.length
    v = y1 / t
    u2 = u * u
    v2 = v * v
    return 1.0 - (u2 * u2 * u2 + v2 * v2 * v2) ** (1.0 / 6.0)


def _draw_support(img, state, xs, ys, x_off, y_off, pw, ph) -> None:
    p = state.problem
    lo, hi = p.support_start, p.support_start + p.support_length
    if p.support_boundary in ("left", "right"):
        fracs = ys / state.domain.height
        rows = np.nonzero((fracs >= lo - 1e-9) & (fracs <= hi + 1e-9))[0]
        cols = (0, 1) if p.support_boundary == "left" else (pw - 1, pw - 2)
        for r in rows:
            for c in cols:
                img[y_off + r, x_off + c] = SUPPORT_RGB
    else:
        fracs = xs / state.domain.width
        cols = np.nonzero((fracs >= lo - 1e-9) & (fracs <= hi + 1e-9))[0]
        rows = (ph - 1, ph - 2) if p.support_boundary == "bottom" else (0, 1)
        for c in cols:
            for r in rows:
                img[y_off + r, x_off + c] = SUPPORT_RGB


def _load_pixel(state, x_off, y_off, pw, ph) -> tuple[int, int]:
    p = state.problem
    if p.load_boundary == "left":
        col, row = 0, ph - 1 - int(round(p.load_position * (ph - 1)))
    elif p.load_boundary == "right":
        col, row = pw - 1, ph - 1 - int(round(p.load_position * (ph - 1)))
    elif p.load_boundary == "bottom":
        col, row = int(round(p.load_position * (pw - 1))), ph - 1
    else:
        col, row = int(round(p.load_position * (pw - 1))), 0
    return x_off + col, y_off + row


def _draw_load(img, state, x_off, y_off, pw, ph) -> None:
    # 5-pixel glyph through the load point along the load direction.
    from scipy.special import cosdg, sindg

    cx, cy = _load_pixel(state, x_off, y_off, pw, ph)
    dx = cosdg(state.problem.load_angle_deg)
    dy = -sindg(state.problem.load_angle_deg)  # image rows grow downward
    for k in range(-4, 1):
        px = int(round(cx + k * dx))
        py = int(round(cy + k * dy))
        if 0 <= px < IMAGE_SIZE and 0 <= py < IMAGE_SIZE:
            img[py, px] = LOAD_RGB


def render_strain_image(state: EpisodeState) -> np.ndarray:
    """Log strain energy through the jet colormap; black while disconnected.

    The frame is min-max normalized per render; a constant field maps to the
    colormap midpoint. Shape (3, 64, 64), uint8.
    """
    img = np.zeros((IMAGE_SIZE, IMAGE_SIZE, 3), dtype=np.uint8)
    if state.connected and state.result is not None:
        energy = state.result.strain_energy
        v = np.log(energy + fea.ENERGY_EPS)
        vmin, vmax = float(v.min()), float(v.max())
        if vmax - vmin < 1e-30:
            norm = np.full_like(v, 0.5)
        else:
            norm = (v - vmin) / (vmax - vmin)
        xs, ys, x_off, y_off, pw, ph = _pixel_centers(state.domain)
        ex = np.clip((xs / state.domain.spacing).astype(int), 0, state.mesh.nx - 1)
        ey = np.clip((ys / state.domain.spacing).astype(int), 0, state.mesh.ny - 1)
        img[y_off : y_off + ph, x_off : x_off + pw] = _jet_rgb(norm[ex[None, :], ey[:, None]])
    return np.ascontiguousarray(img.transpose(2, 0, 1))
