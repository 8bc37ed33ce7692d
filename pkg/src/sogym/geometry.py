"""Morphable bar components: action scaling and the level-set field.

A component is a straight bar defined by its two endpoints and two endpoint
thicknesses. The implicit field ``phi`` is a sixth-order hyperellipse in the
bar's local frame: positive inside the bar, zero on its boundary, negative
outside. Thickness varies linearly along the bar axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels

ACTION_SIZE = 6

# Thickness bounds: absolute floor, and ceiling as a fraction of min(h, w).
THICKNESS_MIN = 0.01
THICKNESS_MAX_FRACTION = 0.05

# Coincident endpoints collapse to a dot of this half-length instead of erroring.
DEGENERATE_LENGTH = 1e-6

# Floor for the linearly interpolated thickness, which extrapolates through
# zero outside the bar when the two endpoint thicknesses differ.
THICKNESS_FLOOR = 1e-9


@dataclass(frozen=True)
class DomainSpec:
    """Rectangular design domain and its structured-mesh resolution."""

    width: float
    height: float
    elements_per_unit: int = 50

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValueError("domain dimensions must be positive")
        if self.elements_per_unit < 1:
            raise ValueError("elements_per_unit must be >= 1")

    @property
    def nx(self) -> int:
        return int(round(self.width * self.elements_per_unit))

    @property
    def ny(self) -> int:
        return int(round(self.height * self.elements_per_unit))

    @property
    def spacing(self) -> float:
        # Square elements; the mesh spans [0, nx*spacing] x [0, ny*spacing].
        return 1.0 / self.elements_per_unit


@dataclass(frozen=True)
class MmcComponent:
    """One placed bar: endpoint coordinates and endpoint thicknesses."""

    xa: float
    ya: float
    xb: float
    yb: float
    ta: float
    tb: float

    def as_array(self) -> np.ndarray:
        return np.array([self.xa, self.ya, self.xb, self.yb, self.ta, self.tb])


@dataclass(frozen=True)
class ComponentFrame:
    """Derived local frame: centroid, endpoint distance and orientation."""

    x0: float
    y0: float
    length: float
    theta: float


def action_bounds(domain: DomainSpec) -> tuple[np.ndarray, np.ndarray]:
    """Per-variable (lower, upper) bounds in the order (xa, ya, xb, yb, ta, tb)."""
    w, h = domain.width, domain.height
    tmax = THICKNESS_MAX_FRACTION * min(h, w)
    lo = np.array([0.0, 0.0, 0.0, 0.0, THICKNESS_MIN, THICKNESS_MIN])
    hi = np.array([w, h, w, h, tmax, tmax])
    return lo, hi


def scale_action(action, domain: DomainSpec) -> MmcComponent:
    """Map a normalized action in [-1, 1]^6 onto component variables.

    Out-of-range entries are clamped before the linear map, so any real
    vector of length 6 yields a valid component.
    """
    a = np.clip(np.asarray(action, dtype=float).reshape(-1), -1.0, 1.0)
    if a.size != ACTION_SIZE:
        raise ValueError(f"expected {ACTION_SIZE} action entries, got {a.size}")
    lo, hi = action_bounds(domain)
    v = lo + 0.5 * (a + 1.0) * (hi - lo)
    return MmcComponent(*v)


def unscale_component(component: MmcComponent, domain: DomainSpec) -> np.ndarray:
    """Inverse of :func:`scale_action`; used to replay designs as actions."""
    lo, hi = action_bounds(domain)
    v = component.as_array()
    return np.clip(2.0 * (v - lo) / (hi - lo) - 1.0, -1.0, 1.0)


def component_frame(c: MmcComponent) -> ComponentFrame:
    """Centroid, endpoint distance and orientation of a component.

    Coincident endpoints are a legal degenerate case: the length is clamped
    to a tiny positive value and the orientation defined as zero, so random
    placements never fail.
    """
    x0 = 0.5 * (c.xa + c.xb)
    y0 = 0.5 * (c.ya + c.yb)
    dx = c.xb - c.xa
    dy = c.yb - c.ya
    length = math.hypot(dx, dy)
    if length < DEGENERATE_LENGTH:
        return ComponentFrame(x0, y0, DEGENERATE_LENGTH, 0.0)
    return ComponentFrame(x0, y0, length, math.atan2(dy, dx))


def tdf(c: MmcComponent, x: float, y: float) -> float:
    """Evaluate the component's implicit field at one point.

    Positive inside the bar, 0 on the boundary, 1 at the centroid. The point
    may lie anywhere, including outside the design domain.
    """
    f = component_frame(c)
    ct, st = math.cos(f.theta), math.sin(f.theta)
    x1 = ct * (x - f.x0) + st * (y - f.y0)
    y1 = -st * (x - f.x0) + ct * (y - f.y0)
    t = 0.5 * (c.ta + c.tb) + 0.5 * (c.tb - c.ta) * x1 / f.length
    t = max(t, THICKNESS_FLOOR)
    u = x1 / f.length
    v = y1 / t
    u2 = u * u
    v2 = v * v
    return 1.0 - (u2 * u2 * u2 + v2 * v2 * v2) ** (1.0 / 6.0)


def tdf_grid(c: MmcComponent, domain: DomainSpec) -> np.ndarray:
    """Implicit field sampled at every mesh node.

    Returns an array of shape ``(nx + 1, ny + 1)`` indexed ``[ix, iy]`` with
    the origin node at the domain's lower-left corner.
    """
    f = component_frame(c)
    return kernels.backend.tdf_grid(
        f.x0,
        f.y0,
        f.length,
        math.cos(f.theta),
        math.sin(f.theta),
        c.ta,
        c.tb,
        domain.nx,
        domain.ny,
        domain.spacing,
    )


def tdf_at_points(c: MmcComponent, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Implicit field at a flat list of query points."""
    f = component_frame(c)
    return kernels.backend.tdf_points(
        f.x0,
        f.y0,
        f.length,
        math.cos(f.theta),
        math.sin(f.theta),
        c.ta,
        c.tb,
        xs,
        ys,
    )
