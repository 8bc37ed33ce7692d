"""Level-set aggregation and projection to elemental densities.

The union of all placed components is the pointwise maximum of their
implicit fields on the mesh nodes. A regularized step maps nodal field
values to [alpha, 1]; each element's density is the mean of the step at its
four corner nodes, and the element Young's modulus scales linearly with
density.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import kernels

# Fill value for "no components placed": far below the step band, so the
# empty design projects to all-void.
EMPTY_LEVELSET = -1e9


@dataclass(frozen=True)
class ProjectionParams:
    """Regularization half-width, void stiffness floor and solid modulus."""

    epsilon: float = 1e-2
    alpha: float = 1e-9
    youngs_modulus: float = 1.0

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must be in (0, 1)")
        if self.youngs_modulus <= 0:
            raise ValueError("youngs_modulus must be positive")


@dataclass
class DensityField:
    """Elemental densities ``rho[ex, ey]`` on an (nx x ny)-element mesh."""

    rho: np.ndarray
    params: ProjectionParams = field(default_factory=ProjectionParams)

    @property
    def nx(self) -> int:
        return self.rho.shape[0]

    @property
    def ny(self) -> int:
        return self.rho.shape[1]

    @property
    def moduli(self) -> np.ndarray:
        """Elemental Young's moduli: density times the solid modulus."""
        return self.rho * self.params.youngs_modulus

    def to_json(self) -> str:
        """Flat serialization, ex fastest (index ``ey * nx + ex``)."""
        return json.dumps(
            {
                "nx": self.nx,
                "ny": self.ny,
                "rho": [float(v) for v in self.rho.ravel(order="F")],
            }
        )

    @classmethod
    def from_json(cls, text: str, params: ProjectionParams | None = None) -> "DensityField":
        data = json.loads(text)
        nx, ny = int(data["nx"]), int(data["ny"])
        flat = np.asarray(data["rho"], dtype=float)
        if flat.size != nx * ny:
            raise ValueError("density payload does not match its declared dims")
        rho = flat.reshape((nx, ny), order="F")
        return cls(rho=rho, params=params or ProjectionParams())


def heaviside(phi, params: ProjectionParams = ProjectionParams()):
    """Regularized step of a field value (scalar or array).

    Exactly ``alpha`` at ``-epsilon``, exactly 1 at ``+epsilon``, and a
    monotone cubic blend in between.
    """
    return kernels.backend.heaviside(phi, params.epsilon, params.alpha)


def heaviside_derivative(phi, params: ProjectionParams = ProjectionParams()):
    """Derivative of :func:`heaviside`; zero outside the blend band."""
    return kernels.backend.heaviside_derivative(phi, params.epsilon, params.alpha)


def combine_levelsets(phis, shape=None) -> np.ndarray:
    """Pointwise maximum of nodal fields; the union of the components.

    With no fields, returns an all-void surrogate (requires ``shape``).
    """
    phis = list(phis)
    if not phis:
        if shape is None:
            raise ValueError("shape is required to combine zero levelsets")
        return np.full(shape, EMPTY_LEVELSET)
    out = np.asarray(phis[0], dtype=float).copy()
    for phi in phis[1:]:
        phi = np.asarray(phi)
        if phi.shape != out.shape:
            raise ValueError(f"levelset shape mismatch: {phi.shape} vs {out.shape}")
        np.maximum(out, phi, out=out)
    return out


def project_density(phi_nodes: np.ndarray, params: ProjectionParams = ProjectionParams()) -> DensityField:
    """Project a nodal field of shape (nx+1, ny+1) to elemental densities.

    Each element's density is the mean of the regularized step at its four
    corner nodes.
    """
    phi_nodes = np.asarray(phi_nodes, dtype=float)
    if phi_nodes.ndim != 2 or phi_nodes.shape[0] < 2 or phi_nodes.shape[1] < 2:
        raise ValueError("nodal field must be at least 2x2")
    h = heaviside(phi_nodes, params)
    rho = 0.25 * (h[:-1, :-1] + h[1:, :-1] + h[:-1, 1:] + h[1:, 1:])
    return DensityField(rho=rho, params=params)


def volume_fraction(f: DensityField) -> float:
    """Mean elemental density; in [alpha, 1]."""
    return float(np.mean(f.rho))
