"""Structural design episodes over a morphable-component parameterization.

Place bars, project them to densities on a structured mesh, score by
finite-element compliance under a volume budget. Ships with a conventional
moving-asymptote optimizer baseline, an evaluation harness, a CLI and a
session service for the interactive game client.
"""

from .env import (
    DesignEnv,
    EnvConfig,
    EpisodeDoneError,
    Observation,
    ObsMode,
    RewardConfig,
    RewardMode,
)
from .geometry import (
    ComponentFrame,
    DomainSpec,
    MmcComponent,
    component_frame,
    scale_action,
    tdf,
    tdf_grid,
    unscale_component,
)
from .kernels import BACKEND_NAME
from .mma import OptimizerConfig
from .optimizer import OptRun, init_layout, objective_and_gradients, optimize
from .problems import BoundaryProblem, decode_beta, encode_beta, eval_set, sample
from .projection import (
    DensityField,
    ProjectionParams,
    combine_levelsets,
    heaviside,
    heaviside_derivative,
    project_density,
    volume_fraction,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND_NAME",
    "BoundaryProblem",
    "ComponentFrame",
    "DensityField",
    "DesignEnv",
    "DomainSpec",
    "EnvConfig",
    "EpisodeDoneError",
    "MmcComponent",
    "Observation",
    "ObsMode",
    "OptRun",
    "OptimizerConfig",
    "ProjectionParams",
    "RewardConfig",
    "RewardMode",
    "combine_levelsets",
    "component_frame",
    "decode_beta",
    "encode_beta",
    "eval_set",
    "heaviside",
    "heaviside_derivative",
    "init_layout",
    "objective_and_gradients",
    "optimize",
    "project_density",
    "sample",
    "scale_action",
    "tdf",
    "tdf_grid",
    "unscale_component",
    "volume_fraction",
]
