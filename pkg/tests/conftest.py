import numpy as np
import pytest

from sogym.geometry import DomainSpec, MmcComponent
from sogym.problems import BoundaryProblem


@pytest.fixture
def unit_domain():
    return DomainSpec(1.0, 1.0)


@pytest.fixture
def cantilever():
    """Left edge fully supported, downward unit load at the right-edge middle."""
    return BoundaryProblem(
        support_boundary="left",
        support_length=1.0,
        support_start=0.0,
        load_boundary="right",
        load_position=0.5,
        load_angle_deg=270.0,
        volume_target=0.3,
        height=1.0,
        width=1.0,
    )


def small_cantilever(nx: int, ny: int) -> BoundaryProblem:
    """Cantilever on an (nx x ny)-element mesh at the standard resolution."""
    return BoundaryProblem(
        support_boundary="left",
        support_length=1.0,
        support_start=0.0,
        load_boundary="right",
        load_position=0.5,
        load_angle_deg=270.0,
        volume_target=0.3,
        height=ny / 50,
        width=nx / 50,
    )


def random_component(rng: np.random.Generator, domain: DomainSpec) -> MmcComponent:
    tmax = 0.05 * min(domain.width, domain.height)
    return MmcComponent(
        xa=rng.uniform(0, domain.width),
        ya=rng.uniform(0, domain.height),
        xb=rng.uniform(0, domain.width),
        yb=rng.uniform(0, domain.height),
        ta=rng.uniform(0.01, tmax),
        tb=rng.uniform(0.01, tmax),
    )
