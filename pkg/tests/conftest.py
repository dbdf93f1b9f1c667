"""Shared fixtures: the three reference growth families, meshes, and the
smooth profile corpus used by the refinement tests."""

import numpy as np
import pytest

from fglap.fractional import OperatorConfig
from fglap.orlicz import GridFunction, Mesh
from fglap.young import DoublePowerYoung, LogTypeYoung, PowerYoung


@pytest.fixture(scope="session")
def power4():
    return PowerYoung(4.0)


@pytest.fixture(scope="session")
def power3():
    return PowerYoung(3.0)


@pytest.fixture(scope="session")
def dp34():
    return DoublePowerYoung(3.0, 4.0)


@pytest.fixture(scope="session")
def log221():
    return LogTypeYoung(2.0, 2.0, 1.0)


@pytest.fixture(scope="session")
def families(power4, dp34, log221):
    return [power4, dp34, log221]


@pytest.fixture(scope="session")
def mesh33():
    return Mesh(33)


@pytest.fixture(scope="session")
def mesh65():
    return Mesh(65)


def profile_values(tag: str, nodes: np.ndarray) -> np.ndarray:
    inner = 1.0 - nodes * nodes
    if tag == "bump":
        return inner
    if tag == "tilt":
        return inner * (1.0 + 0.5 * nodes)
    if tag == "sine":
        return np.sin(np.pi * nodes) ** 2 * np.sqrt(inner)
    raise ValueError(tag)


PROFILE_TAGS = ("bump", "tilt", "sine")


@pytest.fixture(scope="session")
def smoke_corpus(mesh65):
    """Three smooth boundary-vanishing profiles on the reference mesh."""
    return {tag: GridFunction(mesh65, profile_values(tag, mesh65.nodes))
            for tag in PROFILE_TAGS}


def cfg_for(yf, s: float, **kw) -> OperatorConfig:
    return OperatorConfig(young=yf, s=s, **kw)
