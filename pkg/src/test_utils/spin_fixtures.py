import numpy as np
import pytest

from spin_core import CollectiveOps, SpinState, build_ops, css_x

N_TEST = 100


@pytest.fixture
def ops100() -> CollectiveOps:
    return build_ops(N_TEST)


@pytest.fixture
def css100() -> SpinState:
    return css_x(N_TEST)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


def random_state(n_atoms: int, rng: np.random.Generator) -> SpinState:
    amps = rng.normal(size=n_atoms + 1) + 1j * rng.normal(size=n_atoms + 1)
    return SpinState.from_amplitudes(amps)
