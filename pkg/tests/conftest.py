import numpy as np
import pytest

import fixture_nets


@pytest.fixture
def ramp():
    return fixture_nets.ramp()


@pytest.fixture
def tent1d():
    return fixture_nets.tent1d()


@pytest.fixture
def tent2d():
    return fixture_nets.tent2d()


@pytest.fixture
def neg():
    return fixture_nets.neg()


@pytest.fixture
def house1d():
    return fixture_nets.house1d()


@pytest.fixture
def bump2d():
    return fixture_nets.bump2d()


@pytest.fixture
def rng():
    return np.random.default_rng(0)
