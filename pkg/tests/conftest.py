import warnings

import pytest

from qfriction.response import ValidityWarning
from qfriction.units import DEFAULT_METAL, default_atom


@pytest.fixture
def metal():
    return DEFAULT_METAL


@pytest.fixture
def lam(metal):
    return metal.lambda_tf


@pytest.fixture
def ell(metal):
    return metal.ell


@pytest.fixture
def atom():
    return default_atom()


@pytest.fixture
def quiet():
    """Silence the k_F / nonlocal-window diagnostics for tests that probe them on purpose."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ValidityWarning)
        yield
