import os
import sys

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

from tpspectra.config import preset_catalog  # noqa: E402
from tpspectra.series import SymbolParams  # noqa: E402

settings.register_profile("repo", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")


@pytest.fixture(scope="session")
def presets():
    return {name: cfg.params for name, cfg in preset_catalog().items()}


@pytest.fixture
def widom1():
    return SymbolParams.widom([0.4], [0.4])


@pytest.fixture
def geometric():
    return SymbolParams(alpha_plus=(0.5,), alpha_minus=(0.5,))


@pytest.fixture
def mixed():
    return SymbolParams((0.3,), (0.2,), (0.25,), (0.15,))
