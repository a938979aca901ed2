import os
import tempfile

# supercrit.config reads these at import time
_home = tempfile.mkdtemp(prefix="supercrit-test-")
os.environ.setdefault("SUPERCRIT_HOME", _home)
os.environ.setdefault("SUPERCRIT_OUTPUT", os.path.join(_home, "runs"))
os.environ.setdefault("LOG_LEVEL", "WARNING")

import pytest
from hypothesis import HealthCheck, settings

from supercrit.multipliers import Multiplier
from supercrit.spectral import Grid

settings.register_profile("default", max_examples=25, deadline=None)
settings.register_profile(
    "ci", max_examples=100, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture
def grid64():
    return Grid(64)


@pytest.fixture
def grid128():
    return Grid(128)


@pytest.fixture
def classical():
    return Multiplier.create("constant", constant=1.0)


@pytest.fixture
def loglog():
    return Multiplier.create("iterated_log", exponents=(1.0,))
