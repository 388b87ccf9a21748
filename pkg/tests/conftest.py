import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from helpers import make_params  # noqa: E402

from twrelay.model import TargetRates  # noqa: E402


@pytest.fixture
def params20():
    """Baseline setup at 20 dB, lambda = 3/4, midpoint relay."""
    return make_params()


@pytest.fixture
def unit_targets():
    return TargetRates.from_rates(1.0, 1.0)
