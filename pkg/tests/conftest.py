import os
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings

from haarint.algebra import DimPoly, RationalFunction
from haarint.weingarten import clear_caches

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

D = RationalFunction.var()


def rf(num, den=(1,)):
    """RationalFunction from coefficient lists (lowest degree first)."""
    return RationalFunction(DimPoly([Fraction(c) for c in num]), DimPoly([Fraction(c) for c in den]))


@pytest.fixture
def cold():
    clear_caches()
    yield
