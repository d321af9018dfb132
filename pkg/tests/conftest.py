import os
import sys

sys.path.insert(0, os.path.dirname(__file__))

import pytest  # noqa: E402
from hypothesis import settings  # noqa: E402

from pext import Multivector, Poly  # noqa: E402

settings.register_profile("pext", max_examples=60, deadline=None)
settings.load_profile("pext")


@pytest.fixture
def quadric():
    return Poly.parse("x1^2 + x2^2 + x3^2", 3)


@pytest.fixture
def quadric4():
    return Poly.parse("x1^2 + x2^2 + x3^2 + x4^2", 4)


@pytest.fixture
def quadric_beta():
    return Multivector.parse("2*x3 d1^d2 - 2*x2 d1^d3 + 2*x1 d2^d3", 3)
