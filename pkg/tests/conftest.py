import random

import pytest

from betaprefix import BetaContext


@pytest.fixture
def rng():
    return random.Random(0xBE7A)


def make_ctx(beta, **kw):
    return BetaContext(beta, **kw)


@pytest.fixture
def ctx15():
    return BetaContext("1.5")
