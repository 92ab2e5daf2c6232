import random

import pytest

from mixmax.field import M61, Modulus

P61 = M61.p


@pytest.fixture
def rng():
    return random.Random(20161019)


@pytest.fixture(params=[5, 2**31 - 1, P61], ids=["p5", "p31", "p61"])
def modulus(request):
    return Modulus(request.param)
