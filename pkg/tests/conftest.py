import random

import pytest

from lmverify import ChartSpec


@pytest.fixture
def rng():
    return random.Random(20240607)


@pytest.fixture(params=[(5, 1), (6, 1)], ids=lambda nk: f"n{nk[0]}k{nk[1]}")
def small_chart(request):
    return ChartSpec(*request.param)
