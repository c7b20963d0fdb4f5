import pytest

from bincues import gen_pink_noise


@pytest.fixture(scope="session")
def pink_5s():
    return gen_pink_noise(5.0, seed=11)


@pytest.fixture(scope="session")
def pink_2s():
    return gen_pink_noise(2.0, seed=3)
