import pytest

from mordell.arith import build_spf


@pytest.fixture(scope="session")
def spf():
    return build_spf(300_000)
