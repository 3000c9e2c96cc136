import pytest

from slpos.signal import default_config, make_pilots


@pytest.fixture(scope="session")
def ofdm():
    return default_config()


@pytest.fixture(scope="session")
def pilots(ofdm):
    return make_pilots(ofdm, "all_ones")
