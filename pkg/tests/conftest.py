import numpy as np
import pytest

from capgen.core import Alternative
from capgen.extensions import ecg_sample, enumerate_linear_extensions, position_frequencies
from capgen.markov import estimate_rank_table, exact_rank_table
from capgen.preferences import PreferenceSystem, derive_SC

# Six worked-example alternatives over three criteria, reused across tests.
EXAMPLE_ALTERNATIVES = (
    (0.6, 0.8, 0.7),
    (0.7, 0.1, 0.8),
    (0.4, 0.3, 0.8),
    (0.4, 0.9, 0.7),
    (0.9, 0.1, 0.5),
    (0.9, 0.4, 0.3),
)


def mask_of(*elements: int) -> int:
    m = 0
    for e in elements:
        m |= 1 << (e - 1)
    return m


@pytest.fixture(scope="session")
def ext3():
    return enumerate_linear_extensions(3)


@pytest.fixture(scope="session")
def ext4():
    return enumerate_linear_extensions(4)


@pytest.fixture(scope="session")
def freq4(ext4):
    return position_frequencies(ext4, 4)


@pytest.fixture(scope="session")
def exact_table3(ext3):
    return exact_rank_table(3, ext3)


@pytest.fixture(scope="session")
def exact_table4(ext4):
    return exact_rank_table(4, ext4)


@pytest.fixture(scope="session")
def markov_table4():
    # reduced off-line build: 10^5 retained chain states
    return estimate_rank_table(4, samples=100_000, seed=101)


@pytest.fixture(scope="session")
def prefs_sr1():
    # a5 > a2 > a3 and a6 > a4, epsilon = 0.001
    return PreferenceSystem(
        n=3,
        alternatives=tuple(Alternative(a) for a in EXAMPLE_ALTERNATIVES),
        strict=((4, 1), (1, 2), (5, 3)),
        epsilon=0.001,
    )


@pytest.fixture(scope="session")
def sc_c1(prefs_sr1):
    return derive_SC(prefs_sr1)


@pytest.fixture(scope="session")
def ecg3_100k(ext3):
    rng = np.random.default_rng(2024)
    return ecg_sample(ext3, 3, 100_000, rng)


@pytest.fixture(scope="session")
def ecg4_ref(ext4):
    rng = np.random.default_rng(4040)
    return ecg_sample(ext4, 4, 10_000, rng)


@pytest.fixture(scope="session")
def ecg4_100k(ext4):
    rng = np.random.default_rng(4100)
    return ecg_sample(ext4, 4, 100_000, rng)
