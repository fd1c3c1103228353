import pytest

from scwfprep.trainer import train

from helpers import CASE1_DICT, make_config

CASE_SEEDS = (1, 2, 3)


@pytest.fixture(scope="session")
def case1_reports():
    """Full Case-1 training runs for the shared seed set (expensive)."""
    return {seed: train(make_config(CASE1_DICT, seed=seed)) for seed in CASE_SEEDS}
