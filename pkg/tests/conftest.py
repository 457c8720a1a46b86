"""Fixtures around the bundled six-node sample network.

The sample models two road corridors from ``s`` to ``d`` with
overlapping trajectory coverage, small enough that every distribution
in it can be checked by hand.
"""

from __future__ import annotations

import pathlib

import pytest

from spotar.network import Network, load_network
from spotar.weights import CostModel, Mode, WeightStore, build_store, load_trajectories

DATA_DIR = pathlib.Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def sample_net() -> Network:
    return load_network(str(DATA_DIR / "sample_network.csv"))


@pytest.fixture(scope="session")
def sample_records(sample_net):
    return load_trajectories(sample_net, str(DATA_DIR / "sample_trajectories.csv"))


@pytest.fixture(scope="session")
def sample_store(sample_net, sample_records) -> WeightStore:
    return build_store(sample_net, sample_records, min_support=10, mode=Mode.PACE)


@pytest.fixture(scope="session")
def pace_model(sample_store) -> CostModel:
    return CostModel(sample_store, Mode.PACE)


@pytest.fixture(scope="session")
def edge_model(sample_store) -> CostModel:
    return CostModel(sample_store, Mode.EDGE)
