"""Shared scenario-document factory for engine, service and CLI tests."""

import copy

import pytest

BASE_SCENARIO = {
    "version": 1,
    "horizon_epochs": 4,
    "seed": 11,
    "chain": {
        "blocks_per_epoch": 64,
        "target_block_interval": 600.0,
        "clamp_factor": 4.0,
        "hash_scale": 1.0,
    },
    "controller": {
        "tau": 0.9,
        "gamma": 0.9,
        "dt_upper": 20.0,
        "dt_lower": 10.0,
    },
    "market": {"model": "closed_form", "competition_margin": 0.0},
    "paths": {
        "exchange_rate": [[0, 30000.0]],
        "unit_hash_cost": [[0, 150.0]],
        "asic_efficiency": [[0, 1e9]],
    },
    "workload": {
        "txs_per_block": 2,
        "fee_mean": 20000.0,
        "amount_fraction": [0.01, 0.1],
        "coinbase_initial": 5_0000_0000,
        "miner_address": "miner",
    },
    "ledger": {
        "balances": {
            "alice": 60_0000_0000,
            "bob": 40_0000_0000,
            "carol": 25_0000_0000,
        }
    },
}


def make_scenario_doc(**overrides) -> dict:
    """Deep-copied base document with dotted-path overrides.

    make_scenario_doc(horizon_epochs=8, **{"chain.blocks_per_epoch": 32})
    """
    doc = copy.deepcopy(BASE_SCENARIO)
    for key, value in overrides.items():
        parts = key.split(".")
        node = doc
        for part in parts[:-1]:
            node = node.setdefault(part, {})
        node[parts[-1]] = value
    return doc


@pytest.fixture
def scenario_doc():
    return make_scenario_doc()
