"""Proof-of-work chain state machine: blocks, epochs, difficulty retargeting.

Block timestamps are integer microticks (1 time unit = 1,000,000 ticks) so
that runs are exactly reproducible; conversion to fractional time units
happens only at the edges. Mining is modelled as a Bernoulli process: with
difficulty D and hash scale kappa, each round of synchronous guessing
succeeds with probability 1/(kappa*D), so the expected block time at
hashrate N is kappa*D/N time units.

The difficulty retarget follows the classic epoch rule: after m blocks the
realized epoch time is clamped to [target/clamp, clamp*target] and the next
difficulty is D * target / clamped_time.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass, field

import numpy as np

TICKS_PER_UNIT = 1_000_000


class ChainError(Exception):
    """Base class for chain bookkeeping errors."""


class RejectedBlockError(ChainError):
    """Block violates a local validity rule (non-monotone timestamp)."""


class SequencingError(ChainError):
    """Block height does not extend the chain tip by exactly one."""


@dataclass(frozen=True)
class ChainParams:
    """Protocol constants for one simulated chain.

    blocks_per_epoch: number of blocks between difficulty retargets (m).
    target_block_interval: desired expected block time, in time units.
    clamp_factor: per-epoch retarget is limited to this factor both ways.
    hash_scale: expected guesses per unit of difficulty (kappa); 1 keeps the
        stylized model, 2**32 matches the Bitcoin difficulty convention.
    """

    blocks_per_epoch: int = 2016
    target_block_interval: float = 600.0
    clamp_factor: float = 4.0
    hash_scale: float = 1.0

    def __post_init__(self) -> None:
        if self.blocks_per_epoch < 1:
            raise ValueError("blocks_per_epoch must be >= 1")
        if self.target_block_interval <= 0:
            raise ValueError("target_block_interval must be > 0")
        if self.clamp_factor <= 1:
            raise ValueError("clamp_factor must be > 1")
        if self.hash_scale <= 0:
            raise ValueError("hash_scale must be > 0")

    @property
    def epoch_target_time(self) -> float:
        return self.blocks_per_epoch * self.target_block_interval


@dataclass(frozen=True)
class BlockRecord:
    """One appended block.

    timestamp is cumulative microticks since chain start; reward amounts are
    integer Satoshi. fees are ordered as the transactions appear in the
    block. miner_reward_paid is the amount actually paid out after any
    ceiling/floor was applied (equals coinbase + sum(fees) when none was).
    """

    height: int
    timestamp: int
    difficulty: float
    coinbase: int
    fees: tuple[int, ...] = ()
    miner_reward_paid: int = 0

    @property
    def total_reward(self) -> int:
        return self.coinbase + sum(self.fees)


@dataclass(frozen=True)
class EpochStats:
    """Closed-epoch summary used by the retarget rule and the controller."""

    index: int
    difficulty_in_effect: float
    elapsed_ticks: int
    median_total_reward: int

    @property
    def elapsed_time(self) -> float:
        """Epoch elapsed time in time units."""
        return self.elapsed_ticks / TICKS_PER_UNIT

    @property
    def d_over_t(self) -> float:
        """The sufficient statistic for hashrate: difficulty per time unit."""
        return self.difficulty_in_effect / self.elapsed_time


@dataclass
class ChainState:
    """Plain-data chain state; single writer, snapshots are safe to share."""

    params: ChainParams
    blocks: list[BlockRecord] = field(default_factory=list)
    epochs: list[EpochStats] = field(default_factory=list)
    epoch_anchor_ticks: int = 0  # timestamp closing the previous epoch

    @property
    def height(self) -> int:
        return self.blocks[-1].height if self.blocks else 0

    @property
    def tip_timestamp(self) -> int:
        return self.blocks[-1].timestamp if self.blocks else 0


def append_block(chain: ChainState, block: BlockRecord) -> ChainState:
    """Append one block, closing the epoch when height is a multiple of m.

    Returns the same ChainState for chaining. Raises SequencingError on a
    height gap and RejectedBlockError on a non-increasing timestamp.
    """
    expected_height = chain.height + 1
    if block.height != expected_height:
        raise SequencingError(
            f"block height {block.height} does not follow tip {chain.height}"
        )
    if block.timestamp <= chain.tip_timestamp:
        raise RejectedBlockError(
            f"timestamp {block.timestamp} not after tip {chain.tip_timestamp}"
        )
    if block.difficulty <= 0:
        raise RejectedBlockError("difficulty must be positive")
    if block.coinbase < 0 or any(f < 0 for f in block.fees) or block.miner_reward_paid < 0:
        raise RejectedBlockError("reward amounts must be non-negative")

    chain.blocks.append(block)

    m = chain.params.blocks_per_epoch
    if block.height % m == 0:
        epoch_blocks = chain.blocks[-m:]
        elapsed = block.timestamp - chain.epoch_anchor_ticks
        stats = EpochStats(
            index=block.height // m,
            difficulty_in_effect=epoch_blocks[0].difficulty,
            elapsed_ticks=elapsed,
            median_total_reward=statistics.median_low(
                [b.total_reward for b in epoch_blocks]
            ),
        )
        chain.epochs.append(stats)
        chain.epoch_anchor_ticks = block.timestamp
    return chain


def adjust_difficulty(stats: EpochStats, params: ChainParams) -> float:
    """Next-epoch difficulty from realized epoch time, clamp applied first."""
    if stats.elapsed_ticks <= 0:
        raise ValueError("epoch elapsed time must be positive")
    target = params.epoch_target_time
    clamp = params.clamp_factor
    t_hat = max(target / clamp, min(stats.elapsed_time, clamp * target))
    return stats.difficulty_in_effect * (target / t_hat)


def estimate_hashrate(stats: EpochStats, params: ChainParams) -> float:
    """Invert the expected-block-time relation: N_hat = kappa * m * D / T."""
    if stats.elapsed_ticks <= 0:
        raise ValueError("epoch elapsed time must be positive")
    return (
        params.hash_scale
        * params.blocks_per_epoch
        * stats.difficulty_in_effect
        / stats.elapsed_time
    )


def hashrate_to_dt(hashrate: float, params: ChainParams) -> float:
    """Map a hashrate bound to its epoch-level D/T signal value.

    Inverse of estimate_hashrate: a chain running at hashrate N produces
    epochs whose D/T statistic centers on N / (kappa * m), independent of
    the difficulty in effect. Used to wire a target hashrate interval into
    controller D/T bounds.
    """
    return hashrate / (params.hash_scale * params.blocks_per_epoch)


def sample_block_time(
    difficulty: float,
    hashrate: float,
    rng: np.random.Generator,
    hash_scale: float = 1.0,
) -> float:
    """One block time draw in time units: Geometric rounds / hashrate.

    The round count k is geometric with success probability
    1/(hash_scale*difficulty), so the mean block time is
    hash_scale*difficulty/hashrate. difficulty=1 with hash_scale=1 succeeds
    on the first round and returns exactly 1/hashrate.
    """
    if difficulty < 1:
        raise ValueError("difficulty must be >= 1")
    if hashrate <= 0:
        raise ValueError("hashrate must be > 0")
    rounds = rng.geometric(1.0 / (hash_scale * difficulty))
    return float(rounds) / hashrate


def sample_epoch_ticks(
    difficulty: float,
    hashrate: float,
    blocks: int,
    rng: np.random.Generator,
    hash_scale: float = 1.0,
) -> np.ndarray:
    """Vectorized per-block durations in integer microticks (min 1 tick)."""
    if difficulty < 1 or hashrate <= 0 or blocks < 1:
        raise ValueError("need difficulty >= 1, hashrate > 0, blocks >= 1")
    rounds = rng.geometric(1.0 / (hash_scale * difficulty), size=blocks)
    ticks = np.rint(rounds * (TICKS_PER_UNIT / hashrate)).astype(np.int64)
    return np.maximum(ticks, 1)


def chain_to_json_dict(chain: ChainState) -> dict:
    """Versioned snapshot with integer Satoshi amounts and microtick times."""
    return {
        "version": 1,
        "params": {
            "blocks_per_epoch": chain.params.blocks_per_epoch,
            "target_block_interval": chain.params.target_block_interval,
            "clamp_factor": chain.params.clamp_factor,
            "hash_scale": chain.params.hash_scale,
        },
        "epoch_anchor_ticks": chain.epoch_anchor_ticks,
        "blocks": [
            {
                "height": b.height,
                "timestamp": b.timestamp,
                "difficulty": b.difficulty,
                "coinbase": b.coinbase,
                "fees": list(b.fees),
                "miner_reward_paid": b.miner_reward_paid,
            }
            for b in chain.blocks
        ],
        "epochs": [
            {
                "index": e.index,
                "difficulty_in_effect": e.difficulty_in_effect,
                "elapsed_ticks": e.elapsed_ticks,
                "median_total_reward": e.median_total_reward,
                "d_over_t": e.d_over_t,
            }
            for e in chain.epochs
        ],
    }


def chain_from_json_dict(doc: dict) -> ChainState:
    if doc.get("version") != 1:
        raise ValueError(f"unsupported chain snapshot version: {doc.get('version')}")
    params = ChainParams(
        blocks_per_epoch=doc["params"]["blocks_per_epoch"],
        target_block_interval=doc["params"]["target_block_interval"],
        clamp_factor=doc["params"]["clamp_factor"],
        hash_scale=doc["params"]["hash_scale"],
    )
    chain = ChainState(params=params, epoch_anchor_ticks=doc["epoch_anchor_ticks"])
    chain.blocks = [
        BlockRecord(
            height=b["height"],
            timestamp=b["timestamp"],
            difficulty=b["difficulty"],
            coinbase=b["coinbase"],
            fees=tuple(b["fees"]),
            miner_reward_paid=b["miner_reward_paid"],
        )
        for b in doc["blocks"]
    ]
    chain.epochs = [
        EpochStats(
            index=e["index"],
            difficulty_in_effect=e["difficulty_in_effect"],
            elapsed_ticks=e["elapsed_ticks"],
            median_total_reward=e["median_total_reward"],
        )
        for e in doc["epochs"]
    ]
    return chain
