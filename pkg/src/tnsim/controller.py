"""Block-reward ceiling/floor controller keyed off the D/T hashrate signal.

After each epoch the controller compares the epoch's D/T statistic with the
target interval [dt_lower, dt_upper]:

  * above the interval: impose (or tighten) a ceiling on the miner's block
    reward, anchored at tau * median epoch reward and multiplied by tau
    each further epoch spent above;
  * below the interval: impose (or raise) a floor, anchored at
    (1 + (1 - tau)) * median and multiplied by (2 - tau) each further epoch
    spent below;
  * inside the interval: relax an active bound toward the median --
    ceilings grow by (2 - gamma), floors shrink by gamma -- and drop it
    once it stops binding (ceiling >= median, floor <= median).

tau and (2 - tau) give the ceiling and floor the same percentage step, so
the two sides adjust symmetrically. At most one bound is ever active.

Fee scaling preserves transaction ordering: the coinbase and every fee are
multiplied by the same ratio miner_reward/total_reward and floored to
integer Satoshi, with the rounding shortfall assigned to the coinbase so
the scaled parts sum to the miner reward exactly.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace

from .chain import EpochStats


class Mode(enum.Enum):
    UNCONSTRAINED = "unconstrained"
    CEILING = "ceiling"
    FLOOR = "floor"


class ControllerError(Exception):
    pass


class UndefinedScalingError(ControllerError):
    """Cannot scale components of a zero total reward to a nonzero target."""


@dataclass(frozen=True)
class ControllerParams:
    """Controller tuning.

    tau tightens an out-of-interval bound each epoch; gamma relaxes an
    in-interval bound. dt_lower/dt_upper are the D/T values of the target
    hashrate interval endpoints. When nash_guard_enabled, per-epoch reward
    multipliers are clamped to the deviation-proof range derived from the
    hashrate bounds (n_upper for reductions, n_lower for raises), so no
    single-unit deviation is ever made profitable by one adjustment step.
    """

    tau: float
    gamma: float
    dt_upper: float
    dt_lower: float
    nash_guard_enabled: bool = False
    n_upper: float | None = None
    n_lower: float | None = None

    def __post_init__(self) -> None:
        if not 0 < self.tau < 1:
            raise ValueError("tau must lie in (0, 1)")
        if not 0 < self.gamma < 1:
            raise ValueError("gamma must lie in (0, 1)")
        if self.dt_lower <= 0 or self.dt_upper <= 0:
            raise ValueError("D/T bounds must be positive")
        if self.dt_lower >= self.dt_upper:
            raise ValueError("dt_lower must be < dt_upper")
        if self.nash_guard_enabled and (self.n_upper is None or self.n_lower is None):
            raise ValueError("nash guard requires n_upper and n_lower")


@dataclass(frozen=True)
class ControllerState:
    """Current bound; value is integer Satoshi, None when unconstrained."""

    mode: Mode = Mode.UNCONSTRAINED
    value: int | None = None
    epoch_of_last_change: int = 0

    def __post_init__(self) -> None:
        if self.mode is Mode.UNCONSTRAINED:
            if self.value is not None:
                raise ValueError("unconstrained state carries no bound value")
        elif self.value is None or self.value <= 0:
            raise ValueError("active bound value must be positive")


@dataclass(frozen=True)
class RewardAdjustment:
    """Proportionally scaled reward components for one block."""

    xi: float
    miner_reward: int
    total_reward: int
    scaled_fees: tuple[int, ...]
    scaled_coinbase: int


def nash_adjustment_bound(
    target_hashrate: float, deviation: float = 1.0
) -> tuple[float, float]:
    """Deviation-proof range of one-epoch reward multipliers.

    ((1 + dev/N_T) / (1 + dev), 1): reductions inside this range keep a
    deviation of `deviation` hashrate units unprofitable. The conservative
    per-unit bound is the value at deviation 1, (1 + 1/N_T) / 2.
    """
    if target_hashrate < 1:
        raise ValueError("target_hashrate must be >= 1")
    if deviation < 0:
        raise ValueError("deviation must be >= 0")
    lower = (1.0 + deviation / target_hashrate) / (1.0 + deviation)
    return (lower, 1.0)


def _scale(value: int, factor: float) -> int:
    scaled = int(round(value * factor))
    return max(scaled, 1)


def _guarded_down(tau: float, params: ControllerParams) -> float:
    """Reduction multiplier, clamped to the deviation-proof range."""
    if not params.nash_guard_enabled:
        return tau
    floor_mult, _ = nash_adjustment_bound(params.n_upper, 1.0)
    return max(tau, floor_mult)


def _guarded_up(tau: float, params: ControllerParams) -> float:
    """Raise multiplier (2 - tau), mirrored clamp of the reduction guard."""
    up = 2.0 - tau
    if not params.nash_guard_enabled:
        return up
    floor_mult, _ = nash_adjustment_bound(params.n_lower, 1.0)
    return min(up, 2.0 - floor_mult)


def controller_step(
    state: ControllerState, params: ControllerParams, epoch: EpochStats
) -> ControllerState:
    """Advance the controller by one closed epoch."""
    if epoch.d_over_t <= 0:
        raise ValueError("epoch D/T statistic must be positive")
    if epoch.median_total_reward <= 0:
        raise ValueError("epoch median reward must be positive")

    signal = epoch.d_over_t
    median = epoch.median_total_reward

    if signal > params.dt_upper:
        # Hashrate above target: cap the reward, tightening while it stays.
        mult = _guarded_down(params.tau, params)
        anchor = state.value if state.mode is Mode.CEILING else median
        new = ControllerState(Mode.CEILING, _scale(anchor, mult), epoch.index)
    elif signal < params.dt_lower:
        # Hashrate below target: prop the reward up, raising while it stays.
        mult = _guarded_up(params.tau, params)
        anchor = state.value if state.mode is Mode.FLOOR else median
        new = ControllerState(Mode.FLOOR, _scale(anchor, mult), epoch.index)
    elif state.mode is Mode.CEILING:
        relaxed = _scale(state.value, 2.0 - params.gamma)
        if relaxed >= median:
            new = ControllerState(Mode.UNCONSTRAINED, None, epoch.index)
        else:
            new = ControllerState(Mode.CEILING, relaxed, epoch.index)
    elif state.mode is Mode.FLOOR:
        relaxed = _scale(state.value, params.gamma)
        if relaxed <= median:
            new = ControllerState(Mode.UNCONSTRAINED, None, epoch.index)
        else:
            new = ControllerState(Mode.FLOOR, relaxed, epoch.index)
    else:
        new = state

    if new.mode is state.mode and new.value == state.value:
        return replace(new, epoch_of_last_change=state.epoch_of_last_change)
    return new


def apply_cap(state: ControllerState, total_reward: int) -> int:
    """Miner's reward for a block under the current bound."""
    if total_reward < 0:
        raise ValueError("total_reward must be >= 0")
    if state.mode is Mode.CEILING:
        return min(total_reward, state.value)
    if state.mode is Mode.FLOOR:
        return max(total_reward, state.value)
    return total_reward


def scale_fees(coinbase: int, fees: list[int], miner_reward: int) -> RewardAdjustment:
    """Scale every reward component by miner_reward/total_reward.

    Components are floored to integer Satoshi in exact integer arithmetic
    (order-preserving) and the rounding shortfall is added to the scaled
    coinbase, so scaled_coinbase + sum(scaled_fees) == miner_reward.
    """
    if coinbase < 0 or any(f < 0 for f in fees) or miner_reward < 0:
        raise ValueError("reward amounts must be non-negative")
    total = coinbase + sum(fees)
    if total <= 0:
        raise UndefinedScalingError("total reward is zero; components cannot be scaled")
    scaled_fees = tuple((f * miner_reward) // total for f in fees)
    scaled_coinbase = (coinbase * miner_reward) // total
    shortfall = miner_reward - scaled_coinbase - sum(scaled_fees)
    return RewardAdjustment(
        xi=miner_reward / total - 1.0,
        miner_reward=miner_reward,
        total_reward=total,
        scaled_fees=scaled_fees,
        scaled_coinbase=scaled_coinbase + shortfall,
    )
