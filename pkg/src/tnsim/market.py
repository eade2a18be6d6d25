"""Mining-market equilibrium and the hashrate response to reward changes.

All money amounts here are USD and BTC floats; the integer-Satoshi world of
the ledger is converted at module boundaries (1 BTC = 1e8 Satoshi). A unit
of hashrate is one mining computer guessing for one target block interval.

Two hashrate models are supported:
  * closed form: N = e * P * (1 + dT) / (c + phi), the zero-excess-profit
    entry condition given reward value e*P and unit cost c with competition
    margin phi;
  * log regression: log N = a1 + a2*log(1+e*P) + a3*log(1+efficiency)
    + a4*log(1+c), with coefficients fitted from historical data (see
    calibration.fit_regression).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

SATOSHI_PER_BTC = 10**8


class MarketError(Exception):
    """Base class for market-model errors."""


class DegenerateMarketError(MarketError):
    """Zero total unit cost: equilibrium hashrate is unbounded."""


class WrongModelError(MarketError):
    """Operation requires the other hashrate-model variant."""


class SingularResponseError(MarketError):
    """Hashrate response undefined: zero profit sensitivity to hashrate."""


@dataclass(frozen=True)
class MarketState:
    """Exogenous market conditions faced by miners.

    exchange_rate: USD per BTC.
    unit_hash_cost: USD to run one hashrate unit for one target interval.
    competition_margin: required excess profit per unit (0 under free entry).
    asic_efficiency: hashes per kWh.
    electricity_price: USD per kWh.
    """

    exchange_rate: float
    unit_hash_cost: float
    competition_margin: float = 0.0
    asic_efficiency: float = 1.0
    electricity_price: float = 0.0

    def __post_init__(self) -> None:
        if self.exchange_rate <= 0:
            raise ValueError("exchange_rate must be > 0")
        if self.unit_hash_cost < 0 or self.competition_margin < 0:
            raise ValueError("costs must be non-negative")
        if self.unit_hash_cost + self.competition_margin == 0:
            raise ValueError("unit_hash_cost + competition_margin must be > 0")
        if self.asic_efficiency <= 0:
            raise ValueError("asic_efficiency must be > 0")


@dataclass(frozen=True)
class HashrateModel:
    """Model choice for the per-epoch hashrate update."""

    kind: str  # "closed_form" | "log_regression"
    alphas: tuple[float, float, float, float] | None = None
    r_squared: float | None = None
    stderr: tuple[float, float, float, float] | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("closed_form", "log_regression"):
            raise ValueError(f"unknown hashrate model kind: {self.kind}")
        if self.kind == "log_regression":
            if self.alphas is None or len(self.alphas) != 4:
                raise ValueError("log_regression requires four coefficients")
            if not all(math.isfinite(a) for a in self.alphas):
                raise ValueError("log_regression coefficients must be finite")


CLOSED_FORM = HashrateModel(kind="closed_form")


def equilibrium_hashrate(
    market: MarketState, miner_reward_btc: float, delta_t: float = 0.0
) -> float:
    """Entry-condition hashrate: N = e * P * (1 + dT) / (c + phi)."""
    if 1.0 + delta_t <= 0:
        raise ValueError("1 + delta_t must be positive")
    denom = market.unit_hash_cost + market.competition_margin
    if denom == 0:
        raise DegenerateMarketError("unit cost and competition margin are both zero")
    return market.exchange_rate * miner_reward_btc * (1.0 + delta_t) / denom


def regression_hashrate(
    model: HashrateModel, market: MarketState, miner_reward_btc: float
) -> float:
    """Predicted next-period hashrate from the fitted log-linear model."""
    if model.kind != "log_regression":
        raise WrongModelError("regression_hashrate requires a log_regression model")
    a1, a2, a3, a4 = model.alphas
    log_n = (
        a1
        + a2 * math.log1p(market.exchange_rate * miner_reward_btc)
        + a3 * math.log1p(market.asic_efficiency)
        + a4 * math.log1p(market.unit_hash_cost)
    )
    return math.exp(log_n)


def model_hashrate(
    model: HashrateModel,
    market: MarketState,
    miner_reward_btc: float,
    delta_t: float = 0.0,
) -> float:
    """Dispatch to the configured hashrate model."""
    if model.kind == "closed_form":
        return equilibrium_hashrate(market, miner_reward_btc, delta_t)
    return regression_hashrate(model, market, miner_reward_btc)


def miner_profit(
    market: MarketState,
    miner_reward_btc: float,
    hashrate: float,
    delta_t: float = 0.0,
) -> float:
    """Per-unit profit at total hashrate N: (1/N)*e*P*(1+dT) - c.

    Substituting equilibrium_hashrate for N returns exactly the competition
    margin phi.
    """
    if hashrate <= 0:
        raise ZeroDivisionError("hashrate must be positive")
    gross = market.exchange_rate * miner_reward_btc * (1.0 + delta_t)
    return gross / hashrate - market.unit_hash_cost


def growth_rate_effect(hashrate: float, delta_n: float, difficulty: float) -> float:
    """Blocks-per-target-interval factor after a hashrate change.

    1 + D*(1/N - 1/(N+dN)): the shift in expected block cadence when
    hashrate moves from N to N+dN at fixed difficulty, expressed with D in
    units where the on-target ratio D/N is 1.
    """
    return 1.0 + difficulty * (1.0 / hashrate - 1.0 / (hashrate + delta_n))


def dynamic_profit(
    market: MarketState,
    miner_reward_btc: float,
    delta_p_btc: float,
    hashrate: float,
    delta_n: float,
    difficulty: float,
) -> float:
    """Per-unit profit after a reward perturbation dP and hashrate move dN.

    Decomposes into a lottery effect 1/(N+dN) (the per-round odds of
    winning) and the growth-rate effect (how many rounds fit in a target
    interval): profit = lottery * growth * e * (P + dP) - c. With
    dP = dN = 0 and D on target this reduces to miner_profit at dT = 0.
    """
    if hashrate <= 0 or hashrate + delta_n <= 0:
        raise ValueError("hashrate and hashrate + delta_n must be positive")
    if difficulty <= 0:
        raise ValueError("difficulty must be positive")
    lottery = 1.0 / (hashrate + delta_n)
    growth = growth_rate_effect(hashrate, delta_n, difficulty)
    gross = market.exchange_rate * (miner_reward_btc + delta_p_btc)
    return lottery * growth * gross - market.unit_hash_cost


def marginal_profit_wrt_hashrate(
    market: MarketState,
    miner_reward_btc: float,
    delta_p_btc: float,
    hashrate: float,
    delta_n: float = 0.0,
) -> float:
    """Reward-response sensitivity of profit to total hashrate.

    The closed form -2*e*(P+dP)/(N+dN)**2 used by the stability analysis:
    both the dilution of lottery odds and the cadence shift are counted as
    profit losses, which makes the sensitivity strictly negative whenever
    the reward value is positive. It is deliberately not the exact partial
    of dynamic_profit, whose lottery and growth terms cancel to first order
    at the on-target point.
    """
    if hashrate + delta_n <= 0:
        raise ValueError("hashrate + delta_n must be positive")
    gross = market.exchange_rate * (miner_reward_btc + delta_p_btc)
    return -2.0 * gross / (hashrate + delta_n) ** 2


def marginal_profit_wrt_reward(
    market: MarketState,
    hashrate: float,
    delta_n: float = 0.0,
    difficulty: float | None = None,
) -> float:
    """Exact sensitivity of dynamic_profit to the reward perturbation.

    lottery effect * growth-rate effect * e; strictly positive on the valid
    domain. difficulty defaults to the on-target normalization D = N.
    """
    if hashrate + delta_n <= 0:
        raise ValueError("hashrate + delta_n must be positive")
    if difficulty is None:
        difficulty = hashrate
    lottery = 1.0 / (hashrate + delta_n)
    growth = growth_rate_effect(hashrate, delta_n, difficulty)
    return lottery * growth * market.exchange_rate


def hashrate_response(
    market: MarketState,
    miner_reward_btc: float,
    hashrate: float,
    difficulty: float | None = None,
    delta_p_btc: float = 0.0,
    delta_n: float = 0.0,
) -> float:
    """Hashrate moved per BTC of reward change: -(dpi/dP)/(dpi/dN) > 0.

    The positive ratio is what lets a reward ceiling push hashrate down and
    a floor push it up.
    """
    d_pi_d_n = marginal_profit_wrt_hashrate(
        market, miner_reward_btc, delta_p_btc, hashrate, delta_n
    )
    if d_pi_d_n == 0:
        raise SingularResponseError("profit is insensitive to hashrate here")
    d_pi_d_p = marginal_profit_wrt_reward(market, hashrate, delta_n, difficulty)
    return -d_pi_d_p / d_pi_d_n
