"""Market equilibrium, profit decomposition and the reward-response ratio."""

import math

import numpy as np
import pytest

from tnsim.market import (
    CLOSED_FORM,
    HashrateModel,
    MarketState,
    WrongModelError,
    dynamic_profit,
    equilibrium_hashrate,
    hashrate_response,
    marginal_profit_wrt_hashrate,
    marginal_profit_wrt_reward,
    miner_profit,
    model_hashrate,
    regression_hashrate,
)


def market(e=1.0, c=1.0, phi=0.0, eff=1.0):
    return MarketState(
        exchange_rate=e, unit_hash_cost=c, competition_margin=phi, asic_efficiency=eff
    )


class TestEquilibriumHashrate:
    def test_hand_value(self):
        assert equilibrium_hashrate(market(e=1.0, c=1.0), 10.0) == 10.0

    def test_zero_reward_zero_hashrate(self):
        assert equilibrium_hashrate(market(), 0.0) == 0.0

    def test_hand_value_with_margin(self):
        m = market(e=2.0, c=0.5, phi=0.125)
        assert equilibrium_hashrate(m, 6.25) == 20.0

    def test_degenerate_market_rejected_at_construction(self):
        with pytest.raises(ValueError):
            MarketState(exchange_rate=1.0, unit_hash_cost=0.0, competition_margin=0.0)

    def test_monotonicity(self):
        rng = np.random.default_rng(3)
        for _ in range(200):
            e, c, phi, p = rng.uniform(0.1, 10, size=4)
            base = equilibrium_hashrate(market(e=e, c=c, phi=phi), p)
            assert equilibrium_hashrate(market(e=e * 2, c=c, phi=phi), p) > base
            assert equilibrium_hashrate(market(e=e, c=c, phi=phi), p * 2) > base
            assert equilibrium_hashrate(market(e=e, c=c * 2, phi=phi), p) < base
            assert equilibrium_hashrate(market(e=e, c=c, phi=phi * 2), p) < base


class TestRegressionHashrate:
    def test_zero_coefficients_give_one(self):
        model = HashrateModel(kind="log_regression", alphas=(0.0, 0.0, 0.0, 0.0))
        assert regression_hashrate(model, market(), 123.0) == 1.0

    def test_hand_value_e_squared(self):
        model = HashrateModel(kind="log_regression", alphas=(1.0, 1.0, 0.0, 0.0))
        # pick eP so that log(1 + eP) = 1
        reward = math.e - 1.0
        out = regression_hashrate(model, market(e=1.0), reward)
        assert out == pytest.approx(math.e**2, rel=1e-12)

    def test_monotone_in_reward_value(self):
        model = HashrateModel(kind="log_regression", alphas=(0.3, 0.8, 0.1, -0.2))
        low = regression_hashrate(model, market(e=2.0), 5.0)
        high = regression_hashrate(model, market(e=2.0), 10.0)
        assert high > low

    def test_wrong_model_error(self):
        with pytest.raises(WrongModelError):
            regression_hashrate(CLOSED_FORM, market(), 1.0)

    def test_dispatch(self):
        assert model_hashrate(CLOSED_FORM, market(), 10.0) == 10.0
        model = HashrateModel(kind="log_regression", alphas=(0.0, 0.0, 0.0, 0.0))
        assert model_hashrate(model, market(), 10.0) == 1.0

    def test_nonfinite_coefficients_rejected(self):
        with pytest.raises(ValueError):
            HashrateModel(kind="log_regression", alphas=(0.0, math.inf, 0.0, 0.0))


class TestMinerProfit:
    def test_hand_value(self):
        assert miner_profit(market(e=1.0, c=1.0), 10.0, 5.0) == 1.0

    def test_halted_growth_loses_unit_cost(self):
        assert miner_profit(market(c=2.5), 10.0, 4.0, delta_t=-1.0) == -2.5

    def test_equilibrium_fixed_point_returns_margin(self):
        rng = np.random.default_rng(8)
        for _ in range(300):
            e, c, phi, p = rng.uniform(0.1, 20, size=4)
            m = market(e=e, c=c, phi=phi)
            n = equilibrium_hashrate(m, p)
            assert miner_profit(m, p, n) == pytest.approx(phi, rel=1e-12, abs=1e-12)

    def test_zero_hashrate_divides(self):
        with pytest.raises(ZeroDivisionError):
            miner_profit(market(), 1.0, 0.0)


class TestDynamicProfit:
    def test_zero_perturbation_reduces_to_static_profit(self):
        m = market(e=2.0, c=0.7)
        for n in (1.0, 5.0, 42.0):
            assert dynamic_profit(m, 10.0, 0.0, n, 0.0, n) == pytest.approx(
                miner_profit(m, 10.0, n), rel=1e-12
            )

    def test_hand_value(self):
        # (1/20) * (1 + 10*(1/10 - 1/20)) * 10 - c = 0.75 - c
        m = market(e=1.0, c=1.0)
        assert dynamic_profit(m, 10.0, 0.0, 10.0, 10.0, 10.0) == pytest.approx(
            0.75 - 1.0, rel=1e-12
        )

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            dynamic_profit(market(), 10.0, 0.0, 10.0, -10.0, 10.0)
        with pytest.raises(ValueError):
            dynamic_profit(market(), 10.0, 0.0, 10.0, 0.0, 0.0)


class TestMarginals:
    def test_hashrate_marginal_hand_value(self):
        assert marginal_profit_wrt_hashrate(market(), 10.0, 0.0, 10.0, 0.0) == -0.2

    def test_hashrate_marginal_zero_reward(self):
        assert marginal_profit_wrt_hashrate(market(), 5.0, -5.0, 10.0, 0.0) == 0.0

    def test_hashrate_marginal_sign(self):
        rng = np.random.default_rng(21)
        for _ in range(1000):
            e, p, n = rng.uniform(0.1, 100, size=3)
            dp = float(rng.uniform(-p / 2, p))
            dn = float(rng.uniform(-n / 2, 2 * n))
            out = marginal_profit_wrt_hashrate(market(e=e), p, dp, n, dn)
            assert out < 0

    def test_reward_marginal_hand_value(self):
        # at dN=0 with on-target difficulty the growth-rate effect is 1
        assert marginal_profit_wrt_reward(market(e=1.0), 10.0, 0.0) == pytest.approx(
            0.1, rel=1e-12
        )

    def test_reward_marginal_linear_in_exchange_rate(self):
        one = marginal_profit_wrt_reward(market(e=1.0), 7.0, 1.5, 7.0)
        two = marginal_profit_wrt_reward(market(e=2.0), 7.0, 1.5, 7.0)
        assert two == pytest.approx(2 * one, rel=1e-12)

    def test_reward_marginal_sign(self):
        rng = np.random.default_rng(22)
        for _ in range(1000):
            n = float(rng.uniform(1, 200))
            dn = float(rng.uniform(-n / 4, 2 * n))
            d = float(rng.uniform(0.5, 1.5)) * n
            e = float(rng.uniform(0.1, 10))
            assert marginal_profit_wrt_reward(market(e=e), n, dn, d) > 0

    def test_reward_marginal_is_exact_partial_of_dynamic_profit(self):
        # central finite difference in the reward perturbation; dynamic
        # profit is affine in it so the quotient is exact up to rounding
        rng = np.random.default_rng(23)
        m = market(e=1.7, c=0.4)
        for _ in range(300):
            p = float(rng.uniform(1, 50))
            n = float(rng.uniform(2, 300))
            dn = float(rng.uniform(-n / 4, 2 * n))
            d = float(rng.uniform(0.5, 1.5)) * n
            h = max(p, 1.0) * 1e-5
            hi = dynamic_profit(m, p, +h, n, dn, d)
            lo = dynamic_profit(m, p, -h, n, dn, d)
            fd = (hi - lo) / (2 * h)
            closed = marginal_profit_wrt_reward(m, n, dn, d)
            assert fd == pytest.approx(closed, rel=1e-6)

    def test_hashrate_marginal_is_linearization_not_exact_partial(self):
        # The exact partial of dynamic_profit in the hashrate move vanishes
        # at the on-target point: the lottery dilution (-eP/N^2) and the
        # cadence gain (+eP*D/N^3 with D=N) cancel to first order. The
        # closed-form sensitivity instead counts both as losses, giving
        # -2eP/N^2; the controller's response analysis relies on that
        # nonzero slope.
        m = market(e=1.0, c=1.0)
        p, n = 10.0, 10.0
        h = 1e-6
        fd = (
            dynamic_profit(m, p, 0.0, n, +h, n) - dynamic_profit(m, p, 0.0, n, -h, n)
        ) / (2 * h)
        assert abs(fd) < 1e-6
        assert marginal_profit_wrt_hashrate(m, p, 0.0, n, 0.0) == -0.2


class TestHashrateResponse:
    def test_hand_value(self):
        assert hashrate_response(market(e=1.0), 10.0, 10.0) == pytest.approx(
            0.5, rel=1e-12
        )

    def test_positive_on_valid_domain(self):
        rng = np.random.default_rng(31)
        for _ in range(1000):
            e = float(rng.uniform(0.1, 10))
            p = float(rng.uniform(0.5, 100))
            n = float(rng.uniform(1, 500))
            d = float(rng.uniform(0.5, 1.5)) * n
            dn = float(rng.uniform(0, n))
            out = hashrate_response(market(e=e), p, n, d, 0.0, dn)
            assert out > 0

    def test_scaling_exchange_rate_preserves_sign(self):
        base = hashrate_response(market(e=1.0), 10.0, 10.0)
        scaled = hashrate_response(market(e=7.0), 10.0, 10.0)
        assert (base > 0) == (scaled > 0)

    def test_singular_response_raises(self):
        from tnsim.market import SingularResponseError

        with pytest.raises(SingularResponseError):
            # zero reward value zeroes the profit sensitivity to hashrate
            hashrate_response(market(), 5.0, 10.0, delta_p_btc=-5.0)
