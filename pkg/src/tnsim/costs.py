"""Externality cost curves and the target hashrate interval search.

Total cost at hashrate N is the sum of an increasing environmental curve
(emissions scale with electricity drawn by guessing) and a decreasing
security curve (attacks get cheaper as honest hashrate falls). The target
interval is wherever that sum is within `tolerance` of its minimum over a
grid. Curve shapes are user-supplied; the built-in defaults are
illustrative, not calibrated.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

ELECTRICITY_DEMAND_ELASTICITY = -2.06  # US price elasticity of demand


class CostModelError(Exception):
    pass


class CurveValidationError(CostModelError):
    """Curve parameters contradict the declared monotonicity direction."""


class CurveDomainError(CostModelError):
    """Curve evaluated outside its domain or to a negative value."""


@dataclass(frozen=True)
class CostCurve:
    """Parametric non-negative monotone curve over hashrate.

    kind is one of power_law (scale * n**exponent), linear
    (slope * n + intercept) or piecewise_linear (interpolated knots).
    direction declares the intended monotonicity and is validated against
    the parameters at construction.
    """

    kind: str
    direction: str
    scale: float = 1.0
    exponent: float = 1.0
    slope: float = 0.0
    intercept: float = 0.0
    knots: tuple[tuple[float, float], ...] = ()

    def __post_init__(self) -> None:
        if self.direction not in ("increasing", "decreasing"):
            raise CurveValidationError(f"unknown direction: {self.direction}")
        if self.kind == "power_law":
            if self.scale < 0:
                raise CurveValidationError("power_law scale must be >= 0")
            if self.scale > 0 and self.exponent != 0:
                grows = self.exponent > 0
                if grows != (self.direction == "increasing"):
                    raise CurveValidationError(
                        "power_law exponent contradicts direction tag"
                    )
        elif self.kind == "linear":
            if self.slope > 0 and self.direction != "increasing":
                raise CurveValidationError("positive slope is not decreasing")
            if self.slope < 0 and self.direction != "decreasing":
                raise CurveValidationError("negative slope is not increasing")
        elif self.kind == "piecewise_linear":
            if len(self.knots) < 2:
                raise CurveValidationError("piecewise_linear needs >= 2 knots")
            xs = [x for x, _ in self.knots]
            ys = [y for _, y in self.knots]
            if any(b <= a for a, b in zip(xs, xs[1:])):
                raise CurveValidationError("knot x values must strictly increase")
            if any(y < 0 for y in ys):
                raise CurveValidationError("knot values must be non-negative")
            if self.direction == "increasing" and any(
                b < a for a, b in zip(ys, ys[1:])
            ):
                raise CurveValidationError("knot values contradict increasing tag")
            if self.direction == "decreasing" and any(
                b > a for a, b in zip(ys, ys[1:])
            ):
                raise CurveValidationError("knot values contradict decreasing tag")
        else:
            raise CurveValidationError(f"unknown curve kind: {self.kind}")

    def evaluate(self, n):
        """Evaluate at a scalar or ndarray of hashrates (must be > 0)."""
        n = np.asarray(n, dtype=float)
        if np.any(n <= 0):
            raise CurveDomainError("hashrate must be positive")
        if self.kind == "power_law":
            value = self.scale * n**self.exponent
        elif self.kind == "linear":
            value = self.slope * n + self.intercept
        else:
            xs = np.array([x for x, _ in self.knots])
            ys = np.array([y for _, y in self.knots])
            if np.any(n < xs[0]) or np.any(n > xs[-1]):
                raise CurveDomainError("hashrate outside piecewise knot range")
            value = np.interp(n, xs, ys)
        if np.any(value < 0):
            raise CurveDomainError("curve evaluated to a negative cost")
        return value if value.ndim else float(value)

    def __call__(self, n):
        return self.evaluate(n)


def power_law(scale: float, exponent: float, direction: str) -> CostCurve:
    return CostCurve(kind="power_law", direction=direction, scale=scale, exponent=exponent)


def linear(slope: float, intercept: float, direction: str) -> CostCurve:
    return CostCurve(kind="linear", direction=direction, slope=slope, intercept=intercept)


def piecewise_linear(knots, direction: str) -> CostCurve:
    return CostCurve(
        kind="piecewise_linear",
        direction=direction,
        knots=tuple((float(x), float(y)) for x, y in knots),
    )


def default_demo_curves() -> tuple[CostCurve, CostCurve]:
    """Illustrative environmental/security pair with an interior optimum."""
    return power_law(1.0, 1.0, "increasing"), power_law(100.0, -1.0, "decreasing")


def curve_from_json_dict(doc: dict) -> CostCurve:
    """Build a curve from its JSON form (kind/direction plus parameters)."""
    if not isinstance(doc, dict):
        raise CurveValidationError("curve definition must be an object")
    kind = doc.get("kind")
    direction = doc.get("direction", "")
    if kind == "power_law":
        return power_law(float(doc.get("scale", 1.0)), float(doc.get("exponent", 1.0)),
                         direction)
    if kind == "linear":
        return linear(float(doc.get("slope", 0.0)), float(doc.get("intercept", 0.0)),
                      direction)
    if kind == "piecewise_linear":
        return piecewise_linear(doc.get("knots", ()), direction)
    raise CurveValidationError(f"unknown curve kind: {kind}")


@dataclass(frozen=True)
class IntervalResult:
    """Hashrate interval within `tolerance` of the minimum total cost."""

    n_low: float
    n_high: float
    min_total_cost: float


def per_hash_cost(electricity_price: float, asic_efficiency: float) -> float:
    """USD per puzzle guess: (USD per kWh) / (guesses per kWh)."""
    if asic_efficiency <= 0:
        raise CostModelError("asic_efficiency must be positive")
    if electricity_price < 0:
        raise CostModelError("electricity_price must be non-negative")
    return electricity_price / asic_efficiency


def total_cost(env: CostCurve, sec: CostCurve, n: float) -> float:
    """Sum of the two externality costs at hashrate n."""
    _check_directions(env, sec)
    return float(env.evaluate(n) + sec.evaluate(n))


def _check_directions(env: CostCurve, sec: CostCurve) -> None:
    if env.direction != "increasing":
        raise CurveValidationError("environmental curve must be increasing")
    if sec.direction != "decreasing":
        raise CurveValidationError("security curve must be decreasing")


def optimal_interval(
    env: CostCurve,
    sec: CostCurve,
    domain: tuple[float, float],
    grid: int = 10_000,
    tolerance: float = 0.0,
) -> IntervalResult:
    """Grid search for the minimum-total-cost hashrate interval.

    Returns the tightest interval enclosing every grid point whose total
    cost is within tolerance of the grid minimum.
    """
    _check_directions(env, sec)
    n_min, n_max = domain
    if grid < 3:
        raise ValueError("grid must be >= 3")
    if not 0 < n_min < n_max:
        raise ValueError("domain must satisfy 0 < n_min < n_max")
    if tolerance < 0:
        raise ValueError("tolerance must be >= 0")
    ns = np.linspace(n_min, n_max, grid)
    costs = np.asarray(env.evaluate(ns)) + np.asarray(sec.evaluate(ns))
    best = float(costs.min())
    inside = ns[costs <= best + tolerance]
    return IntervalResult(
        n_low=float(inside.min()), n_high=float(inside.max()), min_total_cost=best
    )


def double_spend_profit(
    p_success: float, value: float, cost_per_block: float, expected_blocks: float
) -> float:
    """Expected attacker profit: p*V - (1-p) * E[cost/block] * E[blocks]."""
    if not 0 <= p_success <= 1:
        raise ValueError("p_success must lie in [0, 1]")
    if value < 0 or cost_per_block < 0 or expected_blocks < 0:
        raise ValueError("value, cost and blocks must be non-negative")
    return p_success * value - (1 - p_success) * cost_per_block * expected_blocks


def electricity_price_response(
    base_price: float,
    demand_ratio: float,
    elasticity: float = ELECTRICITY_DEMAND_ELASTICITY,
) -> float:
    """Price after a demand shift, via constant-elasticity inversion.

    price = base * demand_ratio ** (1/elasticity). Optional scenario
    feature, off by default.
    """
    if base_price < 0 or demand_ratio <= 0:
        raise ValueError("need base_price >= 0 and demand_ratio > 0")
    if elasticity == 0:
        raise ValueError("elasticity must be nonzero")
    return base_price * demand_ratio ** (1.0 / elasticity)
