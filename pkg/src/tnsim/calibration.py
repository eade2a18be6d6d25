"""Historical-data ingestion and the log-linear hashrate model fit.

The fitted model predicts next-period hashrate from current conditions:

    log N[t+1] = a1 + a2*log(1 + revenue_usd[t]) + a3*log(1 + efficiency[t])
                 + a4*log(1 + cost[t])

estimated by ordinary least squares on a dataset of period rows shaped like
the public miner-revenue / energy-consumption series.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .market import HashrateModel

REQUIRED_COLUMNS = (
    "period",
    "miner_revenue_usd",
    "energy_or_hashrate",
    "asic_efficiency",
    "electricity_cost",
)


class CalibrationError(Exception):
    pass


class CalibrationDataError(CalibrationError):
    """Input file failed schema or row validation; .errors lists details."""

    def __init__(self, errors: list[str]):
        super().__init__("; ".join(errors))
        self.errors = errors


class UnderdeterminedError(CalibrationError):
    """Too few rows to pin down the four coefficients."""


class SingularFitError(CalibrationError):
    """Design matrix is rank deficient (collinear regressors)."""


@dataclass(frozen=True)
class CalibrationRow:
    period: float
    miner_revenue_usd: float
    energy_or_hashrate: float
    asic_efficiency: float
    electricity_cost: float


@dataclass(frozen=True)
class CalibrationDataset:
    rows: tuple[CalibrationRow, ...]

    def __len__(self) -> int:
        return len(self.rows)


def ingest_csv(path: str | Path) -> CalibrationDataset:
    """Load and validate a calibration CSV, returning rows sorted by period.

    Row-level problems (non-numeric cells, non-positive values, duplicate
    periods) are aggregated into one CalibrationDataError so a bad file is
    reported in full rather than one cell at a time.
    """
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in REQUIRED_COLUMNS if c not in header]
        if missing:
            raise CalibrationDataError(
                [f"missing required column: {c}" for c in missing]
            )
        errors: list[str] = []
        rows: list[CalibrationRow] = []
        seen_periods: set[float] = set()
        for lineno, raw in enumerate(reader, start=2):
            values = {}
            bad = False
            for col in REQUIRED_COLUMNS:
                cell = (raw.get(col) or "").strip()
                try:
                    values[col] = float(cell)
                except ValueError:
                    errors.append(f"line {lineno}: non-numeric {col}: {cell!r}")
                    bad = True
            if bad:
                continue
            if any(values[c] <= 0 for c in REQUIRED_COLUMNS if c != "period"):
                errors.append(f"line {lineno}: values must be positive")
                continue
            if values["period"] in seen_periods:
                errors.append(f"line {lineno}: duplicate period {values['period']}")
                continue
            seen_periods.add(values["period"])
            rows.append(CalibrationRow(**values))
    if errors:
        raise CalibrationDataError(errors)
    rows.sort(key=lambda r: r.period)
    return CalibrationDataset(rows=tuple(rows))


def fit_regression(data: CalibrationDataset) -> HashrateModel:
    """OLS fit of the next-period log-hashrate model.

    Consecutive period pairs form the samples: regressors from row t,
    response log N from row t+1. Reports in-sample R^2 and coefficient
    standard errors (zero-residual-degrees-of-freedom fits get None).
    """
    n_rows = len(data)
    if n_rows < 5:
        raise UnderdeterminedError(
            f"need at least 5 rows for 4 coefficients, got {n_rows}"
        )
    rows = data.rows
    design = np.array(
        [
            [
                1.0,
                math.log1p(r.miner_revenue_usd),
                math.log1p(r.asic_efficiency),
                math.log1p(r.electricity_cost),
            ]
            for r in rows[:-1]
        ]
    )
    response = np.array([math.log(r.energy_or_hashrate) for r in rows[1:]])

    if np.linalg.matrix_rank(design) < 4:
        raise SingularFitError("design matrix is rank deficient")

    coef, _, _, _ = np.linalg.lstsq(design, response, rcond=None)
    fitted = design @ coef
    residuals = response - fitted
    ss_res = float(residuals @ residuals)
    ss_tot = float(np.sum((response - response.mean()) ** 2))
    r_squared = 1.0 if ss_tot == 0 else 1.0 - ss_res / ss_tot

    dof = len(response) - 4
    stderr = None
    if dof > 0:
        sigma2 = ss_res / dof
        cov = sigma2 * np.linalg.inv(design.T @ design)
        stderr = tuple(float(s) for s in np.sqrt(np.diag(cov)))

    return HashrateModel(
        kind="log_regression",
        alphas=tuple(float(c) for c in coef),
        r_squared=r_squared,
        stderr=stderr,
    )
