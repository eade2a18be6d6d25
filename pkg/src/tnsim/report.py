"""Figure rendering for simulation runs.

Writes PNG panels next to the exported trajectory so a run directory is
self-describing: the D/T signal against its target band with the active
bound, hashrates, the reward medians, and the neutrality pair with the
pool/remainder levels.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .controller import Mode  # noqa: E402
from .costs import CostCurve, IntervalResult  # noqa: E402
from .engine import TrajectoryRecord  # noqa: E402
from .scenario import Scenario  # noqa: E402


def _shade_modes(ax, records: list[TrajectoryRecord]) -> None:
    for r in records:
        if r.mode == Mode.CEILING.value:
            ax.axvspan(r.epoch - 0.5, r.epoch + 0.5, color="tab:red", alpha=0.12)
        elif r.mode == Mode.FLOOR.value:
            ax.axvspan(r.epoch - 0.5, r.epoch + 0.5, color="tab:blue", alpha=0.12)


def render_trajectory_figures(
    records: list[TrajectoryRecord], scenario: Scenario, outdir: str | Path
) -> list[Path]:
    """Render the standard four panels; returns the written paths."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    if not records:
        return []
    epochs = [r.epoch for r in records]
    written: list[Path] = []

    fig, ax = plt.subplots(figsize=(8, 4.5))
    ax.plot(epochs, [r.d_over_t for r in records], marker="o", ms=3, label="D/T")
    ax.axhline(scenario.controller.dt_upper, color="tab:red", ls="--", label="upper bound")
    ax.axhline(scenario.controller.dt_lower, color="tab:blue", ls="--", label="lower bound")
    _shade_modes(ax, records)
    ax.set_xlabel("epoch")
    ax.set_ylabel("difficulty / elapsed time")
    ax.set_title("Hashrate signal vs target band (shading: active bound)")
    ax.legend(loc="best", fontsize=8)
    path = outdir / "dt_signal.png"
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    written.append(path)

    fig, ax = plt.subplots(figsize=(8, 4.5))
    ax.plot(epochs, [r.hashrate_estimate for r in records], marker="o", ms=3,
            label="estimated (D/T based)")
    ax.plot(epochs, [r.hashrate_model for r in records], marker="s", ms=3,
            label="market model")
    ax.set_xlabel("epoch")
    ax.set_ylabel("hashrate (units)")
    ax.set_title("Hashrate")
    ax.legend(loc="best", fontsize=8)
    path = outdir / "hashrate.png"
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    written.append(path)

    fig, ax = plt.subplots(figsize=(8, 4.5))
    ax.plot(epochs, [r.median_total_reward for r in records], marker="o", ms=3,
            label="median total reward")
    ax.plot(epochs, [r.median_miner_reward for r in records], marker="s", ms=3,
            label="median miner reward")
    bound_epochs = [r.epoch for r in records if r.bound is not None]
    if bound_epochs:
        ax.step(
            bound_epochs,
            [r.bound for r in records if r.bound is not None],
            where="post", color="tab:red", label="active bound",
        )
    ax.set_xlabel("epoch")
    ax.set_ylabel("Satoshi")
    ax.set_title("Block rewards and controller bound")
    ax.legend(loc="best", fontsize=8)
    path = outdir / "rewards.png"
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    written.append(path)

    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(8, 6), sharex=True)
    ax1.plot(epochs, [r.agg_sp_targeted for r in records], label="targeted", lw=2)
    ax1.plot(epochs, [r.agg_sp_nakamoto for r in records], label="nakamoto baseline",
             ls="--")
    ax1.set_ylabel("aggregate spending potential")
    ax1.set_title("Monetary neutrality (curves coincide)")
    ax1.legend(loc="best", fontsize=8)
    ax2.plot(epochs, [r.pool for r in records], label="pool", color="tab:green")
    ax2.plot(epochs, [r.remainder for r in records], label="remainder",
             color="tab:orange")
    ax2.set_xlabel("epoch")
    ax2.set_ylabel("Satoshi")
    ax2.legend(loc="best", fontsize=8)
    path = outdir / "neutrality.png"
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    written.append(path)

    return written


def render_interval_figure(
    env: CostCurve,
    sec: CostCurve,
    domain: tuple[float, float],
    result: IntervalResult,
    path: str | Path,
    grid: int = 512,
) -> Path:
    """Cost curves with the minimum-total-cost interval highlighted."""
    import numpy as np

    ns = np.linspace(domain[0], domain[1], grid)
    env_c = np.asarray(env.evaluate(ns))
    sec_c = np.asarray(sec.evaluate(ns))
    fig, ax = plt.subplots(figsize=(8, 4.5))
    ax.plot(ns, env_c, label="environmental cost")
    ax.plot(ns, sec_c, label="security cost")
    ax.plot(ns, env_c + sec_c, label="total", lw=2, color="black")
    ax.axvspan(result.n_low, result.n_high, color="tab:green", alpha=0.2,
               label="target interval")
    ax.set_xlabel("hashrate (units)")
    ax.set_ylabel("USD")
    ax.set_title("Externality costs and target hashrate interval")
    ax.legend(loc="best", fontsize=8)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
