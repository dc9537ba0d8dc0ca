"""Render figures from the simulator's CSV outputs.

These are pure CSV-to-image transforms: every function reads one of the five
CSV schemas, filters/groups it, and draws.  Nothing here recomputes
simulation quantities, and the input files are never written.  Missing
values (empty CSV fields) stay NaN all the way into matplotlib, which draws
them as gaps.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import pandas as pd

AGENTS_COLUMNS = ["run", "scheme", "pi", "agent", "degree", "group", "B", "L", "Q", "P0"]
STRATA_COLUMNS = ["scheme", "pi", "subset", "mean_B", "mean_L", "mean_Q", "mean_P0", "n_agents"]
ACTIVITY_COLUMNS = ["scheme", "pi", "run", "items", "views", "comments", "metas", "K_total"]
EFFECTIVENESS_COLUMNS = ["scheme", "pi", "k_bar", "e_item", "e_view", "e_comm", "e_meta"]

FIGURE_KINDS = ("scatter3", "sweep-lines", "activity", "effectiveness")

SUBSET_ORDER = ["alpha_h", "alpha_l", "beta_h", "beta_l"]
SUBSET_LABELS = {
    "alpha_h": "psych-pref, high degree",
    "alpha_l": "psych-pref, low degree",
    "beta_h": "money-pref, high degree",
    "beta_l": "money-pref, low degree",
}
ACTIVITY_SERIES = ["items", "views", "comments", "metas"]
EFFECT_SERIES = {"e_item": "items", "e_view": "views", "e_comm": "comments", "e_meta": "metas"}


class SchemaError(ValueError):
    """Input CSV does not match the expected column layout."""


class EmptySelectionError(ValueError):
    """A scheme/group filter matched no rows; no image is produced."""


@dataclass(frozen=True)
class FigureSpec:
    """One rendering request: what to draw, from where, filtered how."""

    kind: str
    input_dir: Path
    output: Path
    scheme: str | None = None
    group: str | None = None

    def __post_init__(self) -> None:
        if self.kind not in FIGURE_KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}; expected one of {FIGURE_KINDS}")


def _load(path: Path, columns: list[str]) -> pd.DataFrame:
    if not path.exists():
        raise FileNotFoundError(f"missing input file: {path}")
    df = pd.read_csv(path)
    if list(df.columns) != columns:
        raise SchemaError(f"{path}: columns {list(df.columns)} != expected {columns}")
    return df


def load_agents(path: Path) -> pd.DataFrame:
    return _load(path, AGENTS_COLUMNS)


def load_strata(path: Path) -> pd.DataFrame:
    return _load(path, STRATA_COLUMNS)


def load_activity(path: Path) -> pd.DataFrame:
    return _load(path, ACTIVITY_COLUMNS)


def load_effectiveness(path: Path) -> pd.DataFrame:
    return _load(path, EFFECTIVENESS_COLUMNS)


def prepare_scatter(agents: pd.DataFrame, scheme: str, group: str) -> pd.DataFrame:
    selected = agents[(agents["scheme"] == scheme) & (agents["group"] == group)]
    if selected.empty:
        raise EmptySelectionError(f"no agents for scheme={scheme} group={group}")
    return selected


def prepare_sweep(strata: pd.DataFrame, scheme: str) -> pd.DataFrame:
    """Rows of one scheme over the reward grid, with the no-reward rows
    (scheme S0, pi 0) folded in as each subset's zero point."""
    selected = strata[(strata["scheme"] == scheme) | (strata["pi"] == 0.0)]
    selected = selected.sort_values(["subset", "pi"])
    if selected[selected["scheme"] == scheme].empty:
        raise EmptySelectionError(f"no strata rows for scheme={scheme}")
    return selected


def prepare_activity(activity: pd.DataFrame, scheme: str | None = None) -> pd.DataFrame:
    """Mean activity counts over runs per (scheme, pi); the no-reward cell is
    shared by every scheme's curve."""
    means = (activity.groupby(["scheme", "pi"], as_index=False)[ACTIVITY_SERIES].mean()
             .sort_values(["scheme", "pi"]))
    if scheme is not None:
        zero = means[means["pi"] == 0.0]
        means = pd.concat([zero, means[means["scheme"] == scheme]], ignore_index=True)
        if means[means["scheme"] == scheme].empty:
            raise EmptySelectionError(f"no activity rows for scheme={scheme}")
    return means


def prepare_effectiveness(effectiveness: pd.DataFrame) -> pd.DataFrame:
    """Positive-reward rows sorted by payout size; NaNs are preserved so
    undefined values plot as gaps (the pi=0 row has no defined values at all
    and drops out)."""
    defined = effectiveness[effectiveness["pi"] > 0.0]
    if defined.empty:
        raise EmptySelectionError("no positive-reward rows in effectiveness data")
    return defined.sort_values(["scheme", "k_bar"])


def plot_strategy_scatter(agents_csv: Path, scheme: str, group: str, out: Path) -> Path:
    """Per-agent strategy parameters against degree for one scheme/group."""
    data = prepare_scatter(load_agents(agents_csv), scheme, group)
    fig, ax = plt.subplots(figsize=(5.5, 4))
    for column, marker, color in (("B", "o", "tab:blue"),
                                  ("L", "s", "tab:orange"),
                                  ("Q", "^", "tab:green")):
        ax.scatter(data["degree"], data[column], s=12, alpha=0.45,
                   marker=marker, color=color, label=column)
    ax.set_xlabel("degree")
    ax.set_ylabel("strategy value")
    ax.set_ylim(-0.05, 1.05)
    ax.set_title(f"{scheme} / {SUBSET_LABELS.get(group + '_h', group).split(',')[0]}")
    ax.legend(loc="upper right")
    fig.tight_layout()
    fig.savefig(out, dpi=150)
    plt.close(fig)
    return out


def plot_pi_sweep(strata_csv: Path, scheme: str, out: Path) -> Path:
    """Mean B, L, Q, P0 per subset as the reward level grows."""
    data = prepare_sweep(load_strata(strata_csv), scheme)
    fig, axes = plt.subplots(1, 4, figsize=(14, 3.2), sharex=True)
    for ax, column in zip(axes, ("mean_B", "mean_L", "mean_Q", "mean_P0")):
        for subset in SUBSET_ORDER:
            rows = data[data["subset"] == subset].sort_values("pi")
            if rows.empty:
                continue
            ax.plot(rows["pi"], rows[column], marker="o", ms=3,
                    label=SUBSET_LABELS[subset])
        ax.set_xlabel("reward level")
        ax.set_title(column.replace("mean_", ""))
        ax.set_ylim(-0.05, 1.05)
    axes[0].set_ylabel("group mean")
    axes[-1].legend(fontsize=7, loc="best")
    fig.suptitle(f"strategies vs reward level ({scheme})")
    fig.tight_layout()
    fig.savefig(out, dpi=150)
    plt.close(fig)
    return out


def plot_activity(activity_csv: Path, out: Path, scheme: str | None = None) -> Path:
    """Mean per-run activity counts against the reward level."""
    data = prepare_activity(load_activity(activity_csv), scheme)
    schemes = sorted(s for s in data["scheme"].unique() if s != "S0")
    if scheme is not None:
        schemes = [scheme]
    if not schemes:  # only the no-reward cell present
        schemes = ["S0"]
    fig, axes = plt.subplots(1, len(schemes), figsize=(4.2 * len(schemes), 3.4),
                             sharey=True, squeeze=False)
    zero = data[data["pi"] == 0.0]
    for ax, sch in zip(axes[0], schemes):
        rows = data[(data["scheme"] == sch) | (data["pi"] == 0.0)]
        if sch != "S0" and not zero.empty:
            rows = pd.concat([zero, data[data["scheme"] == sch]], ignore_index=True)
        rows = rows.sort_values("pi")
        for series in ACTIVITY_SERIES:
            ax.plot(rows["pi"], rows[series], marker="o", ms=3, label=series)
        ax.set_xlabel("reward level")
        ax.set_title(sch)
    axes[0][0].set_ylabel("events in final generation")
    axes[0][-1].legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(out, dpi=150)
    plt.close(fig)
    return out


def plot_effectiveness(effectiveness_csv: Path, out: Path) -> Path:
    """Activity gain per unit of average payout, against the average payout.

    Undefined values stay NaN and appear as line gaps.
    """
    data = prepare_effectiveness(load_effectiveness(effectiveness_csv))
    fig, ax = plt.subplots(figsize=(6.5, 4.2))
    for scheme in sorted(data["scheme"].unique()):
        rows = data[data["scheme"] == scheme]
        for column, label in EFFECT_SERIES.items():
            ax.plot(rows["k_bar"], rows[column], marker="o", ms=3,
                    label=f"{scheme} {label}")
    ax.set_xlabel("mean payout per agent")
    ax.set_ylabel("activity gain per unit payout")
    ax.axhline(0.0, color="grey", lw=0.6)
    ax.legend(fontsize=7, ncol=2)
    fig.tight_layout()
    fig.savefig(out, dpi=150)
    plt.close(fig)
    return out


def render(spec: FigureSpec) -> Path:
    """Dispatch one figure request to the matching plot function."""
    indir = spec.input_dir
    if spec.kind == "scatter3":
        if not spec.scheme or not spec.group:
            raise ValueError("scatter3 needs --scheme and --group")
        return plot_strategy_scatter(indir / "agents.csv", spec.scheme, spec.group, spec.output)
    if spec.kind == "sweep-lines":
        if not spec.scheme:
            raise ValueError("sweep-lines needs --scheme")
        return plot_pi_sweep(indir / "strata.csv", spec.scheme, spec.output)
    if spec.kind == "activity":
        return plot_activity(indir / "activity.csv", spec.output, spec.scheme)
    return plot_effectiveness(indir / "effectiveness.csv", spec.output)
