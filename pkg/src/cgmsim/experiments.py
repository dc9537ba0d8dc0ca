"""Multi-run experiment orchestration and tabular outputs.

A plan spans (scheme, reward level, run) cells.  Every cell gets its own
random stream derived from the plan's base seed, networks and preference
profiles are shared per run index across cells (for paired comparisons),
and all results land in five CSV files:

  agents.csv         run, scheme, pi, agent, degree, group, B, L, Q, P0
  series.csv         run, scheme, pi, generation, group, mean_B, mean_L, mean_Q, mean_P0
  strata.csv         scheme, pi, subset, mean_B, mean_L, mean_Q, mean_P0, n_agents
  activity.csv       scheme, pi, run, items, views, comments, metas, K_total
  effectiveness.csv  scheme, pi, k_bar, e_item, e_view, e_comm, e_meta

Missing values are empty fields, never sentinels.  A reward level of 0 is
by definition the no-reward scheme, so pi = 0 cells are canonicalised to
scheme S0 and serve as the shared baseline for the effectiveness metric.
"""

from __future__ import annotations

import csv
import hashlib
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from random import Random
from typing import Sequence

from .errors import ConfigurationError
from .evolution import (
    EvolutionConfig,
    GenerationStats,
    run_episode,
    run_episode_naive_ga,
)
from .game import (
    EconomyConfig,
    SchemeConfig,
    make_profiles,
    post_probability,
)
from .network import ConnConfig, generate_conn

EVOLVERS = ("mwga", "naive-ga")
SUBSETS = ("alpha_h", "alpha_l", "beta_h", "beta_l")
ACTIVITIES = ("items", "views", "comments", "metas")

AGENTS_HEADER = ["run", "scheme", "pi", "agent", "degree", "group", "B", "L", "Q", "P0"]
SERIES_HEADER = ["run", "scheme", "pi", "generation", "group",
                 "mean_B", "mean_L", "mean_Q", "mean_P0"]
STRATA_HEADER = ["scheme", "pi", "subset", "mean_B", "mean_L", "mean_Q", "mean_P0", "n_agents"]
ACTIVITY_HEADER = ["scheme", "pi", "run", "items", "views", "comments", "metas", "K_total"]
EFFECTIVENESS_HEADER = ["scheme", "pi", "k_bar", "e_item", "e_view", "e_comm", "e_meta"]


@dataclass(frozen=True)
class PopulationConfig:
    n: int
    n_alpha: int
    mode: str = "half-uniform"

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ConfigurationError(f"population must have >= 2 agents, got {self.n}")
        if not 0 <= self.n_alpha <= self.n:
            raise ConfigurationError(f"alpha count {self.n_alpha} must lie in [0, {self.n}]")


@dataclass(frozen=True)
class ExperimentPlan:
    """Everything needed to reproduce a batch of runs from one seed."""

    schemes: tuple[str, ...]
    pi_values: tuple[float, ...]
    runs: int
    base_seed: int
    network: ConnConfig
    economy: EconomyConfig
    evolution: EvolutionConfig
    population: PopulationConfig
    degree_threshold: int = 50
    evolver: str = "mwga"
    share_networks: bool = True

    def __post_init__(self) -> None:
        if not self.schemes:
            raise ConfigurationError("plan needs at least one scheme")
        for s in self.schemes:
            if s not in ("S0", "S1", "S2", "S3"):
                raise ConfigurationError(f"unknown scheme {s!r}")
        if not self.pi_values:
            raise ConfigurationError("plan needs at least one reward level")
        if any(pi < 0 for pi in self.pi_values):
            raise ConfigurationError("reward levels must be >= 0")
        if self.runs < 1:
            raise ConfigurationError(f"run count must be >= 1, got {self.runs}")
        if self.degree_threshold < 0:
            raise ConfigurationError("degree threshold must be >= 0")
        if self.evolver not in EVOLVERS:
            raise ConfigurationError(f"unknown evolver {self.evolver!r}; expected one of {EVOLVERS}")
        if self.network.n != self.population.n:
            raise ConfigurationError(
                f"network size {self.network.n} != population size {self.population.n}"
            )


@dataclass
class RunRecord:
    """One (scheme, pi, run) cell: per-agent final strategies and degrees,
    the last generation's activity totals, and the per-generation series."""

    scheme: str
    pi: float
    run: int
    degrees: list[int]
    groups: list[str]
    b: list[float]
    l: list[float]
    q: list[float]
    p0: list[float]
    posts: list[int]
    views: list[int]
    comments: list[int]
    metas: list[int]
    money: list[float]
    series: list[GenerationStats]


@dataclass(frozen=True)
class AgentRow:
    run: int
    scheme: str
    pi: float
    agent: int
    degree: int
    group: str
    b: float
    l: float
    q: float
    p0: float


@dataclass(frozen=True)
class ActivityRow:
    scheme: str
    pi: float
    run: int
    items: int
    views: int
    comments: int
    metas: int
    k_total: float


@dataclass(frozen=True)
class StratumStats:
    scheme: str
    pi: float
    subset: str
    mean_b: float
    mean_l: float
    mean_q: float
    mean_p0: float
    n_agents: int


@dataclass(frozen=True)
class EffectivenessRecord:
    """Activity gain per unit of average monetary reward paid; the four
    e_* values are None when undefined (pi = 0, or nothing was paid)."""

    scheme: str
    pi: float
    k_bar: float
    e_item: float | None
    e_view: float | None
    e_comm: float | None
    e_meta: float | None


def derive_seed(base_seed: int, *parts) -> int:
    """Derive an independent 64-bit child seed from a label tuple.

    The label joins the base seed and each part (ints via str, floats via
    repr) with '|' and is hashed with SHA-256; the top 8 digest bytes form
    the seed.  Distinct labels give independent streams.
    """
    pieces = [str(int(base_seed))]
    for p in parts:
        if isinstance(p, bool):
            raise TypeError("bool seed parts are ambiguous")
        if isinstance(p, int):
            pieces.append(str(p))
        elif isinstance(p, float):
            pieces.append(repr(p))
        elif isinstance(p, str):
            pieces.append(p)
        else:
            raise TypeError(f"unsupported seed part {p!r}")
    digest = hashlib.sha256("|".join(pieces).encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def plan_cells(plan: ExperimentPlan) -> list[tuple[str, float]]:
    """Deduplicated (scheme, pi) cells in deterministic order.

    pi = 0 under any scheme means "no reward", so such cells collapse to
    (S0, 0.0); S0 itself ignores the pi grid.
    """
    cells = set()
    for scheme in plan.schemes:
        if scheme == "S0":
            cells.add(("S0", 0.0))
            continue
        for pi in plan.pi_values:
            pi = float(pi)
            cells.add(("S0", 0.0) if pi == 0.0 else (scheme, pi))
    return sorted(cells)


def _network_seed(plan: ExperimentPlan, scheme: str, pi: float, run: int) -> int:
    if plan.share_networks:
        return derive_seed(plan.base_seed, "network", run)
    return derive_seed(plan.base_seed, "network", scheme, pi, run)


def _profile_seed(plan: ExperimentPlan, scheme: str, pi: float, run: int) -> int:
    if plan.share_networks:
        return derive_seed(plan.base_seed, "profiles", run)
    return derive_seed(plan.base_seed, "profiles", scheme, pi, run)


def run_cell(plan: ExperimentPlan, scheme: str, pi: float, run: int) -> RunRecord:
    """Execute one (scheme, pi, run) episode and package the record."""
    net_cfg = ConnConfig(n=plan.network.n, u=plan.network.u,
                         seed=_network_seed(plan, scheme, pi, run))
    graph = generate_conn(net_cfg)
    profiles = make_profiles(
        plan.population.n, plan.population.n_alpha, plan.population.mode,
        Random(_profile_seed(plan, scheme, pi, run)),
    )
    episode_rng = Random(derive_seed(plan.base_seed, "episode", scheme, pi, run))
    scheme_cfg = SchemeConfig(scheme=scheme, pi=pi)
    if plan.evolver == "mwga":
        result = run_episode(graph, profiles, scheme_cfg, plan.economy,
                             plan.evolution, episode_rng)
    else:
        result = run_episode_naive_ga(graph, profiles, scheme_cfg, plan.economy,
                                      plan.evolution, episode_rng)
    tally = result.final_tally
    return RunRecord(
        scheme=scheme,
        pi=pi,
        run=run,
        degrees=[graph.degree(i) for i in range(graph.n)],
        groups=[p.group for p in profiles],
        b=[s.b for s in result.final_strategies],
        l=[s.l for s in result.final_strategies],
        q=[s.q for s in result.final_strategies],
        p0=[post_probability(s.b, s.q, plan.economy.q_min) for s in result.final_strategies],
        posts=list(tally.posts),
        views=list(tally.views),
        comments=list(tally.comments_made),
        metas=list(tally.metas_made),
        money=list(tally.money),
        series=result.series,
    )


def _run_cell_task(args: tuple[ExperimentPlan, str, float, int]) -> RunRecord:
    return run_cell(*args)


def run_plan(plan: ExperimentPlan, jobs: int | None = None) -> list[RunRecord]:
    """Execute every (scheme, pi, run) cell of the plan.

    Cells run in parallel across processes when jobs > 1; records come back
    sorted by (scheme, pi, run) so downstream output is byte-deterministic
    either way.
    """
    tasks = [
        (plan, scheme, pi, run)
        for (scheme, pi) in plan_cells(plan)
        for run in range(plan.runs)
    ]
    if jobs is None:
        jobs = os.cpu_count() or 1
    jobs = max(1, min(jobs, len(tasks)))
    if jobs == 1:
        records = [run_cell(*t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(_run_cell_task, tasks, chunksize=1))
    records.sort(key=lambda r: (r.scheme, r.pi, r.run))
    return records


def agent_rows(records: Sequence[RunRecord]) -> list[AgentRow]:
    rows = []
    for rec in sorted(records, key=lambda r: (r.scheme, r.pi, r.run)):
        for i in range(len(rec.degrees)):
            rows.append(AgentRow(
                run=rec.run, scheme=rec.scheme, pi=rec.pi, agent=i,
                degree=rec.degrees[i], group=rec.groups[i],
                b=rec.b[i], l=rec.l[i], q=rec.q[i], p0=rec.p0[i],
            ))
    return rows


def activity_totals(record: RunRecord) -> ActivityRow:
    """Whole-population activity counts of the record's final generation.

    K_total is paid per triggering event, so it is the reward level times
    the relevant total count (an exact product, never a float accumulation).
    """
    items = sum(record.posts)
    views = sum(record.views)
    comments = sum(record.comments)
    metas = sum(record.metas)
    if record.scheme == "S1":
        k_total = record.pi * items
    elif record.scheme == "S2":
        k_total = record.pi * views
    elif record.scheme == "S3":
        k_total = record.pi * metas
    else:
        k_total = 0.0
    return ActivityRow(scheme=record.scheme, pi=record.pi, run=record.run,
                       items=items, views=views, comments=comments, metas=metas,
                       k_total=k_total)


def activity_rows(records: Sequence[RunRecord]) -> list[ActivityRow]:
    return [activity_totals(r) for r in sorted(records, key=lambda r: (r.scheme, r.pi, r.run))]


def _subset_of(group: str, degree: int, threshold: int) -> str:
    side = "h" if degree >= threshold else "l"
    return f"{'alpha' if group == 'alpha' else 'beta'}_{side}"


def stratify(rows: Sequence[AgentRow], degree_threshold: int) -> list[StratumStats]:
    """Mean B, L, Q, P0 per degree/preference subset per (scheme, pi).

    Agents split into alpha/beta crossed with degree >= threshold (h) or
    below (l).  Means are computed per run first, then averaged over the
    runs where the subset is non-empty; n_agents counts the contributing
    (run, agent) observations.  Subsets empty everywhere are omitted.
    """
    if degree_threshold < 0:
        raise ConfigurationError("degree threshold must be >= 0")
    per_run: dict[tuple[str, float, str, int], list[float]] = {}
    for row in rows:
        key = (row.scheme, row.pi, _subset_of(row.group, row.degree, degree_threshold), row.run)
        acc = per_run.setdefault(key, [0.0, 0.0, 0.0, 0.0, 0])
        acc[0] += row.b
        acc[1] += row.l
        acc[2] += row.q
        acc[3] += row.p0
        acc[4] += 1
    collected: dict[tuple[str, float, str], list[float]] = {}
    for (scheme, pi, subset, _run), acc in sorted(per_run.items()):
        run_count = acc[4]
        out = collected.setdefault((scheme, pi, subset), [0.0, 0.0, 0.0, 0.0, 0, 0])
        for k in range(4):
            out[k] += acc[k] / run_count
        out[4] += run_count
        out[5] += 1
    stats = []
    for (scheme, pi, subset), out in sorted(
        collected.items(), key=lambda kv: (kv[0][0], kv[0][1], SUBSETS.index(kv[0][2]))
    ):
        n_runs = out[5]
        stats.append(StratumStats(
            scheme=scheme, pi=pi, subset=subset,
            mean_b=out[0] / n_runs, mean_l=out[1] / n_runs,
            mean_q=out[2] / n_runs, mean_p0=out[3] / n_runs,
            n_agents=out[4],
        ))
    return stats


def _mean_activities(rows: Sequence[ActivityRow]) -> dict[str, float]:
    n = len(rows)
    return {
        "items": sum(r.items for r in rows) / n,
        "views": sum(r.views for r in rows) / n,
        "comments": sum(r.comments for r in rows) / n,
        "metas": sum(r.metas for r in rows) / n,
    }


def pi_effectiveness(
    rows_at_pi: Sequence[ActivityRow],
    rows_at_zero: Sequence[ActivityRow],
    scheme: str,
    n_agents: int,
) -> EffectivenessRecord:
    """Per-activity gain over the no-reward baseline, per unit of average
    monetary reward paid per agent.

    Undefined (None) whenever nothing was paid: pi = 0, or a positive pi
    with no triggering events.
    """
    if not rows_at_pi or not rows_at_zero:
        raise ValueError("need records at the target reward level and at zero")
    pi = rows_at_pi[0].pi
    k_bar = sum(r.k_total / n_agents for r in rows_at_pi) / len(rows_at_pi)
    if pi == 0.0 or k_bar == 0.0:
        return EffectivenessRecord(scheme, pi, k_bar, None, None, None, None)
    at_pi = _mean_activities(rows_at_pi)
    at_zero = _mean_activities(rows_at_zero)
    e = {act: (at_pi[act] - at_zero[act]) / k_bar for act in at_pi}
    return EffectivenessRecord(scheme, pi, k_bar,
                               e["items"], e["views"], e["comments"], e["metas"])


def effectiveness_table(
    rows: Sequence[ActivityRow],
    n_agents: int,
) -> list[EffectivenessRecord]:
    """Effectiveness for every (scheme, pi > 0) cell against the pi = 0
    baseline, plus one baseline row with undefined values.

    Returns an empty list (no baseline to compare against) when the rows
    contain no pi = 0 cell.
    """
    zero_rows = [r for r in rows if r.pi == 0.0]
    if not zero_rows:
        return []
    cells: dict[tuple[str, float], list[ActivityRow]] = {}
    for r in rows:
        cells.setdefault((r.scheme, r.pi), []).append(r)
    table = [pi_effectiveness(zero_rows, zero_rows, zero_rows[0].scheme, n_agents)]
    for (scheme, pi) in sorted(cells):
        if pi == 0.0:
            continue
        table.append(pi_effectiveness(cells[(scheme, pi)], zero_rows, scheme, n_agents))
    return table


def correlation(degrees: Sequence[int], values: Sequence[float]) -> float:
    """Spearman rank correlation; nan when either input is constant."""
    import warnings

    from scipy.stats import ConstantInputWarning, spearmanr

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConstantInputWarning)
        rho = spearmanr(degrees, values).correlation
    return float(rho)


def _cell(value) -> str:
    if value is None:
        return ""
    return str(value)


def _write_rows(path: str | Path, header: list[str], rows: list[list]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows([[_cell(v) for v in row] for row in rows])


def write_agents_csv(rows: Sequence[AgentRow], path: str | Path) -> None:
    _write_rows(path, AGENTS_HEADER, [
        [r.run, r.scheme, r.pi, r.agent, r.degree, r.group, r.b, r.l, r.q, r.p0]
        for r in rows
    ])


def write_series_csv(records: Sequence[RunRecord], path: str | Path) -> None:
    out = []
    for rec in sorted(records, key=lambda r: (r.scheme, r.pi, r.run)):
        for stats in rec.series:
            for group in ("alpha", "beta"):
                means = stats.groups.get(group)
                if means is None:
                    continue
                out.append([rec.run, rec.scheme, rec.pi, stats.generation, group,
                            means.mean_b, means.mean_l, means.mean_q, means.mean_p0])
    _write_rows(path, SERIES_HEADER, out)


def write_activity_csv(rows: Sequence[ActivityRow], path: str | Path) -> None:
    _write_rows(path, ACTIVITY_HEADER, [
        [r.scheme, r.pi, r.run, r.items, r.views, r.comments, r.metas, r.k_total]
        for r in rows
    ])


def write_strata_csv(strata: Sequence[StratumStats], path: str | Path) -> None:
    _write_rows(path, STRATA_HEADER, [
        [s.scheme, s.pi, s.subset, s.mean_b, s.mean_l, s.mean_q, s.mean_p0, s.n_agents]
        for s in strata
    ])


def write_effectiveness_csv(records: Sequence[EffectivenessRecord], path: str | Path) -> None:
    _write_rows(path, EFFECTIVENESS_HEADER, [
        [r.scheme, r.pi, r.k_bar, r.e_item, r.e_view, r.e_comm, r.e_meta]
        for r in records
    ])


def write_all_csvs(records: Sequence[RunRecord], outdir: str | Path, n_agents: int,
                   degree_threshold: int) -> list[Path]:
    """Emit the five CSV files for a batch of records; returns the paths."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    a_rows = agent_rows(records)
    act_rows = activity_rows(records)
    paths = [
        outdir / "agents.csv",
        outdir / "series.csv",
        outdir / "strata.csv",
        outdir / "activity.csv",
        outdir / "effectiveness.csv",
    ]
    write_agents_csv(a_rows, paths[0])
    write_series_csv(records, paths[1])
    write_strata_csv(stratify(a_rows, degree_threshold), paths[2])
    write_activity_csv(act_rows, paths[3])
    write_effectiveness_csv(effectiveness_table(act_rows, n_agents), paths[4])
    return paths


def read_agents_csv(path: str | Path) -> list[AgentRow]:
    """Parse agents.csv back into rows; raises ValueError on schema drift."""
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != AGENTS_HEADER:
            raise ValueError(f"{path}: unexpected header {header}")
        rows = []
        for rec in reader:
            rows.append(AgentRow(
                run=int(rec[0]), scheme=rec[1], pi=float(rec[2]), agent=int(rec[3]),
                degree=int(rec[4]), group=rec[5],
                b=float(rec[6]), l=float(rec[7]), q=float(rec[8]), p0=float(rec[9]),
            ))
    return rows


def read_activity_csv(path: str | Path) -> list[ActivityRow]:
    """Parse activity.csv back into rows; raises ValueError on schema drift."""
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ACTIVITY_HEADER:
            raise ValueError(f"{path}: unexpected header {header}")
        rows = []
        for rec in reader:
            rows.append(ActivityRow(
                scheme=rec[0], pi=float(rec[1]), run=int(rec[2]),
                items=int(rec[3]), views=int(rec[4]), comments=int(rec[5]),
                metas=int(rec[6]), k_total=float(rec[7]),
            ))
    return rows
