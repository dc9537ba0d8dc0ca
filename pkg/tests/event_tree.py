"""Independent oracle for single-game expectations.

Expected per-agent tally values are computed by brute force: enumerate every
posting pattern (2^n outcomes, fine for n <= 3 nodes), and within a pattern
use the closed-form conditional expectations of the view/comment/meta chain
(events are independent across pairs once the posts are fixed).  Nothing
here calls the simulator's game loop, so agreement between the two is a real
cross-check.
"""

from __future__ import annotations

import itertools
import math
from random import Random

from cgmsim import EconomyConfig, Graph, SchemeConfig, StrategyParams, play_game, stage_costs

FIELDS = (
    "posts",
    "views",
    "views_made",
    "comments_made",
    "comments_received",
    "metas_made",
    "metas_received",
    "psych",
    "money",
    "cost",
)


def expected_tally(
    graph: Graph,
    strategies: list[StrategyParams],
    scheme: SchemeConfig,
    economy: EconomyConfig,
) -> dict[str, list[float]]:
    """Exact expectations of every tally field for one game."""
    n = graph.n
    p0 = [s.b * economy.q_min / s.q for s in strategies]
    c1 = economy.c_ref * economy.delta
    r1 = c1 * economy.mu
    c2 = c1 * economy.delta
    r2 = c2 * economy.mu
    exp = {f: [0.0] * n for f in FIELDS}
    pi = scheme.pi

    for pattern in itertools.product((False, True), repeat=n):
        prob = 1.0
        for i in range(n):
            prob *= p0[i] if pattern[i] else (1.0 - p0[i])
        if prob == 0.0:
            continue
        s = [sum(1 for x in graph.neighbors[j] if pattern[x]) for j in range(n)]
        for i in range(n):
            if not pattern[i]:
                continue
            qi = strategies[i].q
            c0_i, r0_i, *_ = stage_costs(economy, qi)
            exp["posts"][i] += prob
            exp["cost"][i] += prob * c0_i
            if scheme.scheme == "S1":
                exp["money"][i] += prob * pi
            for j in graph.neighbors[i]:
                v = qi / s[j]
                c = v * (strategies[j].l * qi)
                mm = c * (strategies[i].l * qi)
                exp["views"][i] += prob * v
                exp["views_made"][j] += prob * v
                exp["comments_made"][j] += prob * c
                exp["comments_received"][i] += prob * c
                exp["metas_made"][i] += prob * mm
                exp["metas_received"][j] += prob * mm
                exp["psych"][j] += prob * (v * r0_i + mm * r2)
                exp["psych"][i] += prob * (c * r1)
                exp["cost"][j] += prob * (c * c1)
                exp["cost"][i] += prob * (mm * c2)
                if scheme.scheme == "S2":
                    exp["money"][i] += prob * (v * pi)
                elif scheme.scheme == "S3":
                    exp["money"][i] += prob * (mm * pi)
    return exp


def monte_carlo_tally(
    graph: Graph,
    profiles,
    strategies: list[StrategyParams],
    scheme: SchemeConfig,
    economy: EconomyConfig,
    n_games: int,
    seed: int,
) -> dict[str, list[tuple[float, float]]]:
    """Per-field per-agent (mean, standard error) over n_games games."""
    n = graph.n
    rng = Random(seed)
    sums = {f: [0.0] * n for f in FIELDS}
    sq = {f: [0.0] * n for f in FIELDS}
    for _ in range(n_games):
        tally = play_game(graph, profiles, strategies, scheme, economy, rng)
        for f in FIELDS:
            values = getattr(tally, f)
            for i in range(n):
                v = values[i]
                sums[f][i] += v
                sq[f][i] += v * v
    out = {}
    for f in FIELDS:
        stats = []
        for i in range(n):
            mean = sums[f][i] / n_games
            var = max(0.0, sq[f][i] / n_games - mean * mean)
            stats.append((mean, math.sqrt(var / n_games)))
        out[f] = stats
    return out


def oracle_mismatches(
    graph: Graph,
    profiles,
    strategies: list[StrategyParams],
    scheme: SchemeConfig,
    economy: EconomyConfig,
    n_games: int,
    seed: int,
) -> list[str]:
    """All (field, agent) cells where the Monte Carlo mean falls more than
    3 standard errors from the exact expectation."""
    expected = expected_tally(graph, strategies, scheme, economy)
    observed = monte_carlo_tally(graph, profiles, strategies, scheme, economy, n_games, seed)
    bad = []
    for f in FIELDS:
        for i in range(graph.n):
            mean, se = observed[f][i]
            diff = abs(mean - expected[f][i])
            if diff > 3.0 * se + 1e-9:
                bad.append(f"{f}[{i}]: mc={mean:.6g} exact={expected[f][i]:.6g} se={se:.3g}")
    return bad
