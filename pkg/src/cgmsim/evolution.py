"""Strategy encoding and co-evolution across replicated worlds.

Each agent's strategy is a 9-bit genome laid out as [B:3][L:3][Q:3] from the
most significant bit down; B and L decode to k/7 rates and Q to (k+1)/8
quality.  Evolution runs the same network in W parallel worlds: every agent
co-evolves against the W copies ("siblings") of itself at the same network
position, which lets strategies specialise by position.  The last world is a
test world rebuilt each generation from every agent's best-scoring sibling;
all reported outcomes come from it.  A conventional single-world GA that
inherits from graph neighbours is provided as a baseline.
"""

from __future__ import annotations

from dataclasses import dataclass
from random import Random
from typing import Sequence

from .errors import ConfigurationError
from .game import (
    AgentProfile,
    EconomyConfig,
    GameTally,
    SchemeConfig,
    StrategyParams,
    GROUP_ALPHA,
    GROUP_BETA,
    finalize_tally,
    play_game,
    post_probability,
    utility,
)
from .network import Graph

GENOME_BITS = 9
GENOME_COUNT = 1 << GENOME_BITS  # 512


def decode(genome: int) -> StrategyParams:
    """Map a 9-bit genome to its strategy (cached, bijective)."""
    if not 0 <= genome < GENOME_COUNT:
        raise ValueError(f"genome must lie in [0, {GENOME_COUNT}), got {genome}")
    return _DECODE_TABLE[genome]


def encode(params: StrategyParams) -> int:
    """Inverse of :func:`decode`; raises ValueError for off-lattice params."""
    b_bits = round(params.b * 7)
    l_bits = round(params.l * 7)
    q_bits = round(params.q * 8) - 1
    genome = (b_bits << 6) | (l_bits << 3) | q_bits
    if _DECODE_TABLE[genome] != params:
        raise ValueError(f"{params} is not on the strategy lattice")
    return genome


_DECODE_TABLE: tuple[StrategyParams, ...] = tuple(
    StrategyParams(b=((g >> 6) & 7) / 7, l=((g >> 3) & 7) / 7, q=((g & 7) + 1) / 8)
    for g in range(GENOME_COUNT)
)


def selection_probabilities(fitnesses: Sequence[float], epsilon: float) -> list[float]:
    """Analytic parent-selection distribution over the candidate siblings.

    Candidate k gets weight (U_k - U_min)^2 + epsilon/K over the K
    candidates; the epsilon share keeps the distribution defined when all
    candidates tie.
    """
    if not fitnesses:
        raise ValueError("candidate set must not be empty")
    if epsilon <= 0:
        raise ConfigurationError(f"selection smoothing must be > 0, got {epsilon}")
    u_min = min(fitnesses)
    share = epsilon / len(fitnesses)
    weights = [(u - u_min) ** 2 + share for u in fitnesses]
    total = sum(weights)
    return [w / total for w in weights]


def select_parent(fitnesses: Sequence[float], epsilon: float, rng: Random) -> int:
    """Roulette-wheel draw over squared fitness advantages; returns the
    index of the chosen candidate."""
    if not fitnesses:
        raise ValueError("candidate set must not be empty")
    if epsilon <= 0:
        raise ConfigurationError(f"selection smoothing must be > 0, got {epsilon}")
    u_min = min(fitnesses)
    share = epsilon / len(fitnesses)
    total = 0.0
    weights = []
    for u in fitnesses:
        w = (u - u_min) ** 2 + share
        weights.append(w)
        total += w
    r = rng.random() * total
    acc = 0.0
    for k, w in enumerate(weights):
        acc += w
        if r < acc:
            return k
    return len(weights) - 1  # float round-off fallback


def uniform_crossover(p1: int, p2: int, rng: Random) -> int:
    """Each locus copied from p1 or p2 with probability 0.5.

    One uniform per bit, drawn from bit 0 (least significant) upward.
    """
    child = 0
    for bit in range(GENOME_BITS):
        mask = 1 << bit
        source = p1 if rng.random() < 0.5 else p2
        child |= source & mask
    return child


def mutate(genome: int, m: float, rng: Random) -> int:
    """Flip each of the 9 bits independently with probability m.

    Always consumes 9 uniforms (bit 0 upward), whatever m.
    """
    if not 0.0 <= m <= 1.0:
        raise ConfigurationError(f"mutation probability must lie in [0, 1], got {m}")
    for bit in range(GENOME_BITS):
        if rng.random() < m:
            genome ^= 1 << bit
    return genome


@dataclass(frozen=True)
class EvolutionConfig:
    """Knobs of the evolutionary loop.

    w parallel worlds (>= 2, last one is the test world), n_gen games per
    generation, g generations per episode, per-bit mutation probability m,
    selection smoothing epsilon, and whether mutation also touches the test
    world.
    """

    w: int = 10
    n_gen: int = 4
    g: int = 1000
    m: float = 0.01
    epsilon: float = 1e-5
    mutate_test_world: bool = True

    def __post_init__(self) -> None:
        if self.w < 2:
            raise ConfigurationError(f"world count must be >= 2, got {self.w}")
        if self.n_gen < 1:
            raise ConfigurationError(f"games per generation must be >= 1, got {self.n_gen}")
        if self.g < 1:
            raise ConfigurationError(f"generation count must be >= 1, got {self.g}")
        if not 0.0 <= self.m <= 1.0:
            raise ConfigurationError(f"mutation probability must lie in [0, 1], got {self.m}")
        if self.epsilon <= 0:
            raise ConfigurationError(f"selection smoothing must be > 0, got {self.epsilon}")


@dataclass
class MultiWorldState:
    """W per-agent genome arrays over one shared graph, with per-world
    per-agent fitness accumulators (reset every generation)."""

    worlds: list[list[int]]
    fitness: list[list[float]]
    generation: int = 0

    @classmethod
    def random_init(cls, w: int, n: int, rng: Random) -> "MultiWorldState":
        """Uniform random genomes; draws world-major, agent ascending."""
        worlds = [[rng.randrange(GENOME_COUNT) for _ in range(n)] for _ in range(w)]
        return cls(worlds=worlds, fitness=[[0.0] * n for _ in range(w)], generation=0)

    @property
    def w(self) -> int:
        return len(self.worlds)

    @property
    def n(self) -> int:
        return len(self.worlds[0])


@dataclass(frozen=True)
class GroupMeans:
    mean_b: float
    mean_l: float
    mean_q: float
    mean_p0: float


@dataclass(frozen=True)
class GenerationStats:
    """Mean strategy parameters of the reporting world, split by preference
    group, for one generation (1-based)."""

    generation: int
    groups: dict[str, GroupMeans]


@dataclass
class EpisodeResult:
    """Outcome of one episode: the reporting world's final strategies (as
    played during the last generation), the per-generation mean series, and
    the last generation's merged activity tally."""

    final_genomes: list[int]
    final_strategies: list[StrategyParams]
    series: list[GenerationStats]
    final_tally: GameTally


def _group_means(
    strategies: Sequence[StrategyParams],
    profiles: Sequence[AgentProfile],
    economy: EconomyConfig,
) -> dict[str, GroupMeans]:
    sums: dict[str, list[float]] = {}
    counts: dict[str, int] = {}
    for params, prof in zip(strategies, profiles):
        acc = sums.setdefault(prof.group, [0.0, 0.0, 0.0, 0.0])
        acc[0] += params.b
        acc[1] += params.l
        acc[2] += params.q
        acc[3] += post_probability(params.b, params.q, economy.q_min)
        counts[prof.group] = counts.get(prof.group, 0) + 1
    out = {}
    for group in (GROUP_ALPHA, GROUP_BETA):
        if group in sums:
            c = counts[group]
            s = sums[group]
            out[group] = GroupMeans(s[0] / c, s[1] / c, s[2] / c, s[3] / c)
    return out


def _play_world_games(
    genomes: Sequence[int],
    graph: Graph,
    profiles: Sequence[AgentProfile],
    scheme: SchemeConfig,
    economy: EconomyConfig,
    n_gen: int,
    rng: Random,
    fitness: list[float],
    merged: GameTally | None,
) -> list[StrategyParams]:
    """Play n_gen games with one world's genomes, adding per-game utilities
    into ``fitness`` and, when asked, counters into ``merged``."""
    strategies = [decode(g) for g in genomes]
    m_prefs = [p.m_pref for p in profiles]
    for _ in range(n_gen):
        tally = play_game(graph, profiles, strategies, scheme, economy, rng)
        psych, money, cost = tally.psych, tally.money, tally.cost
        for i in range(len(fitness)):
            fitness[i] += utility(psych[i], money[i], cost[i], m_prefs[i])
        if merged is not None:
            merged.add_counts(tally)
    return strategies


def _mwga_play(
    state: MultiWorldState,
    graph: Graph,
    profiles: Sequence[AgentProfile],
    scheme: SchemeConfig,
    economy: EconomyConfig,
    config: EvolutionConfig,
    rng: Random,
    collect_test_tally: bool,
) -> tuple[list[StrategyParams], GameTally | None]:
    """Game phase of one generation: worlds play in index order, each world
    running its n_gen games back to back on the shared stream."""
    test_index = state.w - 1
    test_strategies: list[StrategyParams] = []
    merged = GameTally.zeros(state.n) if collect_test_tally else None
    for l in range(state.w):
        strategies = _play_world_games(
            state.worlds[l], graph, profiles, scheme, economy,
            config.n_gen, rng, state.fitness[l],
            merged if l == test_index else None,
        )
        if l == test_index:
            test_strategies = strategies
            if merged is not None:
                finalize_tally(merged, strategies, scheme, economy)
    return test_strategies, merged


def _mwga_select(
    state: MultiWorldState,
    config: EvolutionConfig,
    rng: Random,
) -> MultiWorldState:
    """Selection phase: worlds below the test world inherit from self plus
    one roulette-picked sibling (uniform crossover, then mutation); the test
    world takes each agent's best-scoring sibling genome verbatim (lowest
    world index on ties), mutated only when configured.  Replacement is
    synchronous.  Draws run world-major then agent-ascending."""
    w, n = state.w, state.n
    fitness = state.fitness
    worlds = state.worlds
    new_worlds = [[0] * n for _ in range(w)]
    for l in range(w - 1):
        row = new_worlds[l]
        own = worlds[l]
        for i in range(n):
            candidates = [fitness[k][i] for k in range(w) if k != l]
            pick = select_parent(candidates, config.epsilon, rng)
            k = pick if pick < l else pick + 1
            child = uniform_crossover(own[i], worlds[k][i], rng)
            row[i] = mutate(child, config.m, rng)
    elite_row = new_worlds[w - 1]
    for i in range(n):
        best_k = 0
        best_u = fitness[0][i]
        for k in range(1, w):
            if fitness[k][i] > best_u:
                best_u = fitness[k][i]
                best_k = k
        genome = worlds[best_k][i]
        if config.mutate_test_world:
            genome = mutate(genome, config.m, rng)
        elite_row[i] = genome
    return MultiWorldState(
        worlds=new_worlds,
        fitness=[[0.0] * n for _ in range(w)],
        generation=state.generation + 1,
    )


def step_generation(
    state: MultiWorldState,
    graph: Graph,
    profiles: Sequence[AgentProfile],
    scheme: SchemeConfig,
    economy: EconomyConfig,
    config: EvolutionConfig,
    rng: Random,
) -> MultiWorldState:
    """Advance one generation: every world plays n_gen games (utilities
    accumulate per agent), then selection builds the next populations and
    fitness resets."""
    if len(profiles) != state.n or graph.n != state.n:
        raise ValueError("state, graph, and profiles disagree on the agent count")
    _mwga_play(state, graph, profiles, scheme, economy, config, rng, collect_test_tally=False)
    return _mwga_select(state, config, rng)


def run_episode(
    graph: Graph,
    profiles: Sequence[AgentProfile],
    scheme: SchemeConfig,
    economy: EconomyConfig,
    config: EvolutionConfig,
    rng: Random,
    initial_worlds: list[list[int]] | None = None,
) -> EpisodeResult:
    """Run a whole episode of g generations and report the test world.

    Genomes start uniformly random over the 512-point lattice unless
    ``initial_worlds`` injects a starting population.  The reported final
    strategies are the ones the test world actually played during the last
    generation; its activity tally is summed over that generation's n_gen
    games.  Output is a pure function of (inputs, seed).
    """
    n = graph.n
    if initial_worlds is None:
        state = MultiWorldState.random_init(config.w, n, rng)
    else:
        if len(initial_worlds) != config.w or any(len(row) != n for row in initial_worlds):
            raise ValueError("initial worlds must be a w x n genome array")
        state = MultiWorldState(
            worlds=[list(row) for row in initial_worlds],
            fitness=[[0.0] * n for _ in range(config.w)],
        )
    series: list[GenerationStats] = []
    final_strategies: list[StrategyParams] = []
    final_genomes: list[int] = []
    final_tally: GameTally | None = None
    for t in range(1, config.g + 1):
        last = t == config.g
        test_genomes = list(state.worlds[-1])
        test_strategies, merged = _mwga_play(
            state, graph, profiles, scheme, economy, config, rng,
            collect_test_tally=last,
        )
        series.append(GenerationStats(t, _group_means(test_strategies, profiles, economy)))
        if last:
            final_strategies = test_strategies
            final_genomes = test_genomes
            final_tally = merged
        state = _mwga_select(state, config, rng)
    assert final_tally is not None
    return EpisodeResult(
        final_genomes=final_genomes,
        final_strategies=final_strategies,
        series=series,
        final_tally=final_tally,
    )


def run_episode_naive_ga(
    graph: Graph,
    profiles: Sequence[AgentProfile],
    scheme: SchemeConfig,
    economy: EconomyConfig,
    config: EvolutionConfig,
    rng: Random,
    initial_genomes: list[int] | None = None,
) -> EpisodeResult:
    """Single-population baseline: agent i's parents are itself and one
    graph neighbour picked by the same squared-advantage roulette (epsilon
    split over the neighbour count).  Agents without neighbours inherit from
    themselves alone.  Reports the single world; config.w is ignored."""
    n = graph.n
    if len(profiles) != n:
        raise ValueError("graph and profiles disagree on the agent count")
    if initial_genomes is None:
        population = [rng.randrange(GENOME_COUNT) for _ in range(n)]
    else:
        if len(initial_genomes) != n:
            raise ValueError("initial genomes must cover every agent")
        population = list(initial_genomes)
    series: list[GenerationStats] = []
    final_strategies: list[StrategyParams] = []
    final_genomes: list[int] = []
    final_tally: GameTally | None = None
    for t in range(1, config.g + 1):
        last = t == config.g
        fitness = [0.0] * n
        merged = GameTally.zeros(n) if last else None
        strategies = _play_world_games(
            population, graph, profiles, scheme, economy,
            config.n_gen, rng, fitness, merged,
        )
        series.append(GenerationStats(t, _group_means(strategies, profiles, economy)))
        if last:
            final_strategies = strategies
            final_genomes = list(population)
            final_tally = merged
            finalize_tally(final_tally, strategies, scheme, economy)
        next_population = [0] * n
        for i in range(n):
            nbrs = graph.neighbors[i]
            if nbrs:
                pick = select_parent([fitness[j] for j in nbrs], config.epsilon, rng)
                partner = population[nbrs[pick]]
            else:
                partner = population[i]
            child = uniform_crossover(population[i], partner, rng)
            next_population[i] = mutate(child, config.m, rng)
        population = next_population
    assert final_tally is not None
    return EpisodeResult(
        final_genomes=final_genomes,
        final_strategies=final_strategies,
        series=series,
        final_tally=final_tally,
    )
