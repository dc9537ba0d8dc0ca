"""One round of the posting/commenting game with monetary reward schemes.

A *game* is a simultaneous round for every agent on a fixed network.  It has
three stages: posting an item, neighbours viewing (and possibly commenting
on) posted items, and the poster answering received comments with
meta-comments.  Psychological rewards and costs follow fixed ratios off a
reference cost; a scheme (S0..S3) optionally pays a flat monetary amount per
triggering event:

  S0  no monetary reward (amount treated as 0)
  S1  paid to the poster per item posted
  S2  paid to the poster per view its item receives
  S3  paid to the poster per meta-comment it writes

Monetary, cost, and psychological totals are derived from integer event
counters through single-rounding formulas (never accumulated float by
float), so the accounting identities hold exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from random import Random
from typing import Sequence

from .errors import ConfigurationError
from .network import Graph

#: Posting/commenting rates live on the 8-point lattice {0/7, ..., 7/7}.
RATE_LATTICE: tuple[float, ...] = tuple(k / 7 for k in range(8))
#: Item quality lives on {1/8, ..., 8/8}; it can never reach 0.
QUALITY_LATTICE: tuple[float, ...] = tuple((k + 1) / 8 for k in range(8))
Q_MIN: float = QUALITY_LATTICE[0]

GROUP_ALPHA = "alpha"  # prefers psychological reward (M < 0.5)
GROUP_BETA = "beta"    # prefers monetary reward (M >= 0.5)

SCHEMES = ("S0", "S1", "S2", "S3")


@dataclass(frozen=True)
class StrategyParams:
    """Behavioural strategy of one agent: posting rate b, comment/meta-comment
    rate l, and item quality q, all restricted to their lattices."""

    b: float
    l: float
    q: float

    def __post_init__(self) -> None:
        if self.b not in RATE_LATTICE:
            raise ValueError(f"posting rate {self.b} not on the k/7 lattice")
        if self.l not in RATE_LATTICE:
            raise ValueError(f"comment rate {self.l} not on the k/7 lattice")
        if self.q not in QUALITY_LATTICE:
            raise ValueError(f"quality {self.q} not on the k/8 lattice (min 1/8)")

    @property
    def quality_level(self) -> int:
        """Index 0..7 of q on the quality lattice."""
        return round(self.q * 8) - 1


@dataclass(frozen=True)
class AgentProfile:
    """Immutable per-agent monetary preference.

    m_pref weighs monetary against psychological reward in the utility;
    group is 'alpha' when m_pref < 0.5 and 'beta' otherwise.
    """

    id: int
    m_pref: float
    group: str

    def __post_init__(self) -> None:
        if not 0.0 <= self.m_pref <= 1.0:
            raise ValueError(f"monetary preference must lie in [0, 1], got {self.m_pref}")
        expected = GROUP_ALPHA if self.m_pref < 0.5 else GROUP_BETA
        if self.group != expected:
            raise ValueError(f"group {self.group!r} inconsistent with m_pref={self.m_pref}")


@dataclass(frozen=True)
class SchemeConfig:
    """Monetary reward scheme plus the per-event amount pi (>= 0).

    Under S0 the amount is forced to 0.
    """

    scheme: str
    pi: float = 0.0

    def __post_init__(self) -> None:
        if self.scheme not in SCHEMES:
            raise ConfigurationError(f"unknown scheme {self.scheme!r}; expected one of {SCHEMES}")
        if self.pi < 0:
            raise ConfigurationError(f"monetary reward must be >= 0, got {self.pi}")
        if self.scheme == "S0" and self.pi != 0.0:
            object.__setattr__(self, "pi", 0.0)


@dataclass(frozen=True)
class EconomyConfig:
    """Cost/reward structure of the game.

    c_ref scales all costs; mu converts a cost into its paired psychological
    reward; delta shrinks cost and reward by one stage (post -> comment ->
    meta-comment).  q_min is the lowest admissible quality.
    """

    c_ref: float = 1.0
    mu: float = 8.0
    delta: float = 0.5
    q_min: float = Q_MIN

    def __post_init__(self) -> None:
        if self.c_ref <= 0:
            raise ConfigurationError(f"cost reference must be > 0, got {self.c_ref}")
        if self.mu < 0:
            raise ConfigurationError(f"reward/cost ratio must be >= 0, got {self.mu}")
        if not 0.0 <= self.delta <= 1.0:
            raise ConfigurationError(f"stage reduction ratio must lie in [0, 1], got {self.delta}")
        if not 0.0 < self.q_min <= 1.0:
            raise ConfigurationError(f"minimum quality must lie in (0, 1], got {self.q_min}")


def post_probability(b: float, q: float, q_min: float = Q_MIN) -> float:
    """Effective posting probability b * q_min / q.

    Quality divides the posting rate: polishing an item costs opportunities
    to post.  Guaranteed in [0, 1] because q >= q_min.
    """
    if q < q_min:
        raise ValueError(f"quality {q} below the minimum {q_min}")
    return b * q_min / q


def view_probability(q_poster: float, s_j: int) -> float:
    """Probability that a viewer opens one given neighbouring item.

    s_j is the number of items the viewer's neighbours posted this round;
    defined as 0 when s_j == 0 (nothing to view, and no division by zero).
    """
    if s_j < 0:
        raise ValueError(f"posted-item count must be >= 0, got {s_j}")
    if s_j == 0:
        return 0.0
    return q_poster / s_j


def stage_costs(economy: EconomyConfig, q: float) -> tuple[float, float, float, float, float, float]:
    """Return (c0, r0, c1, r1, c2, r2) for an item of quality q.

    Posting cost c0 and viewing reward r0 scale with quality; comment and
    meta-comment costs/rewards do not.
    """
    c0 = economy.c_ref * q
    r0 = c0 * economy.mu
    c1 = economy.c_ref * economy.delta
    r1 = c1 * economy.mu
    c2 = c1 * economy.delta
    r2 = c2 * economy.mu
    return (c0, r0, c1, r1, c2, r2)


def utility(psych: float, money: float, cost: float, m_pref: float) -> float:
    """(1 - M) * psych + M * money - cost."""
    return (1.0 - m_pref) * psych + m_pref * money - cost


@dataclass
class GameTally:
    """Per-agent outcome of one game (or of several merged games).

    Integer event counters come first; ``psych``/``money``/``cost`` are
    derived from them by :func:`finalize_tally`:

      money[i] = pi * trigger[i]            (trigger counter per scheme)
      cost[i]  = c0(q_i)*posts[i] + c1*comments_made[i] + c2*metas_made[i]
      psych[i] = sum_k viewed_quality[i][k]*r0(level k)   (k ascending)
                 + r1*comments_received[i] + r2*metas_received[i]

    ``views`` counts views *received* by this agent's items; ``views_made``
    counts view events this agent performed.  ``viewed_quality[i][k]`` counts
    views agent i made of items with quality (k+1)/8.
    """

    posts: list[int]
    views: list[int]
    views_made: list[int]
    comments_made: list[int]
    comments_received: list[int]
    metas_made: list[int]
    metas_received: list[int]
    viewed_quality: list[list[int]]
    psych: list[float] = field(default_factory=list)
    money: list[float] = field(default_factory=list)
    cost: list[float] = field(default_factory=list)

    @classmethod
    def zeros(cls, n: int) -> "GameTally":
        return cls(
            posts=[0] * n,
            views=[0] * n,
            views_made=[0] * n,
            comments_made=[0] * n,
            comments_received=[0] * n,
            metas_made=[0] * n,
            metas_received=[0] * n,
            viewed_quality=[[0] * len(QUALITY_LATTICE) for _ in range(n)],
            psych=[0.0] * n,
            money=[0.0] * n,
            cost=[0.0] * n,
        )

    @property
    def n(self) -> int:
        return len(self.posts)

    def add_counts(self, other: "GameTally") -> None:
        """Accumulate another tally's integer counters into this one.

        Derived float fields are left untouched; call :func:`finalize_tally`
        afterwards.  Only valid while the agents' strategies are unchanged
        between the merged games.
        """
        for mine, theirs in (
            (self.posts, other.posts),
            (self.views, other.views),
            (self.views_made, other.views_made),
            (self.comments_made, other.comments_made),
            (self.comments_received, other.comments_received),
            (self.metas_made, other.metas_made),
            (self.metas_received, other.metas_received),
        ):
            for i, v in enumerate(theirs):
                mine[i] += v
        for i, row in enumerate(other.viewed_quality):
            target = self.viewed_quality[i]
            for k, v in enumerate(row):
                target[k] += v

    def trigger_counts(self, scheme: str) -> list[int]:
        """The event counter that pays out under the given scheme."""
        if scheme == "S1":
            return self.posts
        if scheme == "S2":
            return self.views
        if scheme == "S3":
            return self.metas_made
        return [0] * self.n


def finalize_tally(
    tally: GameTally,
    strategies: Sequence[StrategyParams],
    scheme: SchemeConfig,
    economy: EconomyConfig,
) -> None:
    """Fill psych/money/cost from the integer counters (see GameTally)."""
    c1 = economy.c_ref * economy.delta
    r1 = c1 * economy.mu
    c2 = c1 * economy.delta
    r2 = c2 * economy.mu
    r0_levels = [(economy.c_ref * q) * economy.mu for q in QUALITY_LATTICE]
    triggers = tally.trigger_counts(scheme.scheme)
    pi = scheme.pi
    for i in range(tally.n):
        r0_sum = 0.0
        for k, count in enumerate(tally.viewed_quality[i]):
            r0_sum += count * r0_levels[k]
        tally.psych[i] = r0_sum + r1 * tally.comments_received[i] + r2 * tally.metas_received[i]
        c0_i = economy.c_ref * strategies[i].q
        tally.cost[i] = c0_i * tally.posts[i] + c1 * tally.comments_made[i] + c2 * tally.metas_made[i]
        tally.money[i] = pi * triggers[i]


def make_profiles(
    n: int,
    n_alpha: int,
    mode: str = "half-uniform",
    rng: Random | None = None,
) -> list[AgentProfile]:
    """Assign monetary preferences so exactly ``n_alpha`` agents fall in the
    alpha group (M < 0.5) and the rest in beta (M >= 0.5).

    Group membership comes from a random permutation of the agent ids.
    mode 'half-uniform' draws M uniformly from [0, 0.5) for alpha and
    [0.5, 1) for beta (draws in ascending agent order after the shuffle);
    mode 'fixed' uses M = 0.25 / 0.75 with no extra draws.
    """
    if rng is None:
        rng = Random()
    if n_alpha > n or n_alpha < 0:
        raise ConfigurationError(f"alpha count {n_alpha} must lie in [0, {n}]")
    if mode not in ("half-uniform", "fixed"):
        raise ConfigurationError(f"unknown preference mode {mode!r}")
    order = list(range(n))
    rng.shuffle(order)
    is_alpha = [False] * n
    for agent in order[:n_alpha]:
        is_alpha[agent] = True
    profiles = []
    for i in range(n):
        if mode == "fixed":
            m = 0.25 if is_alpha[i] else 0.75
        elif is_alpha[i]:
            m = rng.random() * 0.5
        else:
            m = 0.5 + rng.random() * 0.5
        group = GROUP_ALPHA if is_alpha[i] else GROUP_BETA
        profiles.append(AgentProfile(id=i, m_pref=m, group=group))
    return profiles


def play_game(
    graph: Graph,
    profiles: Sequence[AgentProfile],
    strategies: Sequence[StrategyParams],
    scheme: SchemeConfig,
    economy: EconomyConfig,
    rng: Random,
    event_log: list | None = None,
) -> GameTally:
    """Play one game for all agents and return the filled tally.

    Stage 1 resolves every posting decision before any viewing: agent i
    posts with probability b_i * q_min / q_i and pays c0 = c_ref * q_i
    (plus pi under S1).  The per-viewer item supply s_j then counts this
    round's posts among j's neighbours.  Stage 2: viewer j opens poster i's
    item with probability q_i / s_j, earning the viewing reward r0(q_i);
    under S2 the poster earns pi per view.  A view becomes a comment with
    probability l_j * q_i (commenter pays c1, poster gains r1).  Stage 3:
    the poster answers each received comment with probability l_i * q_i,
    paying c2 (plus pi under S3); the commenter gains r2.

    Draw order (fixed, for reproducibility): stage 1 takes one uniform per
    agent in ascending id order, whatever the posting rate; stage 2/3 then
    iterate posters ascending, viewers ascending within a poster, drawing
    view -> comment -> meta-comment within a pair, each draw conditional on
    the previous event.

    ``event_log``, when given, receives ('post', i), ('view', i, j),
    ('comment', i, j) and ('meta', i, j) tuples (i = poster, j = viewer).
    """
    n = graph.n
    if len(strategies) != n or len(profiles) != n:
        raise ValueError(
            f"graph has {n} nodes but got {len(strategies)} strategies / {len(profiles)} profiles"
        )
    q_min = economy.q_min
    b_arr = [s.b for s in strategies]
    l_arr = [s.l for s in strategies]
    q_arr = [s.q for s in strategies]
    qlevel = [s.quality_level for s in strategies]
    p0 = [post_probability(b_arr[i], q_arr[i], q_min) for i in range(n)]

    tally = GameTally.zeros(n)
    rand = rng.random
    neighbors = graph.neighbors
    posts = tally.posts
    views = tally.views
    views_made = tally.views_made
    comments_made = tally.comments_made
    comments_received = tally.comments_received
    metas_made = tally.metas_made
    metas_received = tally.metas_received
    viewed_quality = tally.viewed_quality

    posted = [False] * n
    for i in range(n):
        if rand() < p0[i]:
            posted[i] = True
            posts[i] = 1
            if event_log is not None:
                event_log.append(("post", i))

    s = [0] * n  # items posted this round among each agent's neighbours
    for i in range(n):
        if posted[i]:
            for j in neighbors[i]:
                s[j] += 1

    for i in range(n):
        if not posted[i]:
            continue
        qi = q_arr[i]
        li_qi = l_arr[i] * qi
        ki = qlevel[i]
        for j in neighbors[i]:
            if rand() >= qi / s[j]:
                continue
            views[i] += 1
            views_made[j] += 1
            viewed_quality[j][ki] += 1
            if event_log is not None:
                event_log.append(("view", i, j))
            if rand() >= l_arr[j] * qi:
                continue
            comments_made[j] += 1
            comments_received[i] += 1
            if event_log is not None:
                event_log.append(("comment", i, j))
            if rand() >= li_qi:
                continue
            metas_made[i] += 1
            metas_received[j] += 1
            if event_log is not None:
                event_log.append(("meta", i, j))

    finalize_tally(tally, strategies, scheme, economy)
    return tally
