"""Agent-based simulator of posting/commenting dynamics on user-generated
media, with monetary reward schemes and position-dependent strategies evolved
by a multi-world genetic algorithm."""

from .errors import ConfigurationError
from .evolution import (
    EpisodeResult,
    EvolutionConfig,
    GenerationStats,
    GroupMeans,
    MultiWorldState,
    decode,
    encode,
    mutate,
    run_episode,
    run_episode_naive_ga,
    select_parent,
    selection_probabilities,
    step_generation,
    uniform_crossover,
)
from .experiments import (
    ActivityRow,
    AgentRow,
    EffectivenessRecord,
    ExperimentPlan,
    PopulationConfig,
    RunRecord,
    StratumStats,
    activity_totals,
    correlation,
    derive_seed,
    effectiveness_table,
    pi_effectiveness,
    plan_cells,
    run_cell,
    run_plan,
    stratify,
    write_all_csvs,
)
from .game import (
    AgentProfile,
    EconomyConfig,
    GameTally,
    Q_MIN,
    QUALITY_LATTICE,
    RATE_LATTICE,
    SchemeConfig,
    StrategyParams,
    finalize_tally,
    make_profiles,
    play_game,
    post_probability,
    stage_costs,
    utility,
    view_probability,
)
from .network import ConnConfig, Graph, degree, generate_conn, is_connected, load_edge_list, save_edge_list

__version__ = "0.1.0"
