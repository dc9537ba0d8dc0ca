"""Command-line front end: network generation, experiment cells, reward
sweeps, and report extraction from existing CSVs.

Exit codes: 0 success, 2 usage/configuration error, 3 missing or corrupt
input, 4 runtime failure.  All simulation randomness flows from the seed in
the config/flags; nothing reads the clock or OS entropy.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .errors import ConfigurationError
from .evolution import EvolutionConfig
from .experiments import (
    ExperimentPlan,
    PopulationConfig,
    effectiveness_table,
    read_activity_csv,
    read_agents_csv,
    run_plan,
    stratify,
    write_all_csvs,
    write_effectiveness_csv,
    write_strata_csv,
)
from .game import EconomyConfig
from .network import ConnConfig, generate_conn, save_edge_list

OUT_ENV_VAR = "CGMSIM_OUT"

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_MISSING_INPUT = 3
EXIT_RUNTIME = 4

# Defaults are sized for a workstation run; configs/ ships a full-scale file.
DEFAULTS: dict[str, object] = {
    "n_agents": 100,
    "n_alpha": 50,
    "u": 0.9,
    "c_ref": 1.0,
    "mu": 8.0,
    "delta": 0.5,
    "worlds": 10,
    "n_gen": 4,
    "generations": 300,
    "mutation": 0.01,
    "epsilon": 1e-5,
    "seed": 1,
    "runs": 10,
    "pi": [1.0],
    "schemes": ["S1", "S2", "S3"],
    "degree_threshold": 50,
    "preference_mode": "half-uniform",
    "evolver": "mwga",
    "mutate_test_world": True,
    "share_networks": True,
    "jobs": None,
    "out": None,
}

_BOOL_KEYS = {"mutate_test_world", "share_networks"}
_INT_KEYS = {"n_agents", "n_alpha", "worlds", "n_gen", "generations", "seed",
             "runs", "degree_threshold", "jobs"}
_FLOAT_KEYS = {"u", "c_ref", "mu", "delta", "mutation", "epsilon"}
_LIST_FLOAT_KEYS = {"pi"}
_LIST_STR_KEYS = {"schemes"}
_STR_KEYS = {"preference_mode", "evolver", "out"}


def _parse_bool(raw: str) -> bool:
    lowered = raw.strip().lower()
    if lowered in ("true", "yes", "1", "on"):
        return True
    if lowered in ("false", "no", "0", "off"):
        return False
    raise ConfigurationError(f"expected a boolean, got {raw!r}")


def parse_config_file(path: str | Path) -> dict[str, object]:
    """Read a flat `key = value` config file; unknown keys are rejected."""
    values: dict[str, object] = {}
    text = Path(path).read_text(encoding="utf-8")
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"{path}:{lineno}: expected 'key = value', got {raw_line!r}")
        key, raw = (part.strip() for part in line.split("=", 1))
        if key not in DEFAULTS:
            raise ConfigurationError(f"{path}:{lineno}: unknown config key {key!r}")
        try:
            if key in _BOOL_KEYS:
                values[key] = _parse_bool(raw)
            elif key in _INT_KEYS:
                values[key] = int(raw)
            elif key in _FLOAT_KEYS:
                values[key] = float(raw)
            elif key in _LIST_FLOAT_KEYS:
                values[key] = [float(tok) for tok in raw.replace(",", " ").split()]
            elif key in _LIST_STR_KEYS:
                values[key] = [tok for tok in raw.replace(",", " ").split()]
            else:
                values[key] = raw
        except ValueError as exc:
            raise ConfigurationError(f"{path}:{lineno}: bad value for {key!r}: {raw!r}") from exc
    return values


def _settings_from(args: argparse.Namespace) -> tuple[dict[str, object], dict[str, object]]:
    """Defaults, overlaid by the config file, overlaid by explicit flags.

    Returns (merged settings, the raw config-file values) so commands can
    tell a file-provided value from a default.  `pi` and `schemes` are
    merged from the file only; commands handle their flags themselves.
    """
    settings = dict(DEFAULTS)
    file_values: dict[str, object] = {}
    if getattr(args, "config", None):
        config_path = Path(args.config)
        if not config_path.exists():
            raise FileNotFoundError(f"config file not found: {config_path}")
        file_values = parse_config_file(config_path)
        settings.update(file_values)
    for key in DEFAULTS:
        if key in ("pi", "schemes"):
            continue
        flag = getattr(args, key, None)
        if flag is not None:
            settings[key] = flag
    return settings, file_values


def _resolve_out(settings: dict[str, object], required: bool = True) -> Path | None:
    out = settings.get("out") or os.environ.get(OUT_ENV_VAR)
    if out is None:
        if required:
            raise ConfigurationError(
                f"an output directory is required (--out or ${OUT_ENV_VAR})"
            )
        return None
    return Path(out)


def _build_plan(settings: dict[str, object], schemes: list[str],
                pi_values: list[float]) -> ExperimentPlan:
    return ExperimentPlan(
        schemes=tuple(schemes),
        pi_values=tuple(float(pi) for pi in pi_values),
        runs=int(settings["runs"]),
        base_seed=int(settings["seed"]),
        network=ConnConfig(n=int(settings["n_agents"]), u=float(settings["u"])),
        economy=EconomyConfig(
            c_ref=float(settings["c_ref"]),
            mu=float(settings["mu"]),
            delta=float(settings["delta"]),
        ),
        evolution=EvolutionConfig(
            w=int(settings["worlds"]),
            n_gen=int(settings["n_gen"]),
            g=int(settings["generations"]),
            m=float(settings["mutation"]),
            epsilon=float(settings["epsilon"]),
            mutate_test_world=bool(settings["mutate_test_world"]),
        ),
        population=PopulationConfig(
            n=int(settings["n_agents"]),
            n_alpha=int(settings["n_alpha"]),
            mode=str(settings["preference_mode"]),
        ),
        degree_threshold=int(settings["degree_threshold"]),
        evolver=str(settings["evolver"]),
        share_networks=bool(settings["share_networks"]),
    )


def cmd_gen_net(args: argparse.Namespace) -> int:
    config = ConnConfig(n=args.n, u=args.u, seed=args.seed)
    graph = generate_conn(config)
    save_edge_list(graph, args.out)
    print(f"nodes={graph.n} edges={graph.edge_count} -> {args.out}")
    return EXIT_OK


def cmd_run(args: argparse.Namespace) -> int:
    settings, _ = _settings_from(args)
    scheme = args.scheme
    pi = float(settings["pi"][0]) if args.pi is None else float(args.pi)
    if scheme == "S0" and pi != 0.0:
        print(f"warning: reward level {pi} is ignored under S0", file=sys.stderr)
        pi = 0.0
    outdir = _resolve_out(settings)
    plan = _build_plan(settings, schemes=[scheme], pi_values=[pi])
    records = run_plan(plan, jobs=settings["jobs"])
    paths = write_all_csvs(records, outdir, plan.population.n, plan.degree_threshold)
    print(f"wrote {len(records)} run(s) to {outdir} ({', '.join(p.name for p in paths)})")
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    settings, file_values = _settings_from(args)
    schemes = list(args.schemes) if args.schemes else list(settings["schemes"])
    if args.pi_grid is not None:
        pi_values = [float(tok) for tok in args.pi_grid.replace(",", " ").split()]
    elif "pi" in file_values:
        pi_values = [float(p) for p in file_values["pi"]]
    else:
        pi_values = [round(0.2 * k, 1) for k in range(51)]  # 0.0 .. 10.0
    outdir = _resolve_out(settings)
    plan = _build_plan(settings, schemes=schemes, pi_values=pi_values)
    records = run_plan(plan, jobs=settings["jobs"])
    write_all_csvs(records, outdir, plan.population.n, plan.degree_threshold)
    print(f"swept {len(records)} cells into {outdir}")
    return EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    indir = Path(args.indir)
    agents_path = indir / "agents.csv"
    activity_path = indir / "activity.csv"
    if not agents_path.exists() or not activity_path.exists():
        raise FileNotFoundError(f"{indir} does not contain agents.csv and activity.csv")
    a_rows = read_agents_csv(agents_path)
    act_rows = read_activity_csv(activity_path)
    if not a_rows:
        raise ValueError(f"{agents_path} holds no data rows")
    n_agents = max(r.agent for r in a_rows) + 1
    strata = stratify(a_rows, args.degree_threshold)
    table = effectiveness_table(act_rows, n_agents)
    outdir = Path(args.out) if args.out else indir
    outdir.mkdir(parents=True, exist_ok=True)
    write_strata_csv(strata, outdir / "strata.csv")
    write_effectiveness_csv(table, outdir / "effectiveness.csv")
    print(f"wrote strata.csv and effectiveness.csv to {outdir}")
    return EXIT_OK


def _add_common_plan_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="flat key = value config file")
    parser.add_argument("--seed", type=int, help="base seed for all randomness")
    parser.add_argument("--runs", type=int, help="independent runs per cell")
    parser.add_argument("--n-agents", dest="n_agents", type=int, help="population size")
    parser.add_argument("--n-alpha", dest="n_alpha", type=int,
                        help="agents preferring psychological reward")
    parser.add_argument("--u", type=float, help="edge-conversion probability")
    parser.add_argument("--worlds", type=int, help="parallel worlds")
    parser.add_argument("--n-gen", dest="n_gen", type=int, help="games per generation")
    parser.add_argument("--generations", type=int, help="generations per episode")
    parser.add_argument("--mutation", type=float, help="per-bit mutation probability")
    parser.add_argument("--evolver", choices=["mwga", "naive-ga"], help="evolution algorithm")
    parser.add_argument("--degree-threshold", dest="degree_threshold", type=int,
                        help="degree split for strata")
    parser.add_argument("--jobs", type=int, help="worker processes (default: all cores)")
    parser.add_argument("--out", help=f"output directory (or ${OUT_ENV_VAR})")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cgmsim",
        description="Simulate posting/commenting dynamics on a user-generated-media "
                    "network under monetary reward schemes.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_net = sub.add_parser("gen-net", help="generate a network and save its edge list")
    p_net.add_argument("--n", type=int, required=True, help="node count (>= 2)")
    p_net.add_argument("--u", type=float, default=0.9, help="edge-conversion probability")
    p_net.add_argument("--seed", type=int, default=0)
    p_net.add_argument("--out", required=True, help="edge-list output path")
    p_net.set_defaults(func=cmd_gen_net)

    p_run = sub.add_parser("run", help="run one (scheme, reward) cell and emit CSVs")
    p_run.add_argument("--scheme", required=True, choices=["S0", "S1", "S2", "S3"])
    p_run.add_argument("--pi", type=float, help="monetary reward per triggering event")
    _add_common_plan_flags(p_run)
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", help="run a reward-level grid over several schemes")
    p_sweep.add_argument("--pi-grid", dest="pi_grid",
                         help="space/comma separated reward levels (default 0..10 step 0.2)")
    p_sweep.add_argument("--schemes", nargs="+", choices=["S0", "S1", "S2", "S3"],
                         help="schemes to sweep")
    _add_common_plan_flags(p_sweep)
    p_sweep.set_defaults(func=cmd_sweep)

    p_rep = sub.add_parser("report", help="recompute strata/effectiveness from raw CSVs")
    p_rep.add_argument("--in", dest="indir", required=True, help="directory with raw CSVs")
    p_rep.add_argument("--out", help="output directory (default: same as --in)")
    p_rep.add_argument("--degree-threshold", dest="degree_threshold", type=int, default=50)
    p_rep.set_defaults(func=cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISSING_INPUT
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISSING_INPUT
    except Exception as exc:  # pragma: no cover - defensive
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
