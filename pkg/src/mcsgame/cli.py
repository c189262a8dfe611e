"""Command line entry point: ``mcsgame {generate,solve,experiment,fixture}``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .adts import AdtsConfig, run_adts
from .baselines import greedy_distributed
from .central import exact_cta, greedy_centralized
from .experiment import SCHEMES, ExperimentError, ExperimentSpec, run_experiment
from .io import load_scenario, save_scenario, scenario_to_dict
from .metrics import evaluate
from .routing import RoutePlanner, SplitGraph
from .scenarios import GenConfig, generate, real_world_fixture


def _gen_args(p: argparse.ArgumentParser) -> None:
    d = GenConfig()
    p.add_argument("--users", "-I", type=int, default=d.I)
    p.add_argument("--tasks", "-K", type=int, default=d.K)
    p.add_argument("--horizon", "-T", type=int, default=d.T)
    p.add_argument("--c-move", type=float, default=d.c_move)
    p.add_argument("--speed", type=float, default=d.speed)
    p.add_argument("--slot-minutes", type=float, default=d.slot_minutes)
    p.add_argument("--region", type=float, default=d.region)
    p.add_argument("--rewards", type=float, nargs="+", default=list(d.reward_levels))
    p.add_argument("--reputation-levels", type=int, default=d.reputation_levels)


def _gen_config(args, seed: int) -> GenConfig:
    return GenConfig(
        I=args.users,
        K=args.tasks,
        T=args.horizon,
        c_move=args.c_move,
        speed=args.speed,
        slot_minutes=args.slot_minutes,
        region=args.region,
        reward_levels=tuple(int(r) if float(r).is_integer() else r for r in args.rewards),
        reputation_levels=args.reputation_levels,
        seed=seed,
    )


def cmd_generate(args) -> int:
    scenario = generate(_gen_config(args, args.seed))
    save_scenario(scenario, args.output)
    print(f"wrote {args.output}: I={scenario.num_users} K={scenario.num_tasks} T={scenario.horizon}")
    return 0


def cmd_fixture(args) -> int:
    doc = scenario_to_dict(real_world_fixture())
    text = json.dumps(doc, indent=2) + "\n"
    if args.output == "-":
        sys.stdout.write(text)
    else:
        Path(args.output).write_text(text)
        print(f"wrote {args.output}")
    return 0


def cmd_solve(args) -> int:
    scenario = real_world_fixture() if args.scenario == "fixture" else load_scenario(args.scenario)
    schemes = list(SCHEMES) if args.scheme == "all" else [args.scheme]
    reports = []
    for scheme in schemes:
        if scheme == "adts":
            trace = run_adts(scenario, AdtsConfig(tau_max=args.tau_max, update_order=args.order, seed=args.seed))
            reports.append(evaluate(scenario, trace.profile, scheme, args.seed, trace.iterations_to_converge))
            if args.trace:
                Path(args.trace).write_text(trace.to_lines())
        elif scheme == "gc":
            alloc = greedy_centralized(scenario)
            reports.append(evaluate(scenario, alloc, scheme))
            if args.allocation:
                Path(args.allocation).write_text(alloc.to_rows())
        elif scheme == "gd":
            reports.append(evaluate(scenario, greedy_distributed(scenario), scheme))
        elif scheme == "cta":
            alloc, _ = exact_cta(scenario, args.cta_mode)
            reports.append(evaluate(scenario, alloc, scheme))
    if args.dot is not None:
        user, *_ = args.dot
        graph = RoutePlanner(scenario).skeleton(user).with_shares({})
        Path(f"split_user{user}.dot").write_text(SplitGraph.from_route_graph(graph).to_dot())
    if args.json:
        print(json.dumps([r.as_dict() for r in reports], indent=2))
        return 0
    print(f"{'scheme':<6} {'avg_payoff':>10} {'jain':>6} {'coverage':>9} {'rew/meas':>9} {'surplus':>8}  routes")
    for r in reports:
        rpm = f"{r.reward_per_measurement:9.3f}" if r.reward_per_measurement is not None else f"{'-':>9}"
        print(
            f"{r.scheme:<6} {r.avg_payoff:10.2f} {r.jain:6.3f} {r.coverage:9.2%} {rpm} {r.surplus:8.2f}  "
            + " | ".join(r.routes)
        )
    return 0


def cmd_experiment(args) -> int:
    doc = json.loads(Path(args.spec).read_text()) if args.spec else {}
    overrides = {
        "sweep_var": args.sweep,
        "values": args.values,
        "replications": args.replications,
        "schemes": args.schemes,
        "output": args.output,
        "adts_order": args.order,
        "workers": args.workers,
    }
    doc.update({k: v for k, v in overrides.items() if v is not None})
    doc["master_seed"] = args.seed
    if args.no_plots:
        doc["plots"] = False
    base = dict(doc.get("base", {}))
    for key in ("K", "T", "c_move", "speed"):
        val = getattr(args, f"base_{key}")
        if val is not None:
            base[key] = val
    doc["base"] = base
    try:
        spec = ExperimentSpec.from_dict(doc)
        out = run_experiment(spec)
    except (ExperimentError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mcsgame", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a random scenario file")
    _gen_args(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", "-o", default="scenario.json")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("fixture", help="emit the bundled real-world scenario")
    p.add_argument("--output", "-o", default="-")
    p.set_defaults(func=cmd_fixture)

    p = sub.add_parser("solve", help="run one scheme (or all) on a scenario")
    p.add_argument("scenario", help="scenario JSON file, or 'fixture'")
    p.add_argument("--scheme", choices=SCHEMES + ("all",), default="all")
    p.add_argument("--order", choices=("round_robin", "random"), default="round_robin")
    p.add_argument("--tau-max", type=int, default=50)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--cta-mode", choices=("pruned", "unrestricted"), default="pruned")
    p.add_argument("--trace", help="write the ADTS iteration trace here")
    p.add_argument("--allocation", help="write the GC allocation rows here")
    p.add_argument("--dot", type=int, nargs=1, metavar="USER", help="dump USER's split graph as DOT")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("experiment", help="run a replicated sweep")
    p.add_argument("spec", nargs="?", help="JSON sweep spec; flags override its fields")
    p.add_argument("--seed", type=int, required=True, help="master seed")
    p.add_argument("--sweep", choices=("I", "c_move", "speed", "K"))
    p.add_argument("--values", type=float, nargs="+")
    p.add_argument("--replications", type=int)
    p.add_argument("--schemes", nargs="+", choices=SCHEMES)
    p.add_argument("--output", "-o")
    p.add_argument("--order", choices=("round_robin", "random"))
    p.add_argument("--workers", type=int)
    p.add_argument("--no-plots", action="store_true")
    p.add_argument("--K", dest="base_K", type=int)
    p.add_argument("--T", dest="base_T", type=int)
    p.add_argument("--c-move", dest="base_c_move", type=float)
    p.add_argument("--speed", dest="base_speed", type=float)
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
