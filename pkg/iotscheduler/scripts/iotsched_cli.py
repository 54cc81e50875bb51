# iotscheduler/scripts/iotsched_cli.py
"""
iotsched: command-line entry point.

    iotsched synth      --seed 7 --sats 6 --days 3 --out runs/scn
    iotsched candidates --scenario runs/scn/scenario.json --passes runs/scn/passes.csv
    iotsched optimize   --scenario ... --passes ... --algo nsga3 --seed 1 --evals 10000
    iotsched evaluate   runs/nsga3-*/archive.json runs/rs-*/archive.json --out runs/report
    iotsched export     runs/nsga3-seed1/archive.json --out runs/gantt

Exit codes: 0 success (optimize: a feasible schedule was found),
2 optimize found no feasible schedule, 3 invalid input or infeasible
scenario, 4 internal error.
"""

import argparse
import os
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

from pydantic import ValidationError

from iotscheduler.analyzers.QualityIndicators import DEFAULT_HV_REF
from iotscheduler.controllers.CampaignController import OPTIMIZERS, CampaignController
from iotscheduler.controllers.logging_utils import get_logger
from iotscheduler.core.CampaignConfig import RunManifest, SynthParams
from iotscheduler.core.Exceptions import SchedulingError

OUTPUT_DIR_ENV = "IOTSCHED_OUTPUT_DIR"

EXIT_OK = 0
EXIT_NO_FEASIBLE = 2
EXIT_INVALID = 3
EXIT_INTERNAL = 4

# optimizer flags: (flag, config field, type); flags mirror the config field names
CONFIG_FLAGS = [
    ("--population-size", "population_size", int),
    ("--reference-point-count", "reference_point_count", int),
    ("--reference-point-method", "reference_point_method", str),
    ("--crossover-prob", "crossover_prob", float),
    ("--mutation-prob", "mutation_prob", float),
    ("--p-nc-min", "p_nc_min", float),
    ("--p-nc-max", "p_nc_max", float),
    ("--eval-budget", "eval_budget", int),
    ("--wallclock-cap-seconds", "wallclock_cap_seconds", float),
    ("--workers", "workers", int),
    ("--log-every", "log_every", int),
    ("--ants", "ants", int),
    ("--alpha", "alpha", float),
    ("--beta", "beta", float),
    ("--rho", "rho", float),
    ("--deposit", "deposit", float),
    ("--tau-min", "tau_min", float),
    ("--tau-max", "tau_max", float),
    ("--heuristic-floor", "heuristic_floor", float),
]
SHORT_ALIASES = {"eval_budget": "--evals", "wallclock_cap_seconds": "--wallclock"}

log = get_logger("iotsched")


class CliParser(argparse.ArgumentParser):
    """Usage errors are invalid input: exit 3 instead of argparse's 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _default_out(args, sub: Optional[str] = None) -> Path:
    if args.out is not None:
        return Path(args.out)
    env = os.environ.get(OUTPUT_DIR_ENV)
    if not env:
        args.parser.error(f"--out is required (or set {OUTPUT_DIR_ENV})")
    return Path(env) / sub if sub else Path(env)


# -------------------------------------------------------------------------
# Subcommands
# -------------------------------------------------------------------------

def cmd_synth(ctrl: CampaignController, args) -> int:
    out = _default_out(args)
    params = {"site_id": args.site}
    if args.riot_fraction is not None:
        params["riot_fraction"] = args.riot_fraction
    passes, scenario, table = ctrl.synth(
        out, seed=args.seed, n_sats=args.sats, days=args.days, riot_sats=args.riot_sats,
        params=SynthParams(**params), fmt=args.format,
        config_time_minutes=args.config_minutes,
    )
    print(table)
    print(f"\npasses:   {passes}\nscenario: {scenario}")
    return EXIT_OK


def cmd_candidates(ctrl: CampaignController, args) -> int:
    out = args.out
    if out is None and os.environ.get(OUTPUT_DIR_ENV):
        out = Path(os.environ[OUTPUT_DIR_ENV]) / "candidates"
    scenario = ctrl.load_scenario(args.scenario, args.passes)
    print(ctrl.candidates(scenario, out))
    return EXIT_OK


def config_overrides(args) -> Dict[str, Any]:
    """Flags actually given on the command line, checked against the chosen optimizer."""
    model = OPTIMIZERS[args.algo].ConfigModel
    raw = {}
    for _, field, _ in CONFIG_FLAGS:
        value = getattr(args, field)
        if value is None:
            continue
        if field not in model.model_fields:
            args.parser.error(f"--{field.replace('_', '-')} does not apply to --algo {args.algo}")
        raw[field] = value
    return raw


def cmd_optimize(ctrl: CampaignController, args) -> int:
    if args.manifest is not None:
        manifest = RunManifest.model_validate_json(Path(args.manifest).read_text(encoding="utf-8"))
        if args.out is not None:
            manifest = manifest.model_copy(update={"output_dir": Path(args.out)})
    else:
        if args.scenario is None or args.passes is None:
            args.parser.error("--scenario and --passes are required without --manifest")
        manifest = RunManifest(
            scenario_path=args.scenario,
            passes_path=args.passes,
            algorithm=args.algo,
            overrides=config_overrides(args),
            seed=args.seed,
            output_dir=_default_out(args, f"{args.algo}-seed{args.seed}"),
        )
    result = ctrl.optimize(manifest)
    print(f"{result.algorithm}: {result.evals} evaluations, {result.iterations} iterations, "
          f"stop={result.stop_reason}, archive={len(result.archive)}, "
          f"feasible={result.feasible_found} → {manifest.output_dir}")
    return EXIT_OK if result.feasible_found else EXIT_NO_FEASIBLE


def cmd_evaluate(ctrl: CampaignController, args) -> int:
    out = args.out if args.out is not None else os.environ.get(OUTPUT_DIR_ENV)
    report = ctrl.evaluate(args.archives, out_dir=out, labels=args.labels or None,
                           hv_ref=tuple(args.hv_ref))
    print(report["summary"])
    for notice in report["notices"]:
        print(f"notice: {notice}")
    return EXIT_OK


def cmd_export(ctrl: CampaignController, args) -> int:
    written = ctrl.export(args.archive, _default_out(args), prefix=args.prefix)
    print(f"wrote {len(written)} files")
    return EXIT_OK


# -------------------------------------------------------------------------
# Parser
# -------------------------------------------------------------------------

def build_parser() -> CliParser:
    parser = CliParser(prog="iotsched", description="IOT campaign scheduling engine")
    parser.add_argument("--debug", action="store_true", help="debug logging")
    parser.add_argument("--quiet", action="store_true", help="suppress all logs")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("synth", help="write a seeded synthetic pass file and campaign")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sats", type=int, default=6)
    p.add_argument("--days", type=float, default=3.0)
    p.add_argument("--riot-sats", type=int, default=None,
                   help="satellites needing RIOT (default: riot fraction of --sats)")
    p.add_argument("--riot-fraction", type=float, default=None)
    p.add_argument("--site", default="GS01")
    p.add_argument("--config-minutes", type=int, default=15)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_synth, parser=p)

    p = subs.add_parser("candidates", help="dump candidates and conflict-graph stats")
    p.add_argument("--scenario", required=True)
    p.add_argument("--passes", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_candidates, parser=p)

    p = subs.add_parser("optimize", help="run nsga3, rs or aco on a scenario")
    p.add_argument("--scenario", default=None)
    p.add_argument("--passes", default=None)
    p.add_argument("--manifest", default=None, help="replay a recorded manifest.json")
    p.add_argument("--algo", choices=sorted(OPTIMIZERS), default="nsga3")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    for flag, field, kind in CONFIG_FLAGS:
        names = [flag] + ([SHORT_ALIASES[field]] if field in SHORT_ALIASES else [])
        p.add_argument(*names, dest=field, type=kind, default=None)
    p.set_defaults(func=cmd_optimize, parser=p)

    p = subs.add_parser("evaluate", help="compare archives: GD/SP/HV, U-test, A12")
    p.add_argument("archives", nargs="+")
    p.add_argument("--labels", nargs="*", default=None)
    p.add_argument("--hv-ref", nargs=3, type=float, default=list(DEFAULT_HV_REF),
                   metavar=("F1", "F2", "F3"), help="HV reference point (minimized space)")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_evaluate, parser=p)

    p = subs.add_parser("export", help="archive → Gantt CSV / slot JSON")
    p.add_argument("archive")
    p.add_argument("--prefix", default="slots")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_export, parser=p)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    ctrl = CampaignController(debug=args.debug, suppress_logs=args.quiet)
    try:
        return args.func(ctrl, args)
    except (ValidationError, SchedulingError, OSError) as e:
        log.error(f"{args.command}: {e}")
        print(f"iotsched {args.command}: error: {e}", file=sys.stderr)
        return EXIT_INVALID
    except Exception as e:
        log.exception(f"{args.command}: internal error: {e}")
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
