# iotscheduler/scripts/compare_algorithms.py

from pathlib import Path

from tabulate import tabulate

from iotscheduler.controllers.CampaignController import CampaignController
from iotscheduler.controllers.logging_utils import get_logger, run_with_progress
from iotscheduler.core.CampaignConfig import RunManifest

log = get_logger("compare_algorithms", debug=False)


###########################################################################
#############  scenario, budgets and seeds for both experiments  ##########
###########################################################################
cfg = {
    "out_dir"            : "runs/compare",
    "scenario_seed"      : 7,
    "n_sats"             : 6,
    "days"               : 3.0,
    "riot_sats"          : 2,
    "seeds"              : list(range(10)),
    "eval_budget"        : 10_000,     # same evaluation budget for nsga3 and rs
    "wallclock_cap"      : 120.0,      # same wall-clock cap for nsga3 and aco, seconds
    "wallclock_seeds"    : [0, 1, 2],
    "run_wallclock"      : True,
}

# (algorithm, seed, OptimizationResult) of every run, in order
runs = []


def run_one(seed, ctrl, scenario_files, algo, overrides, out_root):
    """One optimizer run; returns (HV, front size) for the progress bar."""
    manifest = RunManifest(
        scenario_path=scenario_files[1],
        passes_path=scenario_files[0],
        algorithm=algo,
        overrides=overrides,
        seed=seed,
        output_dir=out_root / f"{algo}-seed{seed}",
    )
    result = ctrl.optimize(manifest, scenario=scenario_files[2])
    runs.append((algo, seed, result))
    return result.archive.hypervolume(), len(result.archive)


def main():
    out_root = Path(cfg["out_dir"])
    ctrl = CampaignController(debug=False)

    passes, scenario_json, table = ctrl.synth(out_root / "scenario", seed=cfg["scenario_seed"],
                                              n_sats=cfg["n_sats"], days=cfg["days"],
                                              riot_sats=cfg["riot_sats"])
    print(table)
    scenario = ctrl.load_scenario(scenario_json, passes)
    files = (passes, scenario_json, scenario)

    ###########################################################################
    ###############    nsga3 vs random search, equal evals   ###########
    ###########################################################################
    for algo in ("nsga3", "rs"):
        run_with_progress(cfg["seeds"], run_one, desc=algo, metrics=("HV", "Front"),
                          ctrl=ctrl, scenario_files=files, algo=algo,
                          overrides={"eval_budget": cfg["eval_budget"]},
                          out_root=out_root / "equal_evals")

    archives = sorted((out_root / "equal_evals").glob("*/archive.json"))
    report = ctrl.evaluate(archives, out_dir=out_root / "equal_evals" / "report")
    print(report["summary"])

    ###########################################################################
    ###############    nsga3 vs ant colony, equal wall clock   #########
    ###########################################################################
    if not cfg["run_wallclock"]:
        return
    start = len(runs)
    for algo in ("nsga3", "aco"):
        run_with_progress(cfg["wallclock_seeds"], run_one, desc=algo, metrics=("HV", "Front"),
                          ctrl=ctrl, scenario_files=files, algo=algo,
                          overrides={"wallclock_cap_seconds": cfg["wallclock_cap"],
                                     "eval_budget": 10_000_000},
                          out_root=out_root / "equal_wallclock")

    rows = [[algo, seed, r.evals, r.iterations, len(r.archive), r.feasible_found]
            for algo, seed, r in runs[start:]]
    print(tabulate(rows, headers=["Algorithm", "Seed", "Evals", "Iterations", "Front", "Feasible"],
                   tablefmt="github"))


if __name__ == "__main__":
    main()
