"""Desk-scale evolution experiment: several seeds per problem, printing
solve counts, run times and the best-total-error curve of every run.

    python3 scripts/desk_scale.py                       # the four default problems
    python3 scripts/desk_scale.py --problems median --seeds 10 --pop 500
    python3 scripts/desk_scale.py --json results.json
"""

import argparse
import json
import time

from cbgp.bench import get_problem
from cbgp.evolve import RunConfig, run_evolution

DEFAULT_PROBLEMS = ["days-between", "filter-bounds", "smallest", "median"]


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--problems", nargs="+", default=DEFAULT_PROBLEMS)
    ap.add_argument("--seeds", type=int, default=5)
    ap.add_argument("--pop", type=int, default=300)
    ap.add_argument("--gens", type=int, default=100)
    ap.add_argument("--json", help="write all run summaries to this file")
    args = ap.parse_args()

    summary = []
    for name in args.problems:
        solved = 0
        for seed in range(args.seeds):
            t0 = time.perf_counter()
            rep = run_evolution(get_problem(name), RunConfig(population_size=args.pop,
                                                             max_generations=args.gens, seed=seed))
            dt = time.perf_counter() - t0
            solved += rep.solution
            curve = [g["best_total_error"] for g in rep.generations]
            print(f"{name} seed={seed} solution={rep.solution} gen={rep.success_generation} {dt:.1f}s")
            if not rep.solution:
                print("  curve:", " ".join(f"{e:.4g}" for e in curve))
            summary.append({"problem": name, "seed": seed, "solution": rep.solution,
                            "success_generation": rep.success_generation, "seconds": dt,
                            "best_total_error_curve": curve, "source": rep.source})
        print(f"== {name}: {solved}/{args.seeds} solved")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(summary, fh, indent=2)


if __name__ == "__main__":
    main()
