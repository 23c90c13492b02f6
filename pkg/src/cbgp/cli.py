"""Command-line entry point: run, bench, compile, cases, manifest."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from cbgp.bench.problems import all_problems, cases_to_jsonl, get_problem
from cbgp.codegen import emit
from cbgp.dagir import dump
from cbgp.evolve import ConfigError, RunConfig, run_evolution
from cbgp.library import standard_registry
from cbgp.pushc import CompileFailure, GenomeFormatError, compile, genome_from_text, plushy_to_push

WORKERS_ENV = "CBGP_WORKERS"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _problem(name: str):
    try:
        return get_problem(name)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None


def _config(args, seed: int) -> RunConfig:
    overrides = {"seed": seed}
    if args.pop is not None:
        overrides["population_size"] = args.pop
    if args.gens is not None:
        overrides["max_generations"] = args.gens
    if args.umad_rate is not None:
        overrides["umad_rate"] = args.umad_rate
    if args.train is not None:
        overrides["training_cases"] = args.train
    if args.test is not None:
        overrides["test_cases"] = args.test
    if args.simplify_steps is not None:
        overrides["simplification_steps"] = args.simplify_steps
    try:
        return RunConfig(**overrides).check()
    except ConfigError as exc:
        raise UsageError(str(exc)) from None


def _write_run(report, out: Path) -> None:
    stem = f"{report.problem}_{report.seed}"
    (out / f"{stem}.json").write_text(report.to_json())
    (out / f"{stem}.timing.json").write_text(json.dumps(report.timings, indent=2, sort_keys=True) + "\n")
    if report.source is not None:
        (out / f"{stem}.src").write_text(report.source)


def _one_run(problem_name: str, cfg: RunConfig, out: str):
    report = run_evolution(get_problem(problem_name), cfg)
    _write_run(report, Path(out))
    return {
        "seed": report.seed,
        "solution": report.solution,
        "success_generation": report.success_generation,
        "best_total_error": report.best_total_error,
        "test_total_error": report.test_total_error,
        "simplified_length": len(report.simplified_genome),
        "best_length": len(report.best_genome),
    }


def cmd_run(args) -> int:
    prob = _problem(args.problem)
    cfg = _config(args, args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    entry = _one_run(prob.name, cfg, str(out))
    print(f"{prob.name} seed={cfg.seed} solution={entry['solution']}")
    return 0 if entry["solution"] else 2


def cmd_bench(args) -> int:
    prob = _problem(args.problem)
    if args.runs < 1:
        raise UsageError("--runs must be >= 1")
    workers = args.workers or int(os.environ.get(WORKERS_ENV, "1"))
    if workers < 1:
        raise UsageError("worker count must be >= 1")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    seeds = [args.seed_base + k for k in range(args.runs)]
    cfgs = [_config(args, s) for s in seeds]
    if workers == 1:
        entries = [_one_run(prob.name, c, str(out)) for c in cfgs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            entries = list(pool.map(_one_run, [prob.name] * len(cfgs), cfgs, [str(out)] * len(cfgs)))
    entries.sort(key=lambda e: e["seed"])
    solutions = sum(e["solution"] for e in entries)
    aggregate = {
        "problem": prob.name,
        "runs": args.runs,
        "seed_base": args.seed_base,
        "config": {k: v for k, v in cfgs[0].to_dict().items() if k != "seed"},
        "entries": entries,
        "solutions": solutions,
        "rate": solutions / args.runs,
    }
    (out / "aggregate.json").write_text(json.dumps(aggregate, indent=2, sort_keys=True) + "\n")
    print(f"{prob.name}: {solutions}/{args.runs} solved")
    return 0


def cmd_compile(args) -> int:
    prob = _problem(args.problem)
    registry = standard_registry()
    try:
        text = Path(args.genome).read_text()
    except OSError as exc:
        print(f"cannot read genome: {exc}", file=sys.stderr)
        return 1
    try:
        genome = genome_from_text(text, registry, prob.input_types)
    except GenomeFormatError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    try:
        dag = compile(plushy_to_push(genome), prob.return_type, prob.inputs, registry)
    except CompileFailure:
        print("COMPILE-FAILURE")
        return 0
    sys.stdout.write(dump(dag))
    sys.stdout.write(emit(dag, prob).text)
    return 0


def cmd_cases(args) -> int:
    prob = _problem(args.problem)
    train, test = prob.generate(args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / f"{prob.name}_{args.seed}.train.jsonl").write_text(cases_to_jsonl(train))
    (out / f"{prob.name}_{args.seed}.test.jsonl").write_text(cases_to_jsonl(test))
    return 0


def cmd_manifest(args) -> int:
    sys.stdout.write(standard_registry().manifest())
    return 0


def _add_run_flags(p):
    p.add_argument("--problem", required=True, help=f"one of: {', '.join(sorted(all_problems()))}")
    p.add_argument("--pop", type=int)
    p.add_argument("--gens", type=int)
    p.add_argument("--umad-rate", type=float)
    p.add_argument("--train", type=int, help="number of training cases")
    p.add_argument("--test", type=int, help="number of test cases")
    p.add_argument("--simplify-steps", type=int)
    p.add_argument("--out", required=True)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cbgp", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("run", help="a single evolutionary run")
    _add_run_flags(p)
    p.add_argument("--seed", type=int, required=True)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("bench", help="several seeded runs plus an aggregate")
    _add_run_flags(p)
    p.add_argument("--runs", type=int, required=True)
    p.add_argument("--seed-base", type=int, default=0)
    p.add_argument("--workers", type=int, help=f"parallel workers (default ${WORKERS_ENV} or 1)")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("compile", help="compile a genome file and print the DAG and source")
    p.add_argument("--problem", required=True)
    p.add_argument("--genome", required=True)
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("cases", help="export a problem's training and test cases as JSON lines")
    p.add_argument("--problem", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_cases)

    p = sub.add_parser("manifest", help="list the registered expressions")
    p.set_defaults(func=cmd_manifest)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(asctime)s %(levelname)s %(message)s")
        return args.func(args)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
