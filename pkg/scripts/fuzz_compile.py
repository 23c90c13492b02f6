"""Compile random genomes for every problem and tally compile rates, DAG
sizes, return types and evaluation outcomes.

    python3 scripts/fuzz_compile.py --genomes 2000
"""

import argparse
import random
from collections import Counter

from cbgp.bench import all_problems
from cbgp.dagir import CompiledDag, EvalError, ResourceLimit, diagnose
from cbgp.evolve import RunConfig
from cbgp.expr import GeneSource
from cbgp.library import standard_registry
from cbgp.pushc import CompileFailure, compile, plushy_to_push


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--genomes", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    registry = standard_registry()
    h = registry.hierarchy
    cfg = RunConfig()
    for name, prob in sorted(all_problems().items()):
        source = GeneSource(registry, prob.input_genes(), cfg.gene_weights, cfg.max_local_depth)
        rng = random.Random(f"{args.seed}:{name}")
        cases, _ = prob.generate(args.seed, 5, 1)
        outcomes, rets, sizes, compiled = Counter(), Counter(), [], 0
        for _ in range(args.genomes):
            genome = source.genome(rng, rng.randint(cfg.init_min_length, cfg.init_max_length))
            try:
                d = compile(plushy_to_push(genome), prob.return_type, prob.inputs, registry)
            except CompileFailure:
                continue
            compiled += 1
            assert diagnose(d, h) is None
            rets[str(d.ret)] += 1
            sizes.append(d.size())
            fn = CompiledDag(d)
            for case in cases:
                try:
                    fn(case.inputs)
                    outcomes["ok"] += 1
                except ResourceLimit:
                    outcomes["budget"] += 1
                except EvalError:
                    outcomes["error"] += 1
        mean_size = sum(sizes) / len(sizes) if sizes else 0
        print(f"{name}: {compiled}/{args.genomes} compiled, mean size {mean_size:.1f}, "
              f"outcomes {dict(outcomes)}, top returns {rets.most_common(3)}")


if __name__ == "__main__":
    main()
