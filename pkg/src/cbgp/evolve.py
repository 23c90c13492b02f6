"""Generational GP: initialization, lexicase selection, UMAD, penalties and
post-run genome simplification."""

from __future__ import annotations

import dataclasses
import json
import logging
import math
import random
import time
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from cbgp.bench.problems import PENALTY, Problem
from cbgp.dagir import DEFAULT_BUDGET, CompiledDag, DagNode, EvalError
from cbgp.expr import GeneSource, GeneWeights, Registry
from cbgp.library import standard_registry
from cbgp.pushc import CompileFailure, compile, genome_to_text, plushy_to_push

log = logging.getLogger(__name__)


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    population_size: int = 1000
    max_generations: int = 300
    umad_rate: float = 0.09
    penalty: float = PENALTY
    seed: int = 0
    training_cases: int = 100
    test_cases: int = 1000
    simplification_steps: int = 1000
    init_min_length: int = 20
    init_max_length: int = 100
    eval_budget: int = DEFAULT_BUDGET
    gene_weights: GeneWeights = GeneWeights()
    max_local_depth: int = 1

    def check(self) -> "RunConfig":
        if self.population_size < 1:
            raise ConfigError("population_size must be >= 1")
        if self.max_generations < 0:
            raise ConfigError("max_generations must be >= 0")
        if not 0 < self.umad_rate < 1:
            raise ConfigError("umad_rate must be in (0, 1)")
        if self.penalty <= 0:
            raise ConfigError("penalty must be positive")
        if self.training_cases < 1 or self.test_cases < 1:
            raise ConfigError("case counts must be >= 1")
        if self.simplification_steps < 0:
            raise ConfigError("simplification_steps must be >= 0")
        if not 0 <= self.init_min_length <= self.init_max_length:
            raise ConfigError("need 0 <= init_min_length <= init_max_length")
        if self.eval_budget < 1:
            raise ConfigError("eval_budget must be >= 1")
        return self

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


@dataclass
class Individual:
    genome: tuple
    errors: Optional[tuple] = None
    total_error: float = math.inf
    dag: Optional[DagNode] = field(default=None, repr=False)

    @property
    def solved(self) -> bool:
        return self.errors is not None and not any(self.errors)


class Evaluator:
    """Compiles once per genome and scores the DAG on a fixed case list."""

    def __init__(self, problem: Problem, cases: Sequence, registry: Registry,
                 penalty: float = PENALTY, budget: int = DEFAULT_BUDGET):
        self.problem = problem
        self.cases = list(cases)
        self.registry = registry
        self.penalty = penalty
        self.budget = budget
        self._cache: dict = {}

    def compile(self, genome) -> Optional[DagNode]:
        try:
            return compile(plushy_to_push(genome), self.problem.return_type,
                           self.problem.inputs, self.registry)
        except CompileFailure:
            return None

    def dag_errors(self, dag: Optional[DagNode]) -> tuple:
        if dag is None:
            return (self.penalty,) * len(self.cases)
        hit = self._cache.get(dag)
        if hit is not None:
            return hit
        fn = CompiledDag(dag, self.budget)
        err = self.problem.case_error
        pen = self.penalty
        out = []
        for c in self.cases:
            try:
                result, printed = fn(c.inputs)
            except (EvalError, RecursionError):
                out.append(pen)
                continue
            e = err(result, printed, c.expected)
            out.append(pen if not e <= pen else float(e))  # NaN-safe clip
        errors = tuple(out)
        if len(self._cache) < 200_000:
            self._cache[dag] = errors
        return errors

    def errors(self, genome) -> tuple:
        return self.dag_errors(self.compile(genome))

    def evaluate(self, ind: Individual) -> Individual:
        ind.dag = self.compile(ind.genome)
        ind.errors = self.dag_errors(ind.dag)
        ind.total_error = sum(ind.errors)
        return ind


def evaluate_individual(ind: Individual, prob: Problem, cases: Sequence,
                        registry: Optional[Registry] = None, penalty: float = PENALTY) -> Individual:
    return Evaluator(prob, cases, registry or standard_registry(), penalty).evaluate(ind)


# ---------------------------------------------------------------------------
# Selection


class LexicaseSelector:
    """Lexicase selection over a population with identical error vectors
    grouped together, so each filtering pass touches unique vectors only."""

    def __init__(self, population: Sequence[Individual]):
        if not population:
            raise ValueError("empty population")
        self.population = list(population)
        groups: dict = {}
        for i, ind in enumerate(self.population):
            groups.setdefault(ind.errors, []).append(i)
        self.vectors = list(groups)
        self.members = [groups[v] for v in self.vectors]
        self.matrix = np.array(self.vectors, dtype=float).reshape(len(self.vectors), -1)
        self.n_cases = self.matrix.shape[1]

    def select_index(self, rng: random.Random) -> int:
        order = list(range(self.n_cases))
        rng.shuffle(order)
        cand = np.arange(len(self.vectors))
        for c in order:
            if len(cand) == 1:
                break
            col = self.matrix[cand, c]
            cand = cand[col == col.min()]
        survivors = [i for g in cand for i in self.members[g]]
        return rng.choice(survivors)

    def select(self, rng: random.Random) -> Individual:
        return self.population[self.select_index(rng)]


def lexicase_select(population: Sequence[Individual], rng: random.Random) -> Individual:
    return LexicaseSelector(population).select(rng)


# ---------------------------------------------------------------------------
# Variation


def umad(genome: Sequence, rate: float, source: GeneSource, rng: random.Random) -> list:
    """Uniform mutation by addition and deletion.

    Each gene gets a new random neighbour (before or after it) with
    probability ``rate``; then every gene is deleted with probability
    ``rate / (1 + rate)``, which keeps the expected length unchanged.
    """
    added = []
    for g in genome:
        if rng.random() < rate:
            new = source.draw(rng)
            if rng.random() < 0.5:
                added.append(new)
                added.append(g)
            else:
                added.append(g)
                added.append(new)
        else:
            added.append(g)
    p_del = rate / (1 + rate)
    return [g for g in added if rng.random() >= p_del]


def simplify(genome: Sequence, evaluator: Evaluator, steps: int, rng: random.Random,
             errors: Optional[tuple] = None,
             on_accept: Optional[Callable[[tuple, tuple], None]] = None) -> list:
    """Hill-climb by deleting 1-3 random genes per step; a deletion is kept
    only if no training-case error gets worse."""
    genome = list(genome)
    current = errors if errors is not None else evaluator.errors(genome)
    for _ in range(steps):
        if not genome:
            break
        k = min(rng.randint(1, 3), len(genome))
        drop = set(rng.sample(range(len(genome)), k))
        candidate = [g for i, g in enumerate(genome) if i not in drop]
        cand_err = evaluator.errors(candidate)
        if all(a <= b for a, b in zip(cand_err, current)):
            if on_accept is not None:
                on_accept(current, cand_err)
            genome, current = candidate, cand_err
    return genome


# ---------------------------------------------------------------------------
# Runs


@dataclass
class RunReport:
    problem: str
    seed: int
    config: dict
    generations: list
    success_generation: Optional[int]
    best_genome: list
    best_total_error: Optional[float]
    simplified_genome: list
    training_total_error: Optional[float]
    test_total_error: Optional[float]
    solution: bool
    source: Optional[str]
    timings: dict = field(default_factory=dict)

    def to_dict(self, include_timings: bool = False) -> dict:
        d = dataclasses.asdict(self)
        if not include_timings:
            d.pop("timings")
        return d

    def to_json(self, include_timings: bool = False) -> str:
        return json.dumps(self.to_dict(include_timings), indent=2, sort_keys=True) + "\n"


def _genome_lines(genome) -> list:
    return genome_to_text(genome).splitlines()


def run_evolution(prob: Problem, cfg: RunConfig, registry: Optional[Registry] = None,
                  on_generation: Optional[Callable[[dict], None]] = None,
                  seed_genomes: Sequence = ()) -> RunReport:
    """One evolutionary run.  ``seed_genomes`` replace the first random
    individuals of the initial population."""
    from cbgp.codegen import emit  # codegen imports bench; avoid a cycle at import time

    cfg.check()
    t0 = time.perf_counter()
    registry = registry or standard_registry()
    train, test = prob.generate(cfg.seed, cfg.training_cases, cfg.test_cases)
    ev = Evaluator(prob, train, registry, cfg.penalty, cfg.eval_budget)
    source = GeneSource(registry, prob.input_genes(), cfg.gene_weights, cfg.max_local_depth)

    population = [Individual(tuple(g)) for g in list(seed_genomes)[:cfg.population_size]]
    for i in range(len(population), cfg.population_size):
        rng = random.Random(f"{cfg.seed}:init:{i}")
        n = rng.randint(cfg.init_min_length, cfg.init_max_length)
        population.append(Individual(tuple(source.genome(rng, n))))

    history = []
    best: Optional[Individual] = None
    winner: Optional[Individual] = None
    success_gen = None
    for gen in range(cfg.max_generations):
        for ind in population:
            ev.evaluate(ind)
        gen_best = min(population, key=lambda x: x.total_error)
        if best is None or gen_best.total_error < best.total_error:
            best = gen_best
        stats = {
            "generation": gen,
            "best_total_error": gen_best.total_error,
            "mean_total_error": math.fsum(x.total_error for x in population) / len(population),
            "compile_failures": sum(1 for x in population if x.dag is None),
        }
        history.append(stats)
        log.info("%s seed=%d gen=%d best=%.6g", prob.name, cfg.seed, gen, gen_best.total_error)
        if on_generation is not None:
            on_generation(stats)
        solved = [x for x in population if x.solved]
        if solved:
            winner = solved[0]
            success_gen = gen
            break
        if gen == cfg.max_generations - 1:
            break
        selector = LexicaseSelector(population)
        children = []
        for i in range(cfg.population_size):
            rng = random.Random(f"{cfg.seed}:{gen}:{i}")
            parent = selector.select(rng)
            children.append(Individual(tuple(umad(parent.genome, cfg.umad_rate, source, rng))))
        population = children
    t_evolve = time.perf_counter() - t0

    final = winner or best
    simplified = []
    train_total = test_total = None
    src = None
    solution = False
    if final is not None:
        if winner is not None:
            simplified = simplify(winner.genome, ev, cfg.simplification_steps,
                                  random.Random(f"{cfg.seed}:simplify"), winner.errors)
        else:
            simplified = list(final.genome)
        dag = ev.compile(simplified)
        train_total = math.fsum(ev.dag_errors(dag))
        test_ev = Evaluator(prob, test, registry, cfg.penalty, cfg.eval_budget)
        test_errors = test_ev.dag_errors(dag)
        test_total = math.fsum(test_errors)
        solution = winner is not None and not any(test_errors)
        if dag is not None:
            src = emit(dag, prob).text
    return RunReport(
        problem=prob.name,
        seed=cfg.seed,
        config=cfg.to_dict(),
        generations=history,
        success_generation=success_gen,
        best_genome=_genome_lines(final.genome) if final else [],
        best_total_error=final.total_error if final else None,
        simplified_genome=_genome_lines(simplified),
        training_total_error=train_total,
        test_total_error=test_total,
        solution=solution,
        source=src,
        timings={"evolution_seconds": t_evolve, "total_seconds": time.perf_counter() - t0},
    )
