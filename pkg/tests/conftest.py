import random

import pytest
from hypothesis import settings

from cbgp.bench import all_problems
from cbgp.expr import GeneSource
from cbgp.library import standard_registry
from cbgp.pushc import CompileFailure, compile, plushy_to_push

settings.register_profile("default", deadline=None, max_examples=100)
settings.load_profile("default")


@pytest.fixture(scope="session")
def registry():
    return standard_registry()


@pytest.fixture(scope="session")
def h(registry):
    return registry.hierarchy


@pytest.fixture(scope="session")
def problems():
    return all_problems()


def fuzz_dags(registry, problem, n, seed=0, lengths=(5, 60)):
    """Compile ``n`` random genomes; yields (genome, dag) for the successes."""
    source = GeneSource(registry, problem.input_genes())
    rng = random.Random(f"fuzz:{problem.name}:{seed}")
    for _ in range(n):
        genome = source.genome(rng, rng.randint(*lengths))
        try:
            yield genome, compile(plushy_to_push(genome), problem.return_type, problem.inputs, registry)
        except CompileFailure:
            continue
