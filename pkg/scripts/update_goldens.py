"""Regenerate the small golden run reports under tests/golden/.

    python3 scripts/update_goldens.py

Each report comes from a deliberately tiny run so the files stay short;
tests/test_cli.py re-runs the same configuration and compares bytes.
"""

from pathlib import Path

from cbgp.bench import all_problems
from cbgp.evolve import RunConfig, run_evolution

GOLDEN_DIR = Path(__file__).resolve().parent.parent / "tests" / "golden"
GOLDEN_CONFIG = dict(population_size=20, max_generations=3, training_cases=20, test_cases=50,
                     simplification_steps=50, init_max_length=40, seed=0)


def golden_report(name: str) -> str:
    return run_evolution(all_problems()[name], RunConfig(**GOLDEN_CONFIG)).to_json()


def main():
    GOLDEN_DIR.mkdir(parents=True, exist_ok=True)
    for name in sorted(all_problems()):
        (GOLDEN_DIR / f"{name}.json").write_text(golden_report(name))
        print("wrote", name)


if __name__ == "__main__":
    main()
