"""Typed genetic programming: evolve linear genomes that compile into
type-safe expression DAGs, and emit the results as source text."""

__version__ = "0.1.0"
