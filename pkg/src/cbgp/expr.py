"""Expression kinds, the expression registry and random gene generation."""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Optional, Sequence

from cbgp.typesys import (
    BOOL,
    FLOAT,
    INT,
    STR,
    TOP,
    RuleInapplicable,
    Specification,
    TypeExpr,
    TypeHierarchy,
    apply_rule,
    default_hierarchy,
    free_vars,
)


class DuplicateName(ValueError):
    pass


class Expression:
    """Base class of everything that can appear in a genome or a DAG."""

    __slots__ = ()


@dataclass(frozen=True)
class Constant(Expression):
    value: Any
    type: TypeExpr

    def __post_init__(self):
        if free_vars(self.type):
            raise ValueError(f"constant type must be concrete: {self.type}")


@dataclass(frozen=True)
class Input(Expression):
    name: str
    type: TypeExpr


@dataclass(frozen=True)
class LocalInput(Expression):
    """Element placeholder inside an anonymous function body."""

    depth: int = 0

    def __post_init__(self):
        if self.depth < 0:
            raise ValueError("local input depth must be >= 0")


@dataclass(frozen=True, eq=False)
class Operator(Expression):
    """A function-like expression wrapping a host callable.

    ``key`` is unique within a registry; ``display`` is the name used in
    emitted source (overloads such as the two ``len`` share a display name).
    """

    key: str
    impl: Callable
    spec: Specification
    rules: tuple = ()
    display: str = ""
    prints: bool = False

    def __post_init__(self):
        if not self.display:
            object.__setattr__(self, "display", self.key)
        object.__setattr__(self, "rules", tuple(self.rules))
        names = set(self.spec.arg_names)
        for r in self.rules:
            missing = [a for a in r.args if a not in names]
            if missing:
                raise ValueError(f"{self.key}: rule {r} names unknown arguments {missing}")

    @property
    def name(self) -> str:
        return self.display

    @property
    def arity(self) -> int:
        return len(self.spec.args)

    def reify(self, spec: Specification, bound: dict, h: TypeHierarchy) -> Specification:
        """Apply every rule whose inputs are bound; RuleInapplicable propagates."""
        for r in self.rules:
            if r.ready(bound):
                spec = apply_rule(r, spec, bound, h)
        return spec

    def __repr__(self):
        return f"{type(self).__name__}({self.key})"


class Function(Operator):
    pass


class Method(Operator):
    """First argument is the receiver."""

    def __post_init__(self):
        super().__post_init__()
        if not self.spec.args:
            raise ValueError(f"method {self.key} needs a receiver argument")


class Constructor(Operator):
    pass


class HofKind(enum.Enum):
    MAP = "map"
    FILTER = "filter"


@dataclass(frozen=True)
class HigherOrderFunction(Expression):
    kind: HofKind

    @property
    def key(self) -> str:
        return self.kind.value

    @property
    def name(self) -> str:
        return self.kind.value


MAP = HigherOrderFunction(HofKind.MAP)
FILTER = HigherOrderFunction(HofKind.FILTER)


class Token(enum.Enum):
    OPEN = "OPEN"
    CLOSE = "CLOSE"

    def __repr__(self):
        return self.value


OPEN = Token.OPEN
CLOSE = Token.CLOSE


def bind(op: Operator, child_types: Sequence[TypeExpr], h: TypeHierarchy) -> Optional[Specification]:
    """Reify ``op`` against children in argument order, or None if ill-typed."""
    if len(child_types) != op.arity:
        return None
    spec = op.spec
    bound: dict = {}
    try:
        for (name, _), t in zip(op.spec.args, child_types):
            if not h.is_subtype(t, spec.arg_type(name)):
                return None
            bound[name] = t
            spec = op.reify(spec, bound, h)
    except RuleInapplicable:
        return None
    return spec


# ---------------------------------------------------------------------------
# Registry


@dataclass
class Registry:
    hierarchy: TypeHierarchy = field(default_factory=default_hierarchy)
    expressions: dict = field(default_factory=dict)
    constants_pool: list = field(default_factory=list)
    float_range: Optional[tuple] = (-1.0, 1.0)

    def register(self, expr: Expression) -> Expression:
        key = expr.key.lower()
        if key in self.expressions:
            raise DuplicateName(expr.key)
        if isinstance(expr, Operator):
            for _, t in expr.spec.args:
                self.hierarchy.check(t)
            self.hierarchy.check(expr.spec.ret)
        self.expressions[key] = expr
        return expr

    def add_constant(self, value: Any, type_: TypeExpr) -> Constant:
        self.hierarchy.check(type_)
        c = Constant(value, type_)
        self.constants_pool.append(c)
        return c

    def lookup(self, name: str) -> Optional[Expression]:
        return self.expressions.get(name.lower())

    def __getitem__(self, name: str) -> Expression:
        e = self.lookup(name)
        if e is None:
            raise KeyError(name)
        return e

    def __contains__(self, name: str) -> bool:
        return name.lower() in self.expressions

    def __len__(self):
        return len(self.expressions)

    def __iter__(self):
        return iter(self.expressions.values())

    def by_display(self, name: str) -> list:
        return [e for e in self.expressions.values() if e.name == name]

    def manifest(self) -> str:
        """One line per expression: key, kind, display name, spec and rules."""
        lines = []
        for key, e in self.expressions.items():
            if isinstance(e, Operator):
                rules = " ".join(str(r) for r in e.rules) or "-"
                lines.append(f"{key}\t{type(e).__name__}\t{e.display}\t{e.spec}\t{rules}")
            else:
                lines.append(f"{key}\tHigherOrderFunction\t{e.name}\t-\t-")
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Random genes

CATEGORIES = ("expression", "constant", "input", "local", "open", "close")


@dataclass(frozen=True)
class GeneWeights:
    expression: float = 0.4
    constant: float = 0.05
    input: float = 0.25
    local: float = 0.1
    open: float = 0.1
    close: float = 0.1

    def as_tuple(self) -> tuple:
        return tuple(getattr(self, c) for c in CATEGORIES)


class GeneSource:
    """Draws random genes for one problem: registry templates, constants,
    the problem's inputs, local inputs and structure tokens."""

    def __init__(
        self,
        registry: Registry,
        inputs: Iterable[Input] = (),
        weights: GeneWeights = GeneWeights(),
        max_local_depth: int = 1,
    ):
        self.registry = registry
        self.inputs = list(inputs)
        self.weights = weights
        self.expressions = list(registry)
        self.locals = [LocalInput(k) for k in range(max_local_depth)]
        self.n_constants = len(registry.constants_pool) + (registry.float_range is not None)
        avail = {
            "expression": bool(self.expressions),
            "constant": self.n_constants > 0,
            "input": bool(self.inputs),
            "local": bool(self.locals),
            "open": True,
            "close": True,
        }
        self.categories = [c for c in CATEGORIES if avail[c]]
        self.cum_weights = []
        total = 0.0
        for c in self.categories:
            total += getattr(weights, c)
            self.cum_weights.append(total)
        if total <= 0:
            raise ValueError("gene weights sum to zero over available categories")

    def category(self, rng: random.Random) -> str:
        return rng.choices(self.categories, cum_weights=self.cum_weights)[0]

    def draw(self, rng: random.Random):
        c = self.category(rng)
        if c == "expression":
            return rng.choice(self.expressions)
        if c == "constant":
            pool = self.registry.constants_pool
            i = rng.randrange(self.n_constants)
            if i < len(pool):
                return pool[i]
            lo, hi = self.registry.float_range
            return Constant(rng.uniform(lo, hi), FLOAT)
        if c == "input":
            return rng.choice(self.inputs)
        if c == "local":
            return rng.choice(self.locals)
        return OPEN if c == "open" else CLOSE

    def genome(self, rng: random.Random, length: int) -> list:
        return [self.draw(rng) for _ in range(length)]


def random_gene(
    registry: Registry,
    rng: random.Random,
    inputs: Iterable[Input] = (),
    weights: GeneWeights = GeneWeights(),
):
    return GeneSource(registry, inputs, weights).draw(rng)


def gene_category(gene) -> str:
    if isinstance(gene, (Operator, HigherOrderFunction)):
        return "expression"
    if isinstance(gene, Constant):
        return "constant"
    if isinstance(gene, Input):
        return "input"
    if isinstance(gene, LocalInput):
        return "local"
    if gene is OPEN:
        return "open"
    if gene is CLOSE:
        return "close"
    raise TypeError(f"not a gene: {gene!r}")


def default_constants(registry: Registry) -> Registry:
    """Integers -10..10, empty and single-character strings, booleans."""
    for i in range(-10, 11):
        registry.add_constant(i, INT)
    for s in ("", " ", "\n"):
        registry.add_constant(s, STR)
    registry.add_constant(True, BOOL)
    registry.add_constant(False, BOOL)
    return registry


__all__ = [
    "CLOSE",
    "Constant",
    "Constructor",
    "DuplicateName",
    "Expression",
    "FILTER",
    "Function",
    "GeneSource",
    "GeneWeights",
    "HigherOrderFunction",
    "HofKind",
    "Input",
    "LocalInput",
    "MAP",
    "Method",
    "OPEN",
    "Operator",
    "Registry",
    "Specification",
    "Token",
    "bind",
    "default_constants",
    "gene_category",
    "random_gene",
    "TOP",
]
