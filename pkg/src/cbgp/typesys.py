"""Type annotations, subtyping, decomposition and reification rules.

Types are immutable values.  Bare collection names (``List``) behave like the
collection parameterized with ``Top``; a ``TypeHierarchy`` supplies the nominal
edges and the numeric ordering used by the ``MaxType`` rule.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Union as _U


class UnknownType(ValueError):
    pass


class RuleInapplicable(ValueError):
    pass


class _Type:
    """Base for type expressions; caches the structural hash."""

    __slots__ = ()

    def __hash__(self):
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash((type(self).__name__,) + self._key())
            object.__setattr__(self, "_hash", h)
        return h

    def _key(self) -> tuple:
        raise NotImplementedError


@dataclass(frozen=True, eq=True)
class TopType(_Type):
    def _key(self):
        return ()

    def __hash__(self):
        return _Type.__hash__(self)

    def __str__(self):
        return "Top"


TOP = TopType()


@dataclass(frozen=True, eq=True)
class Nominal(_Type):
    name: str

    def _key(self):
        return (self.name,)

    def __hash__(self):
        return _Type.__hash__(self)

    def __str__(self):
        return self.name


@dataclass(frozen=True, eq=True)
class Parametric(_Type):
    ctor: str
    params: tuple

    def __post_init__(self):
        if not isinstance(self.params, tuple):
            object.__setattr__(self, "params", tuple(self.params))

    def _key(self):
        return (self.ctor, self.params)

    def __hash__(self):
        return _Type.__hash__(self)

    def __str__(self):
        return f"{self.ctor}[{','.join(str(p) for p in self.params)}]"


@dataclass(frozen=True, eq=True)
class Union(_Type):
    members: frozenset

    def _key(self):
        return (self.members,)

    def __hash__(self):
        return _Type.__hash__(self)

    def __str__(self):
        return f"Union[{','.join(sorted(str(m) for m in self.members))}]"


@dataclass(frozen=True, eq=True)
class Var(_Type):
    id: str
    bound: Optional["TypeExpr"] = None

    def _key(self):
        return (self.id, self.bound)

    def __hash__(self):
        return _Type.__hash__(self)

    def __str__(self):
        return self.id


TypeExpr = _U[TopType, Nominal, Parametric, Union, Var]


def union(*types: TypeExpr) -> TypeExpr:
    """Build a flattened union; a single distinct member collapses to itself."""
    flat: set = set()
    for t in types:
        if isinstance(t, Union):
            flat.update(t.members)
        else:
            flat.add(t)
    if not flat:
        raise ValueError("union of no types")
    if len(flat) == 1:
        return next(iter(flat))
    return Union(frozenset(flat))


def list_of(t: TypeExpr) -> Parametric:
    return Parametric("List", (t,))


# Frequently used types.
BOOL = Nominal("Bool")
INT = Nominal("Int")
FLOAT = Nominal("Float")
STR = Nominal("Str")
COMPARABLE = Nominal("Comparable")
DATETIME = Nominal("DateTime")
TIMEDELTA = Nominal("TimeDelta")
PATH = Nominal("Path")
LIST = Nominal("List")
NUMBER = union(INT, FLOAT)


class TypeHierarchy:
    """Declared type names, their arities and the nominal subtype edges.

    Immutable after construction.  ``is_subtype`` results are memoized.
    """

    def __init__(
        self,
        arities: Mapping[str, int],
        edges: Iterable[tuple[str, str]] = (),
        numeric_order: Iterable[str] = (),
    ):
        self.arities = dict(arities)
        self.edges = frozenset(edges)
        self.numeric_order = tuple(numeric_order)
        for child, parent in self.edges:
            for n in (child, parent):
                if n not in self.arities:
                    raise UnknownType(n)
        self._ancestors = {n: self._closure(n) for n in self.arities}
        for child, parent in self.edges:
            if child in self._ancestors[parent]:
                raise ValueError(f"cyclic type edges through {child}")
        for lo, hi in zip(self.numeric_order, self.numeric_order[1:]):
            if hi not in self._ancestors[lo]:
                raise ValueError(f"numeric order {lo} < {hi} lacks a subtype edge")
        self._rank = {n: i for i, n in enumerate(self.numeric_order)}
        self._cache: dict = {}

    def _closure(self, name: str) -> frozenset:
        seen = {name}
        todo = [name]
        while todo:
            n = todo.pop()
            for c, p in self.edges:
                if c == n and p not in seen:
                    seen.add(p)
                    todo.append(p)
        return frozenset(seen)

    def declares(self, name: str) -> bool:
        return name in self.arities

    def arity(self, name: str) -> int:
        try:
            return self.arities[name]
        except KeyError:
            raise UnknownType(name) from None

    def nominal_sub(self, a: str, b: str) -> bool:
        try:
            return b in self._ancestors[a]
        except KeyError:
            raise UnknownType(a) from None

    def check(self, t: TypeExpr) -> None:
        """Raise UnknownType for undeclared names or bad arities."""
        if isinstance(t, Nominal):
            self.arity(t.name)
        elif isinstance(t, Parametric):
            if self.arity(t.ctor) != len(t.params):
                raise UnknownType(f"{t.ctor} expects {self.arity(t.ctor)} parameters: {t}")
            for p in t.params:
                self.check(p)
        elif isinstance(t, Union):
            for m in t.members:
                self.check(m)
        elif isinstance(t, Var) and t.bound is not None:
            self.check(t.bound)

    def numeric_rank(self, t: TypeExpr) -> Optional[int]:
        if isinstance(t, Nominal):
            return self._rank.get(t.name)
        return None

    def is_subtype(self, sub: TypeExpr, sup: TypeExpr) -> bool:
        key = (sub, sup)
        r = self._cache.get(key)
        if r is None:
            self.check(sub)
            self.check(sup)
            r = self._cache[key] = self._sub(sub, sup)
        return r

    def _normal(self, t):
        if isinstance(t, Nominal):
            n = self.arities[t.name]
            if n:
                return Parametric(t.name, (TOP,) * n)
        return t

    def _sub(self, sub, sup) -> bool:
        if sub == sup or sup is TOP or isinstance(sup, TopType):
            return True
        if isinstance(sub, Union):
            return all(self._sub(m, sup) for m in sub.members)
        if isinstance(sup, Union):
            return any(self._sub(sub, m) for m in sup.members)
        if isinstance(sup, Var):
            if isinstance(sub, Var) and sub.id == sup.id:
                return True
            return sup.bound is None or self._sub(sub, sup.bound)
        if isinstance(sub, Var):
            return sub.bound is not None and self._sub(sub.bound, sup)
        if isinstance(sub, TopType):
            return False
        sub = self._normal(sub)
        sup = self._normal(sup)
        if isinstance(sub, Nominal):
            return isinstance(sup, Nominal) and self.nominal_sub(sub.name, sup.name)
        # sub is Parametric
        if isinstance(sup, Nominal):
            return self.nominal_sub(sub.ctor, sup.name)
        return (
            self.nominal_sub(sub.ctor, sup.ctor)
            and len(sub.params) == len(sup.params)
            and all(self._sub(a, b) for a, b in zip(sub.params, sup.params))
        )

    def join(self, types: Iterable[TypeExpr]) -> TypeExpr:
        """Least upper bound by subsumption; falls back to a union."""
        kept: list = []
        for t in types:
            if any(self.is_subtype(t, k) for k in kept):
                continue
            kept = [k for k in kept if not self.is_subtype(k, t)]
            kept.append(t)
        if not kept:
            return TOP
        return union(*kept)


def default_hierarchy() -> TypeHierarchy:
    """Hierarchy covering the core library and the benchmark classes."""
    arities = {
        "Bool": 0,
        "Int": 0,
        "Float": 0,
        "Str": 0,
        "Comparable": 0,
        "DateTime": 0,
        "TimeDelta": 0,
        "Path": 0,
        "List": 1,
        "Sequence": 1,
    }
    edges = [
        ("Int", "Float"),
        ("Float", "Comparable"),
        ("Bool", "Comparable"),
        ("Str", "Comparable"),
        ("DateTime", "Comparable"),
        ("TimeDelta", "Comparable"),
        ("List", "Sequence"),
    ]
    return TypeHierarchy(arities, edges, numeric_order=("Int", "Float"))


_DEFAULT: Optional[TypeHierarchy] = None


def standard() -> TypeHierarchy:
    global _DEFAULT
    if _DEFAULT is None:
        _DEFAULT = default_hierarchy()
    return _DEFAULT


def is_subtype(sub: TypeExpr, sup: TypeExpr, h: Optional[TypeHierarchy] = None) -> bool:
    return (h or standard()).is_subtype(sub, sup)


def decompose(t: TypeExpr, h: Optional[TypeHierarchy] = None) -> Optional[tuple[str, list]]:
    """Split a collection type into its constructor and element types.

    >>> decompose(list_of(STR))
    ('List', [Str])
    >>> decompose(LIST)
    ('List', [Top])
    >>> decompose(INT) is None
    True
    """
    if isinstance(t, Parametric):
        return t.ctor, list(t.params)
    if isinstance(t, Nominal):
        n = (h or standard()).arities.get(t.name, 0)
        if n:
            return t.name, [TOP] * n
    return None


def element_type(t: TypeExpr, h: Optional[TypeHierarchy] = None) -> Optional[TypeExpr]:
    d = decompose(t, h)
    if d is None or len(d[1]) != 1:
        return None
    return d[1][0]


# ---------------------------------------------------------------------------
# Specifications and reification


@dataclass(frozen=True)
class Specification:
    args: tuple  # of (name, TypeExpr)
    ret: TypeExpr

    def __post_init__(self):
        if not isinstance(self.args, tuple):
            object.__setattr__(self, "args", tuple(tuple(a) for a in self.args))
        names = [n for n, _ in self.args]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate argument names in {names}")

    @property
    def arg_names(self) -> tuple:
        return tuple(n for n, _ in self.args)

    def arg_type(self, name: str) -> TypeExpr:
        for n, t in self.args:
            if n == name:
                return t
        raise KeyError(name)

    def with_arg(self, name: str, t: TypeExpr) -> "Specification":
        return Specification(tuple((n, t if n == name else u) for n, u in self.args), self.ret)

    def with_ret(self, t: TypeExpr) -> "Specification":
        return Specification(self.args, t)

    def __str__(self):
        args = ", ".join(f"{n}: {t}" for n, t in self.args)
        return f"({args}) -> {self.ret}"


class RuleKind(enum.Enum):
    PASS_THROUGH = "PassThrough"
    RETURN_ELEMENT = "ReturnElement"
    ARGS_TO_ELEMENT = "ArgsToElement"
    ARGS_TO_SAME = "ArgsToSame"
    LIST_OF = "ListOf"
    MAX_TYPE = "MaxType"


@dataclass(frozen=True)
class ReificationRule:
    """A reification rule and the argument names it refers to.

    For ``ArgsToElement`` the first name is the collection argument and the
    rest are the arguments whose expected type becomes its element type.
    """

    kind: RuleKind
    args: tuple

    def __post_init__(self):
        if not isinstance(self.args, tuple):
            object.__setattr__(self, "args", tuple(self.args))
        if not self.args:
            raise ValueError("a reification rule needs at least one argument")

    def reads(self) -> tuple:
        """Arguments that must be bound before the rule can fire."""
        if self.kind in (RuleKind.ARGS_TO_ELEMENT, RuleKind.PASS_THROUGH,
                         RuleKind.RETURN_ELEMENT, RuleKind.LIST_OF):
            return self.args[:1]
        if self.kind is RuleKind.MAX_TYPE:
            return self.args
        return ()  # ArgsToSame fires once any referenced argument is bound

    def ready(self, bound: Mapping[str, TypeExpr]) -> bool:
        if self.kind is RuleKind.ARGS_TO_SAME:
            return any(a in bound for a in self.args)
        return all(a in bound for a in self.reads())

    def __str__(self):
        return f"{self.kind.value}({','.join(self.args)})"


def rule(kind: _U[RuleKind, str], *args: str) -> ReificationRule:
    if isinstance(kind, str):
        kind = RuleKind(kind)
    return ReificationRule(kind, args)


def apply_rule(
    r: ReificationRule,
    spec: Specification,
    bound: Mapping[str, TypeExpr],
    h: Optional[TypeHierarchy] = None,
) -> Specification:
    """Return ``spec`` narrowed by one rule given the bound argument types."""
    h = h or standard()
    for a in r.args:
        spec.arg_type(a)  # KeyError for a rule that names a missing argument
    if not r.ready(bound):
        raise RuleInapplicable(f"{r}: arguments {r.reads() or r.args} not bound")
    k = r.kind
    if k is RuleKind.PASS_THROUGH:
        return spec.with_ret(bound[r.args[0]])
    if k is RuleKind.LIST_OF:
        return spec.with_ret(list_of(bound[r.args[0]]))
    if k in (RuleKind.RETURN_ELEMENT, RuleKind.ARGS_TO_ELEMENT):
        elem = element_type(bound[r.args[0]], h)
        if elem is None:
            raise RuleInapplicable(f"{r}: {bound[r.args[0]]} is not a collection")
        if k is RuleKind.RETURN_ELEMENT:
            return spec.with_ret(elem)
        for a in r.args[1:]:
            if a not in bound:
                spec = spec.with_arg(a, elem)
        return spec
    if k is RuleKind.ARGS_TO_SAME:
        first = next(bound[a] for a in r.args if a in bound)
        for a in r.args:
            if a not in bound:
                spec = spec.with_arg(a, first)
        return spec
    if k is RuleKind.MAX_TYPE:
        types = [bound[a] for a in r.args]
        ranks = [h.numeric_rank(t) for t in types]
        if any(x is None for x in ranks):
            return spec  # not all numeric scalars; leave the declared return
        return spec.with_ret(types[ranks.index(max(ranks))])
    raise AssertionError(k)


# ---------------------------------------------------------------------------
# Text form

_TOKEN = re.compile(r"\s*([A-Za-z_][A-Za-z0-9_]*|\[|\]|,)")


def parse_type(text: str, variables: Optional[Mapping[str, Var]] = None) -> TypeExpr:
    """Parse the canonical text form, e.g. ``List[Str]`` or ``Union[Int,Float]``."""
    toks = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ValueError(f"bad type text at {pos}: {text!r}")
        toks.append(m.group(1))
        pos = m.end()
    variables = variables or {}
    i = 0

    def parse():
        nonlocal i
        if i >= len(toks):
            raise ValueError(f"unexpected end of type text: {text!r}")
        name = toks[i]
        i += 1
        if name in "[],":
            raise ValueError(f"unexpected {name!r} in {text!r}")
        if i < len(toks) and toks[i] == "[":
            i += 1
            params = [parse()]
            while toks[i] == ",":
                i += 1
                params.append(parse())
            if toks[i] != "]":
                raise ValueError(f"expected ']' in {text!r}")
            i += 1
            if name == "Union":
                return union(*params)
            return Parametric(name, tuple(params))
        if name == "Top":
            return TOP
        if name in variables:
            return variables[name]
        return Nominal(name)

    try:
        t = parse()
    except IndexError:
        raise ValueError(f"unbalanced type text: {text!r}") from None
    if i != len(toks):
        raise ValueError(f"trailing tokens in type text: {text!r}")
    return t


def free_vars(t: TypeExpr) -> set:
    if isinstance(t, Var):
        return {t}
    if isinstance(t, Parametric):
        return set().union(*(free_vars(p) for p in t.params)) if t.params else set()
    if isinstance(t, Union):
        return set().union(*(free_vars(m) for m in t.members))
    return set()
