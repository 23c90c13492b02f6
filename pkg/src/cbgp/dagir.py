"""Program DAGs: construction, validation, evaluation and debug dumps."""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import datetime
from typing import Any, Mapping, Optional, Sequence

from cbgp.expr import (
    Constant,
    Expression,
    HigherOrderFunction,
    HofKind,
    Input,
    LocalInput,
    Operator,
    bind,
)
from cbgp.typesys import (
    BOOL,
    TOP,
    Specification,
    TopType,
    Union,
    Var,
    TypeExpr,
    TypeHierarchy,
    element_type,
    list_of,
    standard,
)
from cbgp.library import HOST_TYPES

DEFAULT_BUDGET = 100_000


class EvalError(Exception):
    """A host error raised while evaluating a DAG on one case."""


class ResourceLimit(EvalError):
    pass


class TypeCheckError(TypeError):
    pass


@dataclass(frozen=True)
class DagNode:
    expr: Expression
    spec: Specification
    children: tuple = ()

    @property
    def ret(self) -> TypeExpr:
        return self.spec.ret

    @property
    def name(self) -> str:
        return node_label(self.expr)

    def size(self) -> int:
        return 1 + sum(c.size() for c in self.children)

    def walk(self):
        yield self
        for c in self.children:
            yield from c.walk()


ProgramDag = DagNode


def node_label(e: Expression) -> str:
    """Name shown in DAG dumps: leaves as written, expressions in CamelCase
    (``take`` -> ``Take``, ``index_of`` -> ``IndexOf``)."""
    if isinstance(e, Constant):
        return repr(e.value)
    if isinstance(e, Input):
        return e.name
    if isinstance(e, LocalInput):
        return f"_{e.depth}"
    return "".join(part[:1].upper() + part[1:] for part in e.name.split("_"))


# ---------------------------------------------------------------------------
# Construction


def leaf(e: Constant | Input) -> DagNode:
    return DagNode(e, Specification((), e.type))


def local(depth: int, type_: TypeExpr) -> DagNode:
    return DagNode(LocalInput(depth), Specification((), type_))


def apply(op: Operator, children: Sequence[DagNode], h: Optional[TypeHierarchy] = None) -> DagNode:
    """Build a reified operator node; TypeCheckError if the children do not fit."""
    h = h or standard()
    spec = bind(op, [c.ret for c in children], h)
    if spec is None:
        got = ", ".join(str(c.ret) for c in children)
        raise TypeCheckError(f"{op.display}{op.spec} cannot take ({got})")
    return DagNode(op, spec, tuple(children))


def hof_spec(kind: HofKind, coll_type: TypeExpr, body_type: TypeExpr) -> Specification:
    ret = list_of(body_type) if kind is HofKind.MAP else coll_type
    return Specification((("coll", coll_type), ("fn", body_type)), ret)


def hof(h_expr: HigherOrderFunction, coll: DagNode, body: DagNode,
        h: Optional[TypeHierarchy] = None) -> DagNode:
    h = h or standard()
    if element_type(coll.ret, h) is None:
        raise TypeCheckError(f"{h_expr.name} needs a collection, got {coll.ret}")
    if h_expr.kind is HofKind.FILTER and not h.is_subtype(body.ret, BOOL):
        raise TypeCheckError(f"filter body must return Bool, got {body.ret}")
    return DagNode(h_expr, hof_spec(h_expr.kind, coll.ret, body.ret), (coll, body))


# ---------------------------------------------------------------------------
# Validation


def diagnose(d: DagNode, h: Optional[TypeHierarchy] = None, local_types: tuple = ()) -> Optional[str]:
    """Return a ``path: reason`` string for the first violation, or None."""
    return _diagnose(d, h or standard(), tuple(local_types), "root")


def _diagnose(d: DagNode, h: TypeHierarchy, locals_: tuple, path: str) -> Optional[str]:
    e = d.expr
    if isinstance(e, (Constant, Input)):
        if d.children:
            return f"{path}: leaf with children"
        if d.spec != Specification((), e.type):
            return f"{path}: leaf spec {d.spec} differs from {e.type}"
        return None
    if isinstance(e, LocalInput):
        if d.children or d.spec.args:
            return f"{path}: local input with arguments"
        if e.depth >= len(locals_):
            return f"{path}: _{e.depth} outside any anonymous function of that depth"
        if not h.is_subtype(locals_[e.depth], d.ret):
            return f"{path}: _{e.depth} has type {locals_[e.depth]}, node claims {d.ret}"
        return None
    if isinstance(e, Operator):
        if len(d.children) != e.arity or len(d.spec.args) != e.arity:
            return f"{path}: {e.display} expects {e.arity} children, has {len(d.children)}"
        for i, c in enumerate(d.children):
            problem = _diagnose(c, h, locals_, f"{path}/{i}")
            if problem:
                return problem
        for i, (c, (name, t)) in enumerate(zip(d.children, d.spec.args)):
            if not h.is_subtype(c.ret, t):
                return f"{path}/{i}: {c.ret} is not a subtype of {e.display}.{name}: {t}"
        expected = bind(e, [c.ret for c in d.children], h)
        if expected != d.spec:
            return f"{path}: reified spec {d.spec} disagrees with {expected}"
        return None
    if isinstance(e, HigherOrderFunction):
        if len(d.children) != 2:
            return f"{path}: {e.name} needs exactly two children"
        coll, body = d.children
        problem = _diagnose(coll, h, locals_, f"{path}/0")
        if problem:
            return problem
        elem = element_type(coll.ret, h)
        if elem is None:
            return f"{path}/0: {coll.ret} is not a collection"
        problem = _diagnose(body, h, locals_ + (elem,), f"{path}/1")
        if problem:
            return problem
        if e.kind is HofKind.FILTER and not h.is_subtype(body.ret, BOOL):
            return f"{path}/1: filter body returns {body.ret}"
        if d.spec != hof_spec(e.kind, coll.ret, body.ret):
            return f"{path}: spec {d.spec} inconsistent with children"
        return None
    return f"{path}: unknown expression {e!r}"


def validate(d: DagNode, h: Optional[TypeHierarchy] = None) -> bool:
    return diagnose(d, h) is None


# ---------------------------------------------------------------------------
# Values


def most_specific_type(v: Any, h: Optional[TypeHierarchy] = None) -> TypeExpr:
    t = HOST_TYPES.get(type(v))
    if t is not None:
        return t
    if isinstance(v, list):
        if not v:
            return list_of(TOP)
        h = h or standard()
        return list_of(h.join(most_specific_type(x, h) for x in v))
    raise TypeError(f"not a runtime value: {v!r}")


def conforms(v: Any, t: TypeExpr, h: Optional[TypeHierarchy] = None) -> bool:
    """Whether runtime value ``v`` inhabits type ``t`` (an empty list
    inhabits every list type)."""
    h = h or standard()
    if isinstance(t, TopType):
        return True
    if isinstance(t, Union):
        return any(conforms(v, m, h) for m in t.members)
    if isinstance(t, Var):
        return t.bound is None or conforms(v, t.bound, h)
    if isinstance(v, list):
        elem = element_type(t, h)
        return elem is not None and all(conforms(x, elem, h) for x in v)
    host = HOST_TYPES.get(type(v))
    return host is not None and h.is_subtype(host, t)


def to_text(v: Any) -> str:
    """Textual form used by the print side-channel."""
    if isinstance(v, str):
        return v
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, list):
        return "[" + ", ".join(_quoted(x) for x in v) + "]"
    if isinstance(v, datetime):
        return v.isoformat(sep=" ")
    return str(v)


def _quoted(v):
    return repr(v) if isinstance(v, str) else to_text(v)


# ---------------------------------------------------------------------------
# Reference interpreter


class _Ctx:
    __slots__ = ("inputs", "locals", "printed", "visits", "budget")

    def __init__(self, inputs, budget):
        self.inputs = inputs
        self.locals = []
        self.printed = []
        self.visits = 0
        self.budget = budget


def evaluate(d: DagNode, inputs: Mapping[str, Any], budget: int = DEFAULT_BUDGET) -> tuple:
    """Evaluate post-order; returns ``(result, printed_text)``.

    Host exceptions are wrapped in EvalError; exceeding ``budget`` node visits
    raises ResourceLimit.
    """
    ctx = _Ctx(inputs, budget)
    result = _eval(d, ctx)
    return result, "".join(ctx.printed)


def _eval(d: DagNode, ctx: _Ctx):
    ctx.visits += 1
    if ctx.visits > ctx.budget:
        raise ResourceLimit(f"more than {ctx.budget} node visits")
    e = d.expr
    if isinstance(e, Constant):
        return e.value
    if isinstance(e, Input):
        return ctx.inputs[e.name]
    if isinstance(e, LocalInput):
        return ctx.locals[e.depth]
    if isinstance(e, Operator):
        args = [_eval(c, ctx) for c in d.children]
        try:
            out = e.impl(*args)
        except Exception as exc:  # host errors become penalties upstream
            raise EvalError(f"{e.display}: {type(exc).__name__}: {exc}") from exc
        if e.prints:
            ctx.printed.append(to_text(out))
        return out
    if isinstance(e, HigherOrderFunction):
        coll = _eval(d.children[0], ctx)
        body = d.children[1]
        buf = []
        for item in coll:
            ctx.locals.append(item)
            try:
                r = _eval(body, ctx)
            finally:
                ctx.locals.pop()
            if e.kind is HofKind.MAP:
                buf.append(r)
            elif r is True:
                buf.append(item)
        return buf
    raise TypeError(f"cannot evaluate {e!r}")


# ---------------------------------------------------------------------------
# Closure compilation; same semantics as ``evaluate``, faster per case


def flat_size(d: DagNode) -> int:
    """Nodes visited once per evaluation, not counting anonymous bodies."""
    if isinstance(d.expr, HigherOrderFunction):
        return 1 + flat_size(d.children[0])
    return 1 + sum(flat_size(c) for c in d.children)


class _Env:
    __slots__ = ("inputs", "locals", "printed", "visits", "budget")


def _build(d: DagNode):
    e = d.expr
    if isinstance(e, Constant):
        v = e.value
        return lambda env: v
    if isinstance(e, Input):
        name = e.name
        return lambda env: env.inputs[name]
    if isinstance(e, LocalInput):
        k = e.depth
        return lambda env: env.locals[k]
    if isinstance(e, Operator):
        fn = e.impl
        kids = [_build(c) for c in d.children]
        label = e.display
        prints = e.prints

        if len(kids) == 1 and not prints:
            (k0,) = kids

            def call(env):
                a = k0(env)
                try:
                    return fn(a)
                except Exception as exc:
                    raise EvalError(f"{label}: {type(exc).__name__}: {exc}") from exc

        elif len(kids) == 2 and not prints:
            k0, k1 = kids

            def call(env):
                a = k0(env)
                b = k1(env)
                try:
                    return fn(a, b)
                except Exception as exc:
                    raise EvalError(f"{label}: {type(exc).__name__}: {exc}") from exc

        else:
            def call(env):
                args = [k(env) for k in kids]
                try:
                    out = fn(*args)
                except Exception as exc:
                    raise EvalError(f"{label}: {type(exc).__name__}: {exc}") from exc
                if prints:
                    env.printed.append(to_text(out))
                return out

        return call
    if isinstance(e, HigherOrderFunction):
        coll_f = _build(d.children[0])
        body_f = _build(d.children[1])
        cost = flat_size(d.children[1])
        is_map = e.kind is HofKind.MAP

        def run(env):
            coll = coll_f(env)
            env.visits += cost * len(coll)
            if env.visits > env.budget:
                raise ResourceLimit(f"more than {env.budget} node visits")
            loc = env.locals
            buf = []
            for item in coll:
                loc.append(item)
                try:
                    r = body_f(env)
                finally:
                    loc.pop()
                if is_map:
                    buf.append(r)
                elif r is True:
                    buf.append(item)
            return buf

        return run
    raise TypeError(f"cannot evaluate {e!r}")


class CompiledDag:
    """A DAG turned into nested closures; call with an inputs mapping."""

    def __init__(self, d: DagNode, budget: int = DEFAULT_BUDGET):
        self.dag = d
        self.budget = budget
        self._fn = _build(d)
        self._base = flat_size(d)

    def __call__(self, inputs: Mapping[str, Any]) -> tuple:
        env = _Env()
        env.inputs = inputs
        env.locals = []
        env.printed = []
        env.visits = self._base
        env.budget = self.budget
        if env.visits > env.budget:
            raise ResourceLimit(f"more than {env.budget} node visits")
        result = self._fn(env)
        return result, "".join(env.printed)


# ---------------------------------------------------------------------------
# Debug dump


def dump(d: DagNode, indent: int = 0) -> str:
    """Indented one-node-per-line listing of ``name : return-type``."""
    lines = []
    _dump(d, indent, lines)
    return "\n".join(lines) + "\n"


def _dump(d: DagNode, depth: int, out: list) -> None:
    out.append(f"{'  ' * depth}{d.name} : {d.ret}")
    for c in d.children:
        _dump(c, depth + 1, out)


def is_finite_number(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool) and math.isfinite(x)
