"""Plushy genomes, Push programs and the three-stack DAG compiler.

A Push program is a tuple whose items are expressions or nested tuples.
Compilation keeps three stacks (exec, DAG, anonymous function); the top of
every stack is the end of its list.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping, Optional, Sequence

from cbgp.dagir import DagNode, hof_spec, leaf, local
from cbgp.expr import (
    CLOSE,
    OPEN,
    Constant,
    HigherOrderFunction,
    HofKind,
    Input,
    LocalInput,
    Operator,
    Registry,
    Token,
)
from cbgp.typesys import (
    BOOL,
    TOP,
    RuleInapplicable,
    TypeExpr,
    TypeHierarchy,
    element_type,
    parse_type,
    standard,
)


class CompileFailure(Exception):
    """No DAG on the final stack satisfies the requested return type."""


class GenomeFormatError(ValueError):
    pass


def plushy_to_push(genes: Iterable) -> tuple:
    """Translate a flat genome into a nested Push program.

    OPEN starts a nested block, CLOSE ends the innermost one (a CLOSE with no
    open block is dropped) and blocks still open at the end are closed.
    """
    stack: list = [[]]
    for g in genes:
        if g is OPEN:
            stack.append([])
        elif g is CLOSE:
            if len(stack) > 1:
                block = stack.pop()
                stack[-1].append(tuple(block))
        else:
            stack[-1].append(g)
    while len(stack) > 1:
        block = stack.pop()
        stack[-1].append(tuple(block))
    return tuple(stack[0])


@lru_cache(maxsize=8192)
def _leaf(e):
    return leaf(e)


@dataclass
class CompilerState:
    exec: list
    dag: list = field(default_factory=list)
    anon: list = field(default_factory=list)
    target: TypeExpr = TOP
    local_types: tuple = ()
    h: TypeHierarchy = field(default_factory=standard)
    memo: dict = field(default_factory=dict, repr=False)

    @classmethod
    def load(cls, program: Sequence, target: TypeExpr = TOP, local_types: tuple = (),
             h: Optional[TypeHierarchy] = None, memo: Optional[dict] = None) -> "CompilerState":
        return cls(
            exec=list(reversed(program)),
            target=target,
            local_types=tuple(local_types),
            h=h or standard(),
            memo={} if memo is None else memo,
        )

    def snapshot(self) -> tuple:
        return (tuple(self.exec), tuple(self.dag), tuple(self.anon))


def step(s: CompilerState) -> None:
    """Pop and process the top of the exec stack."""
    item = s.exec.pop()
    if isinstance(item, tuple):
        s.anon.append(item)
    elif isinstance(item, Operator):
        bind_arguments(item, s)
    elif isinstance(item, (Constant, Input)):
        s.dag.append(_leaf(item))
    elif isinstance(item, LocalInput):
        if item.depth < len(s.local_types):
            s.dag.append(local(item.depth, s.local_types[item.depth]))
    elif isinstance(item, HigherOrderFunction):
        compile_hof(item, s)
    else:
        raise TypeError(f"not a compilable item: {item!r}")


def bind_arguments(op: Operator, s: CompilerState) -> bool:
    """Bind ``op``'s arguments from the DAG stack; push the new DAG on success.

    Each argument takes the topmost unused DAG whose return type fits the
    (possibly already reified) expected type.  On failure nothing changes.
    """
    dag = s.dag
    h = s.h
    spec = op.spec
    bound: dict = {}
    used: list = []
    for name, _ in op.spec.args:
        expected = spec.arg_type(name)
        for i in range(len(dag) - 1, -1, -1):
            if i not in used and h.is_subtype(dag[i].spec.ret, expected):
                break
        else:
            return False
        used.append(i)
        bound[name] = dag[i].spec.ret
        try:
            spec = op.reify(spec, bound, h)
        except RuleInapplicable:
            return False
    children = tuple(dag[i] for i in used)
    for i in sorted(used, reverse=True):
        del dag[i]
    dag.append(DagNode(op, spec, children))
    return True


def compile_hof(fn: HigherOrderFunction, s: CompilerState) -> bool:
    """Pair the topmost collection DAG with the first anonymous block that
    compiles to a suitable body; consume both and push the map/filter DAG."""
    h = s.h
    for ci in range(len(s.dag) - 1, -1, -1):
        elem = element_type(s.dag[ci].spec.ret, h)
        if elem is not None:
            break
    else:
        return False
    coll = s.dag[ci]
    body_target = BOOL if fn.kind is HofKind.FILTER else TOP
    inner_locals = s.local_types + (elem,)
    for ai in range(len(s.anon) - 1, -1, -1):
        body = _compile_nested(s.anon[ai], body_target, inner_locals, s)
        if body is not None:
            del s.dag[ci]
            del s.anon[ai]
            s.dag.append(DagNode(fn, hof_spec(fn.kind, coll.spec.ret, body.spec.ret), (coll, body)))
            return True
    return False


def _compile_nested(program: tuple, target, local_types, s: CompilerState) -> Optional[DagNode]:
    key = (id(program), local_types, target)
    if key in s.memo:
        return s.memo[key][1]
    inner = CompilerState.load(program, target, local_types, s.h, s.memo)
    result = _run(inner)
    # keep ``program`` alive so its id cannot be reused within this compile
    s.memo[key] = (program, result)
    return result


def _run(s: CompilerState) -> Optional[DagNode]:
    while s.exec:
        step(s)
    return finish(s)


def finish(s: CompilerState) -> Optional[DagNode]:
    """Pop the DAG stack until a DAG returning a subtype of the target turns up."""
    h = s.h
    while s.dag:
        d = s.dag.pop()
        if h.is_subtype(d.spec.ret, s.target):
            return d
    return None


def compile(
    program: Sequence,
    target: TypeExpr,
    inputs: Sequence = (),
    registry: Optional[Registry] = None,
) -> DagNode:
    """Compile a Push program into a DAG returning a subtype of ``target``.

    ``inputs`` is the program's input spec; it is informational since Input
    genes carry their own types.  Raises CompileFailure.
    """
    h = registry.hierarchy if registry is not None else standard()
    d = _run(CompilerState.load(program, target, (), h))
    if d is None:
        raise CompileFailure(f"no DAG returns a subtype of {target}")
    return d


def compile_genome(genes: Iterable, target: TypeExpr, registry: Optional[Registry] = None) -> DagNode:
    return compile(plushy_to_push(genes), target, registry=registry)


# ---------------------------------------------------------------------------
# Genome text format


def _literal(c: Constant) -> str:
    v = c.value
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


def gene_to_text(g) -> str:
    if isinstance(g, Token):
        return g.value
    if isinstance(g, (Operator, HigherOrderFunction)):
        return g.key
    if isinstance(g, Constant):
        return f"const:{g.type}:{_literal(g)}"
    if isinstance(g, Input):
        return f"input:{g.name}"
    if isinstance(g, LocalInput):
        return f"local:{g.depth}"
    raise TypeError(f"not a gene: {g!r}")


def genome_to_text(genes: Iterable) -> str:
    return "".join(gene_to_text(g) + "\n" for g in genes)


def _parse_literal(type_text: str, lit: str):
    if type_text == "Str":
        v = json.loads(lit)
        if not isinstance(v, str):
            raise ValueError(lit)
        return v
    if type_text == "Float":
        return float(lit)
    if type_text == "Int":
        return int(lit)
    if type_text == "Bool":
        if lit not in ("True", "False"):
            raise ValueError(lit)
        return lit == "True"
    raise ValueError(f"no literal syntax for {type_text}")


def gene_from_text(line: str, registry: Registry, inputs: Mapping[str, TypeExpr]):
    line = line.strip()
    if line in ("OPEN", "CLOSE"):
        return Token(line)
    try:
        if line.startswith("const:"):
            _, type_text, lit = line.split(":", 2)
            return Constant(_parse_literal(type_text, lit), parse_type(type_text))
        if line.startswith("input:"):
            name = line[len("input:"):]
            return Input(name, inputs[name])
        if line.startswith("local:"):
            return LocalInput(int(line[len("local:"):]))
    except (ValueError, KeyError) as exc:
        raise GenomeFormatError(f"bad gene {line!r}: {exc}") from exc
    e = registry.lookup(line)
    if e is None:
        raise GenomeFormatError(f"unknown expression {line!r}")
    return e


def genome_from_text(text: str, registry: Registry, inputs: Mapping[str, TypeExpr]) -> list:
    return [gene_from_text(ln, registry, inputs) for ln in text.splitlines() if ln.strip()]
