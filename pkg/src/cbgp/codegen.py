"""Render program DAGs as Python-style function source, and read it back."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Sequence

from cbgp.dagir import DagNode, TypeCheckError, apply, diagnose, hof, leaf, local
from cbgp.expr import (
    FILTER,
    MAP,
    Constant,
    Constructor,
    Function,
    HigherOrderFunction,
    Input,
    LocalInput,
    Method,
    Operator,
    Registry,
)
from cbgp.typesys import BOOL, FLOAT, INT, STR, element_type


class UnnamedExpression(ValueError):
    pass


class ParseError(ValueError):
    def __init__(self, msg: str, pos: int):
        super().__init__(f"{msg} at position {pos}")
        self.pos = pos


@dataclass(frozen=True)
class SourceUnit:
    function_name: str
    params: tuple
    body: str

    @property
    def text(self) -> str:
        return f"def {self.function_name}({', '.join(self.params)}):\n    return {self.body}\n"

    def __str__(self):
        return self.text


def literal(v) -> str:
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


def render(d: DagNode, depth: int = 0) -> str:
    """Expression text for one DAG; ``depth`` is the enclosing lambda count."""
    e = d.expr
    if isinstance(e, Constant):
        return literal(e.value)
    if isinstance(e, Input):
        return e.name
    if isinstance(e, LocalInput):
        return f"_{e.depth}"
    if isinstance(e, HigherOrderFunction):
        coll, body = d.children
        return f"{e.name}(lambda _{depth}: {render(body, depth + 1)}, {render(coll, depth)})"
    if isinstance(e, Operator):
        if not e.display:
            raise UnnamedExpression(repr(e))
        args = [render(c, depth) for c in d.children]
        if isinstance(e, Method):
            return f"{args[0]}.{e.display}({', '.join(args[1:])})"
        return f"{e.display}({', '.join(args)})"
    raise UnnamedExpression(repr(e))


def emit(d: DagNode, prob) -> SourceUnit:
    """``prob`` supplies ``function_name`` and the ordered ``inputs``."""
    return SourceUnit(prob.function_name, tuple(n for n, _ in prob.inputs), render(d))


def emit_function(d: DagNode, name: str, params: Sequence[str]) -> SourceUnit:
    return SourceUnit(name, tuple(params), render(d))


# ---------------------------------------------------------------------------
# Parsing

_TOKENS = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>-?\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|-?inf|nan)
  | (?P<str>"(?:\\.|[^"\\])*")
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<punct>[(),.:])
    """,
    re.VERBOSE,
)


def _tokenize(text: str) -> list:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKENS.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "ws":
            out.append((kind, m.group(), pos))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


# Syntax tree: ("lit", value, pos) | ("name", id, pos) | ("call", name, args, pos)
#              | ("method", recv, name, args, pos) | ("lambda", param, body, pos)


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self, kind=None, value=None):
        tok = self.toks[self.i]
        if (kind and tok[0] != kind) or (value is not None and tok[1] != value):
            want = value or kind
            raise ParseError(f"expected {want!r}, found {tok[1] or 'end of input'!r}", tok[2])
        self.i += 1
        return tok

    def unit(self):
        self.take("name", "def")
        name = self.take("name")[1]
        self.take("punct", "(")
        params = []
        if self.peek()[1] != ")":
            params.append(self.take("name")[1])
            while self.peek()[1] == ",":
                self.take()
                params.append(self.take("name")[1])
        self.take("punct", ")")
        self.take("punct", ":")
        self.take("name", "return")
        body = self.expr()
        self.take("end")
        return name, params, body

    def expr(self):
        tok = self.peek()
        if tok[0] == "name" and tok[1] == "lambda":
            self.take()
            param = self.take("name")[1]
            self.take("punct", ":")
            return ("lambda", param, self.expr(), tok[2])
        node = self.atom()
        while self.peek()[1] == ".":
            self.take()
            name, pos = self.take("name")[1:]
            node = ("method", node, name, self.args(), pos)
        return node

    def args(self):
        self.take("punct", "(")
        out = []
        if self.peek()[1] != ")":
            out.append(self.expr())
            while self.peek()[1] == ",":
                self.take()
                out.append(self.expr())
        self.take("punct", ")")
        return out

    def atom(self):
        kind, text, pos = self.take()
        if kind == "num":
            if re.fullmatch(r"-?\d+", text):
                return ("lit", int(text), pos)
            return ("lit", float(text), pos)
        if kind == "str":
            return ("lit", json.loads(text), pos)
        if kind == "name":
            if text in ("True", "False"):
                return ("lit", text == "True", pos)
            if self.peek()[1] == "(":
                return ("call", text, self.args(), pos)
            return ("name", text, pos)
        if kind == "punct" and text == "(":
            node = self.expr()
            self.take("punct", ")")
            return node
        raise ParseError(f"unexpected {text or 'end of input'!r}", pos)


_LIT_TYPES = {bool: BOOL, int: INT, float: FLOAT, str: STR}


def parse_unit(text: str) -> tuple:
    """Parse ``def f(a, b):\\n    return <expr>`` into (name, params, syntax tree)."""
    return _Parser(text).unit()


def parse_and_check(src, prob, registry: Registry) -> DagNode:
    """Rebuild a typed DAG from emitted source.

    Raises ParseError for malformed text and TypeCheckError when the text is
    well-formed but does not describe a valid DAG for ``prob``.
    """
    text = src.text if isinstance(src, SourceUnit) else src
    name, params, tree = parse_unit(text)
    expected = [n for n, _ in prob.inputs]
    if params != expected:
        raise TypeCheckError(f"parameters {params} do not match problem inputs {expected}")
    h = registry.hierarchy
    inputs = {n: Input(n, t) for n, t in prob.inputs}
    d = _check(tree, inputs, [], registry)
    problem = diagnose(d, h)
    if problem:
        raise TypeCheckError(problem)
    if not h.is_subtype(d.ret, prob.return_type):
        raise TypeCheckError(f"program returns {d.ret}, expected {prob.return_type}")
    return d


def _check(node, inputs: dict, scope: list, registry: Registry) -> DagNode:
    """``scope`` lists (param name, element type) for enclosing lambdas."""
    h = registry.hierarchy
    kind = node[0]
    if kind == "lit":
        v = node[1]
        return leaf(Constant(v, _LIT_TYPES[type(v)]))
    if kind == "name":
        ident = node[1]
        for depth in range(len(scope) - 1, -1, -1):
            if scope[depth][0] == ident:
                return local(depth, scope[depth][1])
        if ident in inputs:
            return leaf(inputs[ident])
        raise TypeCheckError(f"unknown name {ident!r} at position {node[2]}")
    if kind == "lambda":
        raise TypeCheckError(f"lambda outside map/filter at position {node[3]}")
    if kind == "call" and node[1] in ("map", "filter"):
        _, fname, args, pos = node
        if len(args) != 2 or args[0][0] != "lambda":
            raise TypeCheckError(f"{fname} takes (lambda, collection) at position {pos}")
        _, param, body, lpos = args[0]
        if param != f"_{len(scope)}":
            raise TypeCheckError(f"lambda parameter {param!r} should be _{len(scope)} at {lpos}")
        coll = _check(args[1], inputs, scope, registry)
        elem = element_type(coll.ret, h)
        if elem is None:
            raise TypeCheckError(f"{fname} over non-collection {coll.ret} at position {pos}")
        body_dag = _check(body, inputs, scope + [(param, elem)], registry)
        return hof(MAP if fname == "map" else FILTER, coll, body_dag, h)
    if kind == "call":
        _, fname, args, pos = node
        children = [_check(a, inputs, scope, registry) for a in args]
        kinds = (Function, Constructor)
    elif kind == "method":
        _, recv, fname, args, pos = node
        children = [_check(recv, inputs, scope, registry)] + [
            _check(a, inputs, scope, registry) for a in args]
        kinds = (Method,)
    else:
        raise AssertionError(kind)
    candidates = [e for e in registry.by_display(fname)
                  if isinstance(e, kinds) and e.arity == len(children)]
    for op in candidates:
        try:
            return apply(op, children, h)
        except TypeCheckError:
            continue
    got = ", ".join(str(c.ret) for c in children)
    raise TypeCheckError(f"no {fname} accepts ({got}) at position {pos}")
