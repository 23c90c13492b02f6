"""The core expression library and the benchmark class APIs.

Each entry is a (key, spec, rules) triple around a small host callable.
Callables that can grow values without bound are size-guarded; a guard trip
raises like any other host error and becomes a penalty during evaluation.
"""

from __future__ import annotations

import operator
from datetime import datetime, timedelta

from cbgp.bench.values import PathValue
from cbgp.expr import (
    FILTER,
    MAP,
    Constructor,
    Function,
    Method,
    Registry,
    default_constants,
)
from cbgp.typesys import (
    BOOL,
    COMPARABLE,
    DATETIME,
    FLOAT,
    INT,
    LIST,
    NUMBER,
    PATH,
    STR,
    TIMEDELTA,
    TOP,
    Specification,
    list_of,
    rule,
)

MAX_INT = 2**62
MAX_LEN = 5000


class ValueTooLarge(ArithmeticError):
    pass


def _num(x):
    if type(x) is int and not -MAX_INT <= x <= MAX_INT:
        raise ValueTooLarge("integer out of range")
    return x


def _sized(x):
    if len(x) > MAX_LEN:
        raise ValueTooLarge(f"value of length {len(x)}")
    return x


def _spec(ret, **args) -> Specification:
    return Specification(tuple(args.items()), ret)


def _add(a, b):
    return _num(a + b)


def _sub(a, b):
    return _num(a - b)


def _mul(a, b):
    return _num(a * b)


def _div(a, b):
    return a / b


def _take(lst, n):
    return lst[: max(n, 0)]


def _first(lst):
    return lst[0]


def _last(lst):
    return lst[-1]


def _nth(lst, n):
    return lst[n]


def _reverse(lst):
    return lst[::-1]


def _index_of(lst, x):
    return lst.index(x)


def _is_in(lst, x):
    return x in lst


def _concat(a, b):
    return _sized(a + b)


def _sum(lst):
    return _num(sum(lst))


def _replace(s, old, new, count):
    if old and new and len(new) > len(old):
        n = s.count(old) if count < 0 else min(count, s.count(old))
        if len(s) + n * (len(new) - len(old)) > MAX_LEN:
            raise ValueTooLarge("replace result too long")
    elif not old and new:
        n = len(s) + 1 if count < 0 else min(count, len(s) + 1)
        if len(s) + n * len(new) > MAX_LEN:
            raise ValueTooLarge("replace result too long")
    return s.replace(old, new, count)


def _print_tap(x):
    return x


def register_core_library(r: Registry) -> Registry:
    """Arithmetic, comparison, boolean, string and list expressions plus map/filter."""
    F = Function
    num2 = _spec(NUMBER, a=NUMBER, b=NUMBER)
    for key, fn in (("add", _add), ("sub", _sub), ("mul", _mul), ("min", min), ("max", max)):
        r.register(F(key, fn, num2, (rule("MaxType", "a", "b"),)))
    r.register(F("div", _div, _spec(FLOAT, a=NUMBER, b=NUMBER)))
    r.register(F("abs", abs, _spec(NUMBER, x=NUMBER), (rule("PassThrough", "x"),)))

    cmp2 = _spec(BOOL, a=COMPARABLE, b=COMPARABLE)
    for key, fn in (("lt", operator.lt), ("le", operator.le), ("gt", operator.gt), ("ge", operator.ge)):
        r.register(F(key, fn, cmp2, (rule("ArgsToSame", "a", "b"),)))
    r.register(F("eq", operator.eq, _spec(BOOL, a=TOP, b=TOP), (rule("ArgsToSame", "a", "b"),)))

    r.register(F("and", lambda a, b: a and b, _spec(BOOL, a=BOOL, b=BOOL)))
    r.register(F("or", lambda a, b: a or b, _spec(BOOL, a=BOOL, b=BOOL)))
    r.register(F("not", operator.not_, _spec(BOOL, a=BOOL)))

    r.register(F("bool2int", int, _spec(INT, b=BOOL)))
    r.register(F("float2bool", bool, _spec(BOOL, x=FLOAT)))
    r.register(F("float2int", int, _spec(INT, x=FLOAT)))

    r.register(F("len_str", len, _spec(INT, s=STR), display="len"))
    r.register(F("concat_str", _concat, _spec(STR, a=STR, b=STR),
                 (rule("ArgsToSame", "a", "b"),), display="concat"))
    r.register(Method("replace", _replace, _spec(STR, self=STR, old=STR, new=STR, count=INT)))
    r.register(Method("count", str.count, _spec(INT, self=STR, sub=STR)))
    r.register(Method("split_str", str.split, _spec(list_of(STR), self=STR), display="split"))
    r.register(F("print_tap", _print_tap, _spec(TOP, x=TOP), (rule("PassThrough", "x"),), prints=True))

    r.register(F("len_list", len, _spec(INT, L=LIST), display="len"))
    r.register(F("take", _take, _spec(LIST, L=LIST, N=INT), (rule("PassThrough", "L"),)))
    for key, fn in (("first", _first), ("last", _last)):
        r.register(F(key, fn, _spec(TOP, L=LIST), (rule("ReturnElement", "L"),)))
    r.register(F("nth", _nth, _spec(TOP, L=LIST, n=INT), (rule("ReturnElement", "L"),)))
    r.register(F("reverse", _reverse, _spec(LIST, L=LIST), (rule("PassThrough", "L"),)))
    r.register(F("sorted", sorted, _spec(list_of(COMPARABLE), L=list_of(COMPARABLE)),
                 (rule("PassThrough", "L"),)))
    r.register(F("index_of", _index_of, _spec(INT, L=LIST, x=TOP), (rule("ArgsToElement", "L", "x"),)))
    r.register(F("is_in", _is_in, _spec(BOOL, L=LIST, x=TOP), (rule("ArgsToElement", "L", "x"),)))
    r.register(F("list_of", lambda x: [x], _spec(LIST, x=TOP), (rule("ListOf", "x"),), display="list"))
    r.register(F("concat_list", _concat, _spec(LIST, a=LIST, b=LIST),
                 (rule("ArgsToSame", "a", "b"), rule("PassThrough", "a")), display="concat"))
    r.register(F("sum", _sum, _spec(NUMBER, L=list_of(NUMBER)), (rule("ReturnElement", "L"),)))
    r.register(F("max_list", max, _spec(COMPARABLE, L=list_of(COMPARABLE)),
                 (rule("ReturnElement", "L"),), display="max"))
    r.register(F("min_list", min, _spec(COMPARABLE, L=list_of(COMPARABLE)),
                 (rule("ReturnElement", "L"),), display="min"))

    r.register(MAP)
    r.register(FILTER)
    return r


def register_benchmark_classes(r: Registry) -> Registry:
    """DateTime, TimeDelta and Path methods, the Path constructor, and date arithmetic."""
    for field in ("year", "month", "day", "hour", "minute", "second"):
        r.register(Method(field, operator.attrgetter(field), _spec(INT, self=DATETIME)))
    r.register(Method("days", operator.attrgetter("days"), _spec(INT, self=TIMEDELTA)))
    r.register(Method("seconds", operator.attrgetter("seconds"), _spec(INT, self=TIMEDELTA)))

    r.register(Method("to_str", PathValue.to_str, _spec(STR, self=PATH)))
    r.register(Method("abspath", PathValue.abspath, _spec(PATH, self=PATH)))
    r.register(Method("split_path", PathValue.split, _spec(list_of(STR), self=PATH), display="split"))
    r.register(Method("basename", PathValue.basename, _spec(STR, self=PATH)))
    r.register(Method("dirname", PathValue.dirname, _spec(PATH, self=PATH)))
    r.register(Method("isabs", PathValue.isabs, _spec(BOOL, self=PATH)))
    r.register(Method("join", PathValue.join, _spec(PATH, self=PATH, other=PATH)))
    r.register(Constructor("path", PathValue, _spec(PATH, s=STR), display="Path"))

    F = Function
    r.register(F("add_dt_td", operator.add, _spec(DATETIME, a=DATETIME, b=TIMEDELTA), display="add"))
    r.register(F("sub_dt_td", operator.sub, _spec(DATETIME, a=DATETIME, b=TIMEDELTA), display="sub"))
    r.register(F("sub_dt_dt", operator.sub, _spec(TIMEDELTA, a=DATETIME, b=DATETIME), display="sub"))
    r.register(F("add_td_td", operator.add, _spec(TIMEDELTA, a=TIMEDELTA, b=TIMEDELTA), display="add"))
    r.register(F("sub_td_td", operator.sub, _spec(TIMEDELTA, a=TIMEDELTA, b=TIMEDELTA), display="sub"))
    return r


def standard_registry() -> Registry:
    """Core library, benchmark classes and the default constants pool."""
    r = Registry()
    register_core_library(r)
    register_benchmark_classes(r)
    default_constants(r)
    return r


HOST_TYPES = {
    bool: BOOL,
    int: INT,
    float: FLOAT,
    str: STR,
    datetime: DATETIME,
    timedelta: TIMEDELTA,
    PathValue: PATH,
}
