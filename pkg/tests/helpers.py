"""Random typed values for property tests."""

import random
import string
from datetime import datetime, timedelta

from cbgp.bench.values import PathValue
from cbgp.typesys import (
    BOOL,
    DATETIME,
    FLOAT,
    INT,
    PATH,
    STR,
    TIMEDELTA,
    list_of,
)

SCALAR_TYPES = [BOOL, INT, FLOAT, STR, DATETIME, TIMEDELTA, PATH]
CONCRETE_TYPES = SCALAR_TYPES + [list_of(t) for t in (BOOL, INT, FLOAT, STR)] + [list_of(list_of(INT))]


def random_value(t, rng: random.Random):
    if t == BOOL:
        return rng.random() < 0.5
    if t == INT:
        return rng.randint(-20, 20)
    if t == FLOAT:
        return rng.uniform(-20, 20)
    if t == STR:
        return "".join(rng.choice(string.ascii_lowercase + " ") for _ in range(rng.randint(0, 6)))
    if t == DATETIME:
        return datetime(2000, 1, 1) + timedelta(seconds=rng.randint(0, 10**9))
    if t == TIMEDELTA:
        return timedelta(seconds=rng.randint(-10**7, 10**7))
    if t == PATH:
        return PathValue("/".join(rng.choice(["a", "b", "..", "."]) for _ in range(rng.randint(1, 3))))
    if getattr(t, "ctor", None) == "List":
        return [random_value(t.params[0], rng) for _ in range(rng.randint(0, 5))]
    raise ValueError(t)
