"""Benchmark problems: signatures, case generators and error functions."""

from __future__ import annotations

import json
import math
import random
import string
from dataclasses import dataclass
from datetime import datetime, timedelta
from typing import Any, Callable, Optional

from cbgp.bench.values import PathValue
from cbgp.expr import Input
from cbgp.typesys import (
    BOOL,
    COMPARABLE,
    DATETIME,
    FLOAT,
    INT,
    PATH,
    STR,
    TOP,
    TypeExpr,
    Var,
    list_of,
)

PENALTY = 1_000_000.0
N_TRAIN = 100
N_TEST = 1000


@dataclass(frozen=True)
class Case:
    inputs: dict
    expected: Any


@dataclass
class Problem:
    name: str
    function_name: str
    inputs: tuple  # of (name, TypeExpr)
    return_type: TypeExpr
    sample: Callable[[random.Random], dict]
    oracle: Callable[..., Any]
    case_error: Callable[[Any, str, Any], float]
    edge_cases: tuple = ()
    n_train: int = N_TRAIN
    n_test: int = N_TEST

    @property
    def input_names(self) -> list:
        return [n for n, _ in self.inputs]

    @property
    def input_types(self) -> dict:
        return dict(self.inputs)

    def input_genes(self) -> list:
        return [Input(n, t) for n, t in self.inputs]

    def case(self, inputs: dict) -> Case:
        return Case(inputs, self.oracle(**inputs))

    def generate(self, seed: int, n_train: Optional[int] = None,
                 n_test: Optional[int] = None) -> tuple:
        """Training and test cases; independent random streams per split."""
        n_train = self.n_train if n_train is None else n_train
        n_test = self.n_test if n_test is None else n_test
        tr = random.Random(f"{self.name}:{seed}:train")
        te = random.Random(f"{self.name}:{seed}:test")
        edges = [self.case(dict(e)) for e in self.edge_cases][:n_train]
        train = edges + [self.case(self.sample(tr)) for _ in range(n_train - len(edges))]
        test = [self.case(self.sample(te)) for _ in range(n_test)]
        return train, test


# ---------------------------------------------------------------------------
# Error helpers


def edit_distance(a, b) -> int:
    """Unit-cost Levenshtein distance between two sequences."""
    i = 0
    n, m = len(a), len(b)
    while i < n and i < m and a[i] == b[i]:
        i += 1
    while n > i and m > i and a[n - 1] == b[m - 1]:
        n -= 1
        m -= 1
    a = a[i:n]
    b = b[i:m]
    if not a:
        return len(b)
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for x_i, x in enumerate(a, 1):
        cur = [x_i]
        for y_j, y in enumerate(b, 1):
            cur.append(min(prev[y_j] + 1, cur[y_j - 1] + 1, prev[y_j - 1] + (x != y)))
        prev = cur
    return prev[-1]


def _is_int(x) -> bool:
    return type(x) is int


def _is_real(x) -> bool:
    return type(x) in (int, float) and math.isfinite(x)


def int_error(result, printed, expected) -> float:
    if not _is_int(result):
        return PENALTY
    return min(float(abs(result - expected)), PENALTY)


def list_error(result, printed, expected) -> float:
    if not isinstance(result, list):
        return PENALTY
    return float(edit_distance(result, expected))


def bool_error(result, printed, expected) -> float:
    if type(result) is not bool:
        return PENALTY
    return 0.0 if result == expected else 1.0


def make_real_error(tolerance: float) -> Callable:
    def real_error(result, printed, expected) -> float:
        if not _is_real(result):
            return PENALTY
        d = abs(result - expected)
        return 0.0 if d < tolerance else min(d, PENALTY)

    return real_error


def printed_number_error(result, printed, expected) -> float:
    try:
        value = float(printed)
    except ValueError:
        return PENALTY
    if not math.isfinite(value):
        return PENALTY
    return min(abs(value - expected), PENALTY)


def printed_text_and_count_error(result, printed, expected) -> float:
    text, count = expected
    if not _is_int(result):
        return PENALTY
    return min(float(edit_distance(printed, text) + abs(result - count)), PENALTY)


# ---------------------------------------------------------------------------
# Samplers

EPOCH_START = datetime(1970, 1, 1)
EPOCH_SPAN = int((datetime(2031, 1, 1) - EPOCH_START).total_seconds())
PRINTABLE = string.ascii_letters + string.digits + string.punctuation


def _rand_datetime(rng: random.Random) -> datetime:
    return EPOCH_START + timedelta(seconds=rng.randrange(EPOCH_SPAN))


def _rand_int(rng):
    return rng.randint(-100, 100)


def _rand_float(rng):
    return rng.uniform(-100.0, 100.0)


def _rand_word(rng, lo=1, hi=3, alphabet=string.ascii_lowercase):
    return "".join(rng.choice(alphabet) for _ in range(rng.randint(lo, hi)))


def _rand_text(rng, lo=0, hi=20, space_rate=0.2):
    return "".join(" " if rng.random() < space_rate else rng.choice(PRINTABLE)
                   for _ in range(rng.randint(lo, hi)))


# ---------------------------------------------------------------------------
# Problems


def make_days_between() -> Problem:
    def sample(rng):
        dt1 = _rand_datetime(rng)
        r = rng.random()
        if r < 0.1:
            dt2 = dt1
        elif r < 0.3:
            dt2 = dt1 + timedelta(seconds=rng.randint(-5 * 86400, 5 * 86400))
        else:
            dt2 = _rand_datetime(rng)
        return {"dt1": dt1, "dt2": dt2}

    def oracle(dt1, dt2):
        return abs((dt1 - dt2).days)

    d0 = datetime(2020, 3, 1)
    edges = (
        {"dt1": d0, "dt2": d0},
        {"dt1": datetime(2020, 3, 5), "dt2": d0},
        {"dt1": d0, "dt2": datetime(2020, 3, 5)},
        {"dt1": datetime(2000, 2, 28, 23, 0), "dt2": datetime(2000, 3, 1, 1, 0)},
    )
    return Problem("days-between", "days_between", (("dt1", DATETIME), ("dt2", DATETIME)),
                   INT, sample, oracle, int_error, edges)


T = Var("T", COMPARABLE)


def make_filter_bounds() -> Problem:
    def sample(rng):
        family = rng.randrange(3)
        draw = (_rand_int, _rand_float, _rand_word)[family]
        lst = [draw(rng) for _ in range(rng.randint(0, 50))]
        if lst and rng.random() < 0.5:
            # bounds equal to elements exercise the inclusive comparisons
            a, b = rng.choice(lst), rng.choice(lst)
        else:
            a, b = draw(rng), draw(rng)
        if rng.random() < 0.9:
            a, b = min(a, b), max(a, b)
        return {"lst": lst, "lower": a, "upper": b}

    def oracle(lst, lower, upper):
        return [x for x in lst if lower <= x <= upper]

    edges = (
        {"lst": [6, 5, 4, 3, 2, 1], "lower": 3, "upper": 5},
        {"lst": ["a", "b", "c"], "lower": "x", "upper": "zzz"},
        {"lst": [], "lower": 0, "upper": 10},
        {"lst": [1.5, -2.0, 3.25], "lower": -2.0, "upper": 1.5},
    )
    return Problem("filter-bounds", "filter_bounds",
                   (("lst", list_of(T)), ("lower", T), ("upper", T)),
                   list_of(T), sample, oracle, list_error, edges)


def _rand_root(rng) -> PathValue:
    parts = [_rand_word(rng, 1, 6) for _ in range(rng.randint(1, 3))]
    text = "/".join(parts)
    return PathValue("/" + text if rng.random() < 0.5 else text)


def _rand_filename(rng) -> str:
    return _rand_word(rng, 1, 8, string.ascii_lowercase + "_") + rng.choice(
        ("", ".txt", ".csv", ".py", ".log"))


def make_prefix_paths() -> Problem:
    def sample(rng):
        return {"root": _rand_root(rng),
                "filenames": [_rand_filename(rng) for _ in range(rng.randint(0, 10))]}

    def oracle(root, filenames):
        return [root.join(PathValue(f)) for f in filenames]

    edges = (
        {"root": PathValue("/tmp"), "filenames": ["log.txt", "data.csv"]},
        {"root": PathValue("a/b"), "filenames": ["c"]},
        {"root": PathValue("/"), "filenames": []},
    )
    return Problem("prefix-paths", "prefix_files", (("root", PATH), ("filenames", list_of(STR))),
                   list_of(PATH), sample, oracle, list_error, edges)


def make_number_io() -> Problem:
    def sample(rng):
        return {"input1": _rand_float(rng), "input2": _rand_int(rng)}

    def oracle(input1, input2):
        return input1 + input2

    return Problem("number-io", "number_io", (("input1", FLOAT), ("input2", INT)),
                   TOP, sample, oracle, printed_number_error)


def make_median() -> Problem:
    def sample(rng):
        xs = [_rand_int(rng) for _ in range(3)]
        if rng.random() < 0.2:
            xs[rng.randrange(3)] = xs[rng.randrange(3)]
        return dict(zip(("input1", "input2", "input3"), xs))

    def oracle(input1, input2, input3):
        return sorted((input1, input2, input3))[1]

    edges = ({"input1": 1, "input2": 5, "input3": 3}, {"input1": 0, "input2": 0, "input3": 0},
             {"input1": -100, "input2": 100, "input3": 100})
    return Problem("median", "median", tuple((f"input{i}", INT) for i in (1, 2, 3)),
                   INT, sample, oracle, int_error, edges)


def make_smallest() -> Problem:
    def sample(rng):
        return {f"input{i}": _rand_int(rng) for i in (1, 2, 3, 4)}

    def oracle(input1, input2, input3, input4):
        return min(input1, input2, input3, input4)

    edges = ({"input1": 4, "input2": 4, "input3": 4, "input4": 4},
             {"input1": 5, "input2": 1, "input3": 9, "input4": -3})
    return Problem("smallest", "smallest", tuple((f"input{i}", INT) for i in (1, 2, 3, 4)),
                   INT, sample, oracle, int_error, edges)


def make_negative_to_zero() -> Problem:
    def sample(rng):
        return {"input1": [_rand_int(rng) for _ in range(rng.randint(0, 50))]}

    def oracle(input1):
        return [0 if x < 0 else x for x in input1]

    edges = ({"input1": []}, {"input1": [-1, 0, 2]}, {"input1": [-5]}, {"input1": [7]})
    return Problem("negative-to-zero", "negative_to_zero", (("input1", list_of(INT)),),
                   list_of(INT), sample, oracle, list_error, edges)


VECTOR_AVERAGE_TOLERANCE = 1e-4


def make_vector_average() -> Problem:
    def sample(rng):
        return {"input1": [_rand_float(rng) for _ in range(rng.randint(1, 50))]}

    def oracle(input1):
        return math.fsum(input1) / len(input1)

    edges = ({"input1": [0.0]}, {"input1": [1.0, 2.0]}, {"input1": [-100.0, 100.0, 3.5]})
    return Problem("vector-average", "vector_average", (("input1", list_of(FLOAT)),),
                   FLOAT, sample, oracle, make_real_error(VECTOR_AVERAGE_TOLERANCE), edges)


def make_compare_string_lengths() -> Problem:
    def sample(rng):
        if rng.random() < 0.5:
            lens = sorted(rng.sample(range(21), 3))
        else:
            lens = [rng.randint(0, 20) for _ in range(3)]
        return {f"input{i + 1}": _rand_text(rng, n, n, 0.1) for i, n in enumerate(lens)}

    def oracle(input1, input2, input3):
        return len(input1) < len(input2) < len(input3)

    edges = ({"input1": "", "input2": "a", "input3": "ab"},
             {"input1": "abc", "input2": "abc", "input3": "abcd"},
             {"input1": "", "input2": "", "input3": ""})
    return Problem("compare-string-lengths", "compare_string_lengths",
                   tuple((f"input{i}", STR) for i in (1, 2, 3)),
                   BOOL, sample, oracle, bool_error, edges)


def make_replace_space_with_newline() -> Problem:
    def sample(rng):
        return {"input1": _rand_text(rng, 0, 20, 0.2)}

    def oracle(input1):
        return input1.replace(" ", "\n"), len(input1) - input1.count(" ")

    edges = ({"input1": ""}, {"input1": " "}, {"input1": "a b"}, {"input1": "  hi  "})
    return Problem("replace-space-with-newline", "replace_space_with_newline",
                   (("input1", STR),), INT, sample, oracle, printed_text_and_count_error, edges)


def make_first_three() -> Problem:
    def sample(rng):
        return {"MyList": [_rand_word(rng, 1, 4) for _ in range(rng.randint(0, 10))]}

    def oracle(MyList):
        return MyList[:3]

    return Problem("first-three", "first_three", (("MyList", list_of(STR)),),
                   list_of(STR), sample, oracle, list_error, ({"MyList": []},))


def make_psb_subset() -> list:
    return [
        make_number_io(),
        make_median(),
        make_smallest(),
        make_negative_to_zero(),
        make_vector_average(),
        make_compare_string_lengths(),
        make_replace_space_with_newline(),
    ]


def all_problems() -> dict:
    probs = [make_days_between(), make_filter_bounds(), make_prefix_paths(),
             *make_psb_subset(), make_first_three()]
    return {p.name: p for p in probs}


def get_problem(name: str) -> Problem:
    probs = all_problems()
    if name not in probs:
        raise KeyError(f"unknown problem {name!r}; known: {', '.join(sorted(probs))}")
    return probs[name]


# ---------------------------------------------------------------------------
# Case export


def encode_value(v):
    if isinstance(v, (bool, int, str)) or v is None:
        return v
    if isinstance(v, float):
        return v if math.isfinite(v) else {"Float": repr(v)}
    if isinstance(v, datetime):
        return {"DateTime": v.isoformat()}
    if isinstance(v, timedelta):
        return {"TimeDelta": [v.days, v.seconds]}
    if isinstance(v, PathValue):
        return {"Path": v.text}
    if isinstance(v, (list, tuple)):
        return [encode_value(x) for x in v]
    raise TypeError(f"cannot encode {v!r}")


def cases_to_jsonl(cases) -> str:
    return "".join(
        json.dumps({"inputs": {k: encode_value(v) for k, v in c.inputs.items()},
                    "expected": encode_value(c.expected)}, sort_keys=True) + "\n"
        for c in cases
    )
