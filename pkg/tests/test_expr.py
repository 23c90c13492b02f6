import math
import random
from collections import Counter

import pytest

from cbgp.dagir import conforms
from cbgp.expr import (
    CATEGORIES,
    CLOSE,
    OPEN,
    Constant,
    DuplicateName,
    Function,
    GeneSource,
    GeneWeights,
    Input,
    Method,
    Operator,
    Registry,
    bind,
    gene_category,
    random_gene,
)
from cbgp.library import standard_registry
from cbgp.typesys import INT, LIST, STR, Nominal, RuleInapplicable, Specification, UnknownType, list_of

from helpers import CONCRETE_TYPES, random_value


def test_lookup_examples(registry):
    take = registry.lookup("Take")
    assert take is not None and isinstance(take, Function)
    assert take.arity == 2
    assert registry.lookup("Min").spec.args[0][1] == registry.lookup("min").spec.args[0][1]
    assert registry.lookup("no_such") is None
    assert isinstance(registry.lookup("join"), Method)
    assert isinstance(registry.lookup("days"), Method)


def test_overloads_share_display_names(registry):
    assert {e.key for e in registry.by_display("len")} == {"len_str", "len_list"}
    assert {e.key for e in registry.by_display("sub")} >= {"sub", "sub_dt_dt", "sub_dt_td"}


def test_duplicate_names_rejected(registry):
    r = Registry()
    spec = Specification((("x", INT),), INT)
    r.register(Function("twice", lambda x: 2 * x, spec))
    with pytest.raises(DuplicateName):
        r.register(Function("Twice", lambda x: 2 * x, spec))


def test_unknown_type_rejected():
    r = Registry()
    with pytest.raises(UnknownType):
        r.register(Function("bad", abs, Specification((("x", Nominal("Nope")),), INT)))


def test_rules_must_name_arguments():
    from cbgp.typesys import rule
    with pytest.raises(ValueError):
        Function("bad", abs, Specification((("x", INT),), INT), (rule("PassThrough", "y"),))


def test_method_needs_receiver():
    with pytest.raises(ValueError):
        Method("m", lambda: 1, Specification((), INT))


def test_manifest_lists_every_expression(registry):
    lines = registry.manifest().splitlines()
    assert len(lines) == len(registry)
    assert any(ln.startswith("take\tFunction\ttake\t(L: List, N: Int) -> List\tPassThrough(L)") for ln in lines)


def test_bind_reifies_incrementally(registry, h):
    take = registry["take"]
    assert bind(take, [list_of(STR), INT], h).ret == list_of(STR)
    assert bind(take, [INT, INT], h) is None
    assert bind(take, [LIST], h) is None


# -- random genes -------------------------------------------------------------

def test_random_gene_is_deterministic(registry):
    a = [random_gene(registry, random.Random(5)) for _ in range(3)]
    b = [random_gene(registry, random.Random(5)) for _ in range(3)]
    assert a == b


def test_degenerate_weights(registry):
    rng = random.Random(1)
    only_open = GeneWeights(expression=0, constant=0, input=0, local=0, open=1, close=0)
    assert all(random_gene(registry, rng, weights=only_open) is OPEN for _ in range(200))
    only_expr = GeneWeights(expression=1, constant=0, input=0, local=0, open=0, close=0)
    assert all(gene_category(random_gene(registry, rng, weights=only_expr)) == "expression"
               for _ in range(200))


def test_zero_available_weight_is_an_error(registry):
    w = GeneWeights(expression=0, constant=0, input=1, local=0, open=0, close=0)
    with pytest.raises(ValueError):
        GeneSource(registry, (), w)


def test_unavailable_categories_are_dropped(registry):
    src = GeneSource(registry, ())
    assert "input" not in src.categories
    rng = random.Random(0)
    assert all(gene_category(src.draw(rng)) != "input" for _ in range(500))


def test_category_frequencies_within_three_sigma(registry):
    inputs = [Input("x", INT)]
    w = GeneWeights()
    src = GeneSource(registry, inputs, w)
    rng = random.Random(2024)
    n = 10_000
    counts = Counter(gene_category(src.draw(rng)) for _ in range(n))
    total = sum(w.as_tuple())
    for c in CATEGORIES:
        p = getattr(w, c) / total
        sigma = math.sqrt(n * p * (1 - p))
        assert abs(counts[c] - n * p) <= 3 * sigma, (c, counts[c], n * p)


def test_ephemeral_float_constants(registry):
    src = GeneSource(registry, (), GeneWeights(expression=0, constant=1, input=0, local=0, open=0, close=0))
    rng = random.Random(3)
    genes = [src.draw(rng) for _ in range(2000)]
    floats = [g for g in genes if isinstance(g, Constant) and isinstance(g.value, float)]
    assert floats and all(-1 <= g.value <= 1 for g in floats)
    assert {g.value for g in genes if isinstance(g, Constant)} >= {0, "", True}


def test_gene_category_rejects_non_genes():
    with pytest.raises(TypeError):
        gene_category(42)
    assert gene_category(CLOSE) == "close"


# -- runtime type soundness ----------------------------------------------------

def _random_binding(op, h, rng):
    """Pick concrete argument types one at a time, reifying after each."""
    spec = op.spec
    bound = {}
    for name, _ in op.spec.args:
        options = [t for t in CONCRETE_TYPES if h.is_subtype(t, spec.arg_type(name))]
        if not options:
            return None
        bound[name] = rng.choice(options)
        try:
            spec = op.reify(op.spec, bound, h)
        except RuleInapplicable:
            return None
    return list(bound.values()), spec


RULE_BEARING = [e.key for e in standard_registry() if isinstance(e, Operator) and e.rules]


@pytest.mark.parametrize("key", RULE_BEARING)
def test_reified_return_type_is_sound(registry, h, key):
    op = registry[key]
    rng = random.Random(f"sound:{key}")
    checked = 0
    for _ in range(1000):
        picked = _random_binding(op, h, rng)
        if picked is None:
            continue
        types, spec = picked
        args = [random_value(t, rng) for t in types]
        try:
            out = op.impl(*args)
        except Exception:
            continue
        assert conforms(out, spec.ret, h), (key, types, args, out, spec.ret)
        checked += 1
    assert checked > 50
