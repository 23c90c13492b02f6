import random

import pytest
from hypothesis import given, strategies as st

from cbgp.bench import get_problem
from cbgp.dagir import diagnose, evaluate
from cbgp.expr import CLOSE, FILTER, MAP, OPEN, Constant, GeneSource, HigherOrderFunction, Input, LocalInput, Operator
from cbgp.pushc import (
    CompileFailure,
    CompilerState,
    GenomeFormatError,
    compile,
    finish,
    genome_from_text,
    genome_to_text,
    plushy_to_push,
    step,
)
from cbgp.typesys import COMPARABLE, FLOAT, INT, LIST, PATH, STR, Var, list_of

MYLIST = Input("MyList", list_of(STR))
THREE = Constant(3, INT)


def sexpr(d):
    if not d.children:
        return d.name
    return f"{d.name}({','.join(sexpr(c) for c in d.children)})"


def trace(program, target, h, local_types=()):
    """Run the compiler step by step; return the dag/anon stacks after each step."""
    s = CompilerState.load(program, target, local_types, h)
    out = []
    while s.exec:
        step(s)
        out.append(([sexpr(d) for d in s.dag], len(s.anon)))
    return s, out


# -- plushy translation -------------------------------------------------------------

def bracket_oracle(genes):
    """Independent reference: recursive descent over an index."""
    def block(i, depth):
        items = []
        while i < len(genes):
            g = genes[i]
            i += 1
            if g is OPEN:
                inner, i = block(i, depth + 1)
                items.append(inner)
            elif g is CLOSE:
                if depth > 0:
                    return tuple(items), i
            else:
                items.append(g)
        return tuple(items), i
    return block(0, 0)[0]


def test_plushy_examples():
    a, b, c = "A", "B", "C"
    assert plushy_to_push([a, OPEN, b, CLOSE, c]) == (a, (b,), c)
    assert plushy_to_push([CLOSE, a]) == (a,)
    assert plushy_to_push([a, OPEN, b]) == (a, (b,))
    assert plushy_to_push([]) == ()
    assert plushy_to_push([OPEN, OPEN]) == (((),),)


@given(st.lists(st.sampled_from(["A", "B", OPEN, CLOSE]), max_size=40))
def test_plushy_matches_bracket_oracle(genes):
    assert plushy_to_push(genes) == bracket_oracle(genes)


# -- compile examples -------------------------------------------------------------------

def test_first_three_trace(registry, h):
    program = (MYLIST, MYLIST, registry["len_list"], THREE, registry["min"], registry["take"])
    s, steps = trace(program, list_of(STR), h)
    assert steps == [
        (["MyList"], 0),
        (["MyList", "MyList"], 0),
        (["MyList", "Len(MyList)"], 0),
        (["MyList", "Len(MyList)", "3"], 0),
        (["MyList", "Min(3,Len(MyList))"], 0),
        (["Take(MyList,Min(3,Len(MyList)))"], 0),
    ]
    d = compile(program, list_of(STR), (("MyList", list_of(STR)),), registry)
    assert d.ret == list_of(STR)
    assert d.children[1].ret == INT
    assert diagnose(d, h) is None
    rng = random.Random(11)
    for _ in range(100):
        xs = [rng.choice("abcxyz") for _ in range(rng.randint(0, 8))]
        assert evaluate(d, {"MyList": xs})[0] == xs[:min(3, len(xs))]


def test_leaf_program(registry):
    d = compile((THREE,), INT, (), registry)
    assert d.expr == THREE and not d.children


def test_unsatisfiable_program(registry):
    with pytest.raises(CompileFailure):
        compile((THREE, registry["take"]), LIST, (), registry)
    with pytest.raises(CompileFailure):
        compile((), INT, (), registry)


def test_final_pop_skips_wrong_types(registry):
    d = compile((Constant("x", STR), THREE), STR, (), registry)
    assert d.expr.value == "x"


def test_top_level_local_input_is_ignored(registry, h):
    s, steps = trace((LocalInput(0), THREE), INT, h)
    assert steps == [([], 0), (["3"], 0)]


def test_discard_restores_stacks(registry, h):
    s, steps = trace((Constant("a", STR), registry["add"]), INT, h)
    assert steps == [(["'a'"], 0), (["'a'"], 0)]
    # partial binding: L binds MyList but N finds nothing, so MyList stays put
    s, steps = trace((MYLIST, registry["take"]), LIST, h)
    assert steps[-1] == (["MyList"], 0)


def test_skipping_non_matching_entries(registry, h):
    s, steps = trace((THREE, Constant("a", STR), registry["len_str"]), INT, h)
    assert steps[-1] == (["3", "Len('a')"], 0)


def test_min_binds_top_first(registry, h):
    s = CompilerState.load((MYLIST, registry["len_list"], THREE, registry["min"]), INT, (), h)
    while s.exec:
        step(s)
    (d,) = s.dag
    assert sexpr(d) == "Min(3,Len(MyList))" and d.ret == INT


# -- higher-order functions ------------------------------------------------------------

def test_filter_bounds_body(registry, h):
    t = Var("T", COMPARABLE)
    lst, lo, hi = Input("lst", list_of(t)), Input("lower", t), Input("upper", t)
    body = (hi, LocalInput(0), registry["le"], lo, LocalInput(0), registry["ge"], registry["and"])
    s, steps = trace((lst, body, FILTER), list_of(t), h)
    assert steps[1] == (["lst"], 1)
    assert steps[2] == (["Filter(lst,And(Ge(_0,lower),Le(_0,upper)))"], 0)
    d = s.dag[0]
    assert d.ret == list_of(t)
    assert diagnose(d, h) is None
    assert evaluate(d, {"lst": [6, 5, 4, 3, 2, 1], "lower": 3, "upper": 5})[0] == [5, 4, 3]


def test_map_prefix_body(registry, h):
    root, names = Input("root", PATH), Input("filenames", list_of(STR))
    body = (LocalInput(0), registry["path"], root, registry["join"])
    d = compile((names, body, MAP), list_of(PATH), (), registry)
    assert sexpr(d) == "Map(filenames,Join(root,Path(_0)))"
    assert d.ret == list_of(PATH)


def test_hof_without_collection_is_discarded(registry, h):
    s, steps = trace(((THREE,), MAP), LIST, h)
    assert steps == [([], 1), ([], 1)]


def test_filter_needs_a_predicate_body(registry, h):
    lst = Input("L", list_of(INT))
    s, steps = trace((lst, (THREE,), FILTER), LIST, h)
    assert steps[-1] == (["L"], 1)
    # map accepts any body type
    s, steps = trace((lst, (THREE,), MAP), LIST, h)
    assert steps[-1] == (["Map(L,3)"], 0)
    assert s.dag[0].ret == list_of(INT)


def test_hof_tries_anon_blocks_top_down(registry, h):
    lst = Input("L", list_of(INT))
    good = (LocalInput(0), THREE, registry["lt"])
    bad = (Constant("x", STR),)
    s, steps = trace((lst, good, bad, FILTER), LIST, h)
    assert steps[-1] == (["Filter(L,Lt(3,_0))"], 1)
    assert s.anon == [bad]


def test_nested_hofs_see_outer_locals(registry, h):
    lst = Input("L", list_of(INT))
    inner = (lst, (LocalInput(1), LocalInput(0), registry["sub"]), MAP)
    d = compile((lst, inner, MAP), list_of(list_of(INT)), (), registry)
    assert d.ret == list_of(list_of(INT))
    assert sexpr(d) == "Map(L,Map(L,Sub(_0,_1)))"
    xs = [1, 2, 7]
    # _0 is the outer element, _1 the inner one
    assert evaluate(d, {"L": xs})[0] == [[outer - inner for inner in xs] for outer in xs]


# -- fuzzing -------------------------------------------------------------------------------

PROBLEMS = ["days-between", "filter-bounds", "prefix-paths", "median", "smallest",
            "negative-to-zero", "vector-average", "compare-string-lengths",
            "replace-space-with-newline", "number-io"]


def compile_checked(program, target, h):
    """Compile while asserting that every discard leaves the stacks untouched."""
    s = CompilerState.load(program, target, (), h)
    while s.exec:
        before_exec, before_dag, before_anon = s.snapshot()
        item = s.exec[-1]
        step(s)
        if isinstance(item, (Operator, HigherOrderFunction)):
            pushed = s.dag and all(s.dag[-1] is not d for d in before_dag)
            if not pushed:
                assert s.snapshot() == (before_exec[:-1], before_dag, before_anon)
                assert all(a is b for a, b in zip(s.dag, before_dag))
                assert all(a is b for a, b in zip(s.anon, before_anon))
    return finish(s)


@pytest.mark.parametrize("name", PROBLEMS)
def test_fuzz_totality_validity_and_revert(registry, h, name):
    prob = get_problem(name)
    source = GeneSource(registry, prob.input_genes())
    rng = random.Random(f"pushc-fuzz:{name}")
    ok = 0
    for _ in range(1000):
        program = plushy_to_push(source.genome(rng, rng.randint(0, 80)))
        d = compile_checked(program, prob.return_type, h)
        try:
            d2 = compile(program, prob.return_type, prob.inputs, registry)
        except CompileFailure:
            assert d is None
            continue
        assert d2 == d  # deterministic and identical to the stepped compile
        assert diagnose(d2, h) is None
        assert h.is_subtype(d2.ret, prob.return_type)
        ok += 1
    assert ok > 0


# -- genome text format -----------------------------------------------------------------

@pytest.mark.parametrize("name", ["days-between", "filter-bounds", "replace-space-with-newline"])
def test_genome_text_round_trip(registry, name):
    prob = get_problem(name)
    source = GeneSource(registry, prob.input_genes())
    rng = random.Random(3)
    for _ in range(200):
        genome = source.genome(rng, rng.randint(0, 50))
        text = genome_to_text(genome)
        back = genome_from_text(text, registry, dict(prob.inputs))
        assert genome_to_text(back) == text
        assert back == genome


def test_genome_text_examples(registry):
    inputs = {"MyList": list_of(STR)}
    text = "input:MyList\nOPEN\nconst:Str:\"a\\nb\"\nconst:Float:0.25\nlocal:0\nCLOSE\nTake\n"
    genes = genome_from_text(text, registry, inputs)
    assert genes[0] == MYLIST and genes[1] is OPEN
    assert genes[2] == Constant("a\nb", STR)
    assert genes[3] == Constant(0.25, FLOAT)
    assert genes[4] == LocalInput(0) and genes[5] is CLOSE
    assert genes[6] is registry["take"]
    for bad in ("no_such_thing", "input:nope", "const:Int:x", "const:List:[]", "local:x", "const:Bool:yes"):
        with pytest.raises(GenomeFormatError):
            genome_from_text(bad, registry, inputs)
