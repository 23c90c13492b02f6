import pytest
from hypothesis import given, strategies as st

from cbgp.typesys import (
    BOOL,
    COMPARABLE,
    FLOAT,
    INT,
    LIST,
    NUMBER,
    STR,
    TOP,
    Nominal,
    Parametric,
    RuleInapplicable,
    RuleKind,
    Specification,
    UnknownType,
    Var,
    apply_rule,
    decompose,
    default_hierarchy,
    is_subtype,
    list_of,
    parse_type,
    rule,
    union,
)

SCALARS = ["Bool", "Int", "Float", "Str", "Comparable", "DateTime", "TimeDelta", "Path"]


def type_exprs(max_leaves=6):
    base = st.one_of(
        st.sampled_from([Nominal(n) for n in SCALARS]),
        st.just(TOP),
        st.sampled_from([Nominal("List"), Nominal("Sequence")]),
    )
    return st.recursive(
        base,
        lambda inner: st.one_of(
            st.builds(lambda p: Parametric("List", (p,)), inner),
            st.builds(lambda p: Parametric("Sequence", (p,)), inner),
            st.lists(inner, min_size=2, max_size=3).map(lambda ms: union(*ms)),
        ),
        max_leaves=max_leaves,
    )


# -- examples ---------------------------------------------------------------

def test_list_of_str_is_a_list(h):
    assert is_subtype(list_of(STR), LIST, h)


def test_int_is_in_number_union(h):
    assert is_subtype(INT, union(INT, FLOAT), h)


def test_reflexive_parametric(h):
    assert is_subtype(list_of(STR), list_of(STR), h)


def test_unrelated_constructors(h):
    assert not is_subtype(INT, LIST, h)


def test_list_is_a_sequence(h):
    assert is_subtype(LIST, Nominal("Sequence"), h)
    assert is_subtype(list_of(INT), Parametric("Sequence", (FLOAT,)), h)


def test_union_on_the_left_needs_every_member(h):
    assert is_subtype(NUMBER, FLOAT, h)  # Int <: Float
    assert not is_subtype(union(INT, STR), FLOAT, h)
    assert is_subtype(union(INT, STR), COMPARABLE, h)


def test_var_matches_by_bound(h):
    t = Var("T", COMPARABLE)
    assert is_subtype(INT, t, h)
    assert not is_subtype(LIST, t, h)
    assert is_subtype(t, t, h)
    assert is_subtype(t, COMPARABLE, h)
    assert not is_subtype(t, INT, h)
    assert is_subtype(list_of(STR), list_of(t), h)
    assert is_subtype(INT, Var("U"), h)


def test_unknown_names_raise(h):
    with pytest.raises(UnknownType):
        is_subtype(Nominal("Nope"), INT, h)
    with pytest.raises(UnknownType):
        is_subtype(INT, Parametric("List", (INT, INT)), h)


def test_decompose_examples(h):
    assert decompose(list_of(STR), h) == ("List", [STR])
    assert decompose(INT, h) is None
    assert decompose(LIST, h) == ("List", [TOP])


def test_hierarchy_rejects_cycles_and_bad_order():
    with pytest.raises(ValueError):
        default_hierarchy().__class__({"A": 0, "B": 0}, [("A", "B"), ("B", "A")])
    with pytest.raises(ValueError):
        default_hierarchy().__class__({"A": 0, "B": 0}, [], numeric_order=["A", "B"])


@pytest.mark.parametrize("text", ["Int", "Float", "List[Str]", "Union[Float,Int]", "List[List[Int]]", "Top", "List"])
def test_type_text_round_trip(text):
    assert str(parse_type(text)) == text


def test_union_text_is_canonical():
    assert str(union(FLOAT, INT)) == str(union(INT, FLOAT)) == "Union[Float,Int]"
    assert parse_type("Union[Int,Float]") == union(INT, FLOAT)


@pytest.mark.parametrize("bad", ["List[", "List[Int", "[Int]", "Int Int", ""])
def test_type_text_errors(bad):
    with pytest.raises(ValueError):
        parse_type(bad)


# -- reification --------------------------------------------------------------

TAKE = Specification((("L", LIST), ("N", INT)), LIST)
ADD = Specification((("a", NUMBER), ("b", NUMBER)), NUMBER)


def test_pass_through_take(h):
    out = apply_rule(rule("PassThrough", "L"), TAKE, {"L": list_of(STR)}, h)
    assert out.ret == list_of(STR)


def test_max_type_same(h):
    assert apply_rule(rule("MaxType", "a", "b"), ADD, {"a": INT, "b": INT}, h).ret == INT


def test_max_type_mixed(h):
    assert apply_rule(rule("MaxType", "a", "b"), ADD, {"a": INT, "b": FLOAT}, h).ret == FLOAT
    assert apply_rule(rule("MaxType", "a", "b"), ADD, {"a": FLOAT, "b": INT}, h).ret == FLOAT


def test_max_type_leaves_non_scalar_numbers(h):
    assert apply_rule(rule("MaxType", "a", "b"), ADD, {"a": NUMBER, "b": INT}, h).ret == NUMBER


def test_return_element_and_list_of(h):
    first = Specification((("L", LIST),), TOP)
    assert apply_rule(rule("ReturnElement", "L"), first, {"L": list_of(INT)}, h).ret == INT
    assert apply_rule(rule("ReturnElement", "L"), first, {"L": LIST}, h).ret == TOP
    wrap = Specification((("x", TOP),), LIST)
    assert apply_rule(rule("ListOf", "x"), wrap, {"x": STR}, h).ret == list_of(STR)


def test_return_element_on_non_collection(h):
    first = Specification((("L", TOP),), TOP)
    with pytest.raises(RuleInapplicable):
        apply_rule(rule("ReturnElement", "L"), first, {"L": INT}, h)


def test_args_to_element_and_same(h):
    index_of = Specification((("L", LIST), ("x", TOP)), INT)
    out = apply_rule(rule("ArgsToElement", "L", "x"), index_of, {"L": list_of(STR)}, h)
    assert out.arg_type("x") == STR
    lt = Specification((("a", COMPARABLE), ("b", COMPARABLE)), BOOL)
    out = apply_rule(rule("ArgsToSame", "a", "b"), lt, {"a": INT}, h)
    assert out.arg_type("b") == INT
    assert out.arg_type("a") == COMPARABLE  # bound arguments keep their slot


def test_rule_needs_bound_arguments(h):
    with pytest.raises(RuleInapplicable):
        apply_rule(rule("MaxType", "a", "b"), ADD, {"a": INT}, h)


def test_rule_kinds_are_the_six():
    assert {k.value for k in RuleKind} == {
        "PassThrough", "ReturnElement", "ArgsToElement", "ArgsToSame", "ListOf", "MaxType"}


# -- properties -----------------------------------------------------------------

@given(type_exprs())
def test_reflexive(t):
    h = default_hierarchy()
    assert h.is_subtype(t, t)
    assert h.is_subtype(t, TOP)


@given(st.lists(type_exprs(), min_size=3, max_size=3))
def test_transitive(ts):
    h = default_hierarchy()
    a, b, c = ts
    if h.is_subtype(a, b) and h.is_subtype(b, c):
        assert h.is_subtype(a, c)


def test_transitive_exhaustive_1000_triples():
    import random
    h = default_hierarchy()
    pool = [Nominal(n) for n in SCALARS] + [TOP, LIST, Nominal("Sequence"), NUMBER]
    pool += [list_of(t) for t in pool[:5]] + [Parametric("Sequence", (INT,)), union(STR, INT)]
    rng = random.Random(7)
    checked = 0
    for _ in range(1000):
        a, b, c = (rng.choice(pool) for _ in range(3))
        assert h.is_subtype(a, a)
        if h.is_subtype(a, b) and h.is_subtype(b, c):
            assert h.is_subtype(a, c), (a, b, c)
            checked += 1
    assert checked > 0


@given(type_exprs(), type_exprs())
def test_covariance(s, t):
    h = default_hierarchy()
    if h.is_subtype(s, t):
        assert h.is_subtype(list_of(s), list_of(t))


@given(type_exprs(), type_exprs())
def test_decompose_agreement(t, x):
    h = default_hierarchy()
    d = decompose(t, h)
    if d is not None and len(d[1]) == 1 and h.is_subtype(x, d[1][0]):
        assert h.is_subtype(Parametric(d[0], (x,)), t)


@given(type_exprs())
def test_union_subsumes_members(t):
    h = default_hierarchy()
    u = union(t, STR)
    assert h.is_subtype(t, u) and h.is_subtype(STR, u)
