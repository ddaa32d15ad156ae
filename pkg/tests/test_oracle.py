import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dlreason.certificate import TableauStructure
from dlreason.corpus import infinite_model_concept
from dlreason.oracle import (
    Interpretation,
    OracleBudgetExceeded,
    check_model,
    check_tableau_properties,
    close_roles,
    enumerate_interpretations,
    eval,
    find_model_by_enumeration,
    find_model_upto,
    format_model,
    holds_at,
    model_problems,
    parse_model,
)
from dlreason.syntax import And, AtLeast, AtMost, Atom, Exists, ForAll, Not, Role, RoleBox, parse_concept, to_nnf
from strategies import concepts, interpretations, role_boxes

A, B = Atom("A"), Atom("B")
R, S = Role("R"), Role("S")

# 0 -R-> 1 -R-> 2, A = {0, 1}
SMALL = Interpretation(3, {"A": frozenset({0, 1})}, {"R": frozenset({(0, 1), (1, 2)})})


# -- evaluation ---------------------------------------------------------------------------


@pytest.mark.parametrize(
    "text, ext",
    [
        ("A", {0, 1}),
        ("(not A)", {2}),
        ("(some R A)", {0}),
        ("(all R A)", {0, 2}),
        ("(some (inv R) A)", {1, 2}),
        ("(all (inv R) (not A))", {0}),
        ("(atleast 2 R)", set()),
        ("(atmost 1 R)", {0, 1, 2}),
        ("(and A (some R (not A)))", {1}),
        ("(or (not A) (some R A))", {0, 2}),
    ],
)
def test_extensions_of_a_small_chain(text, ext):
    assert eval(SMALL, parse_concept(text)) == frozenset(ext)


@settings(max_examples=200)
@given(interpretations(), concepts(max_leaves=8, numbers=True))
def test_set_and_pointwise_evaluation_agree(i, c):
    ext = eval(i, c)
    assert ext == {x for x in i.domain if holds_at(i, c, x)}
    assert eval(i, to_nnf(c)) == ext
    assert eval(i, Not(c)) == frozenset(i.domain) - ext


@settings(max_examples=150)
@given(interpretations(), concepts(max_leaves=8, numbers=True))
def test_an_isolated_element_changes_nothing_else(i, c):
    old = eval(i, c)
    new = eval(i.padded(), c)
    assert new - {i.size} == old


# -- model checking -----------------------------------------------------------------------


def test_transitivity_violation_is_reported():
    rb = RoleBox(["R"], ["R"])
    problems = model_problems(SMALL, rb, parse_concept("(some R A)"))
    assert len(problems) == 1 and "transitive" in problems[0]
    assert not check_model(SMALL, parse_concept("(some R A)"), rb)
    assert check_model(SMALL, parse_concept("(some R A)"), RoleBox(["R"]))


def test_inclusion_and_axiom_violations_are_reported():
    rb = RoleBox(["R", "S"], [], [(R, S)])
    problems = model_problems(SMALL, rb, A, tbox=[(A, ForAll(R, A))])
    assert any("inclusion" in p for p in problems)
    assert any("axiom" in p for p in problems)


def test_empty_extension_is_not_a_model():
    assert model_problems(SMALL, RoleBox(), And(A, Not(A))) == [f"concept {And(A, Not(A))} has an empty extension"]


def test_role_closure():
    ext = {"R": {(0, 1), (1, 2)}, "S": set()}
    close_roles(ext, RoleBox(["R", "S"], ["R"], [(R, S.inverse)]))
    assert ext["R"] == {(0, 1), (1, 2), (0, 2)}
    assert ext["S"] == {(1, 0), (2, 1), (2, 0)}


# -- bounded model search -------------------------------------------------------------------


def test_contradictions_have_no_small_model():
    assert find_model_upto(And(A, Not(A)), RoleBox(), 4) is None
    assert find_model_upto(parse_concept("(and (some R A) (all R (not A)))"), RoleBox(["R"]), 4) is None


def test_infinite_model_concept_has_no_small_model():
    c, rb = infinite_model_concept()
    assert find_model_upto(c, rb, 4) is None


def test_smallest_model_is_returned():
    i = find_model_upto(AtLeast(2, R), RoleBox(["R"]), 4)
    assert i.size == 2
    i = find_model_upto(parse_concept("(and A (some R (not A)))"), RoleBox(["R"]), 4)
    assert i.size == 2 and check_model(i, parse_concept("(and A (some R (not A)))"), RoleBox(["R"]))


def test_models_respect_the_role_box():
    rb = RoleBox(["R", "S"], ["R"], [(S, R)])
    c = parse_concept("(and (some S (some S A)) (all R (not B)))")
    i = find_model_upto(c, rb, 4)
    assert i is not None and check_model(i, c, rb)
    assert find_model_upto(And(c, parse_concept("(some S (some S (some S B)))")), rb, 4) is None


def test_terminology_constrains_every_element():
    t = [(A, Exists(R, A))]
    c = And(A, AtMost(1, R))
    i = find_model_upto(c, RoleBox(["R"]), 3, tbox=t)
    assert i is not None and check_model(i, c, RoleBox(["R"]), t)
    assert find_model_upto(And(A, ForAll(R, Not(A))), RoleBox(["R"]), 3, tbox=t) is None


def test_conflict_budget_is_reported():
    c, rb = infinite_model_concept()
    with pytest.raises(OracleBudgetExceeded):
        find_model_upto(c, rb, 6, conflict_budget=1)


def test_enumeration_closes_role_extensions():
    rb = RoleBox(["R"], ["R"])
    seen = list(enumerate_interpretations(["A"], ["R"], 2, rb))
    assert all(model_problems(i, rb) == [] for i in seen)
    # 16 relations on two elements, 13 of them transitive, times 4 choices for A
    assert len(seen) == 13 * 4


@settings(max_examples=120)
@given(concepts(max_leaves=6, numbers=True, role_names=("R",)), role_boxes(names=("R",)))
def test_sat_search_matches_enumeration(c, rb):
    via_sat = find_model_upto(c, rb, 2)
    via_enum = find_model_by_enumeration(c, rb, 2)
    assert (via_sat is None) == (via_enum is None)
    if via_enum is not None:
        assert check_model(via_enum, c, rb)
        assert via_sat.size == via_enum.size


@settings(max_examples=60)
@given(
    concepts(max_leaves=4, role_names=("R",)),
    st.lists(st.tuples(concepts(max_leaves=3, role_names=("R",)), concepts(max_leaves=3, role_names=("R",))), max_size=2),
)
def test_sat_search_matches_enumeration_under_axioms(c, tbox):
    rb = RoleBox(["R"])
    via_sat = find_model_upto(c, rb, 2, tbox=tbox)
    via_enum = find_model_by_enumeration(c, rb, 2, tbox=tbox)
    assert (via_sat is None) == (via_enum is None)


@settings(max_examples=80)
@given(concepts(max_leaves=6, numbers=True), role_boxes(names=("R", "S")))
def test_found_models_check_out_and_survive_padding(c, rb):
    i = find_model_upto(c, rb, 3)
    if i is not None:
        assert check_model(i, c, rb)
        assert check_model(i.padded(), c, rb)


# -- text format -------------------------------------------------------------------------------


def test_model_text_round_trip():
    text = format_model(SMALL)
    assert text == "domain: 0 1 2\nconcept A: 0 1\nrole R: (0 1) (1 2)\n"
    assert parse_model(text) == SMALL


@settings(max_examples=100)
@given(interpretations())
def test_model_text_round_trip_property(i):
    back = parse_model(format_model(i))
    for c in ("(some R A)", "(all (inv S) (or B C))", "(atleast 2 S)"):
        assert eval(back, parse_concept(c)) == eval(i, parse_concept(c))


# -- tableau conditions -----------------------------------------------------------------------


def test_missing_witness_is_reported():
    c = Exists(R, A)
    t = TableauStructure({0: {c}}, {})
    assert any(p.startswith("P5") for p in check_tableau_properties(t, c, RoleBox(["R"])))
    assert check_tableau_properties(TableauStructure({0: {c}}, {}, frontier=frozenset({0})), c, RoleBox(["R"])) == []


def test_one_sided_edge_is_reported():
    c = Exists(R, A)
    t = TableauStructure({0: {c}, 1: {A}}, {R: frozenset({(0, 1)})})
    problems = check_tableau_properties(t, c, RoleBox(["R"]))
    assert any(p.startswith("P7") for p in problems)
    t.edges[R.inverse] = frozenset({(1, 0)})
    assert check_tableau_properties(t, c, RoleBox(["R"])) == []


def test_clash_and_missing_conjunct_are_reported():
    c = And(A, Not(A))
    problems = check_tableau_properties(TableauStructure({0: {c, A, Not(A)}}, {}), c)
    assert any(p.startswith("P1") for p in problems)
    problems = check_tableau_properties(TableauStructure({0: {c, A}}, {}), c)
    assert any(p.startswith("P2") for p in problems)
