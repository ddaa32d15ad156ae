import pytest
from hypothesis import given

from dlreason.oracle import eval as extension
from dlreason.shif_engine import is_satisfiable
from dlreason.syntax import (
    TOP,
    And,
    AtLeast,
    AtMost,
    Atom,
    Exists,
    FragmentError,
    ForAll,
    Not,
    Or,
    ParseError,
    Role,
    RoleBox,
    UnknownRoleError,
    inv,
    is_nnf,
    is_simple,
    parse_concept,
    parse_kb,
    parse_role,
    size,
    sub_closure,
    subrole_holds,
    to_nnf,
    to_sexpr,
    validate,
)
from strategies import concepts, interpretations, role_boxes

A, B, C, D, E = (Atom(x) for x in "ABCDE")
R, S, F = Role("R"), Role("S"), Role("F")


# -- parsing ------------------------------------------------------------------


def test_parse_conjunction_with_negation():
    assert parse_concept("(and A (not B))") is And(A, Not(B))


def test_parse_inverse_role_inside_restrictions():
    assert parse_concept("(some R (all (inv R) C))") is Exists(R, ForAll(R.inverse, C))


def test_parse_number_restrictions():
    assert parse_concept("(atmost 1 F)") is AtMost(1, F)
    assert parse_concept("(atleast 2 (inv F))") is AtLeast(2, F.inverse)


def test_nary_connectives_nest_to_the_right():
    assert parse_concept("(or A B C)") is Or(A, Or(B, C))


def test_comments_and_whitespace_are_ignored():
    assert parse_concept("; a comment\n(and   A\n\tB) ; trailing") is And(A, B)


@pytest.mark.parametrize(
    "text, line, col",
    [
        ("(and A", 1, 1),
        ("A)", 1, 2),
        ("(frob A)", 1, 1),
        ("(some R)", 1, 1),
        ("\n  (not A B)", 2, 3),
        ("(atmost x R)", 1, 9),
        ("(and A $top)", 1, 8),
        ("(and A some)", 1, 8),
    ],
)
def test_malformed_input_reports_position(text, line, col):
    with pytest.raises(ParseError) as info:
        parse_concept(text)
    assert (info.value.line, info.value.col) == (line, col)
    assert f"line {line}, col {col}" in str(info.value)


def test_printer_round_trip_is_exact():
    text = "(and (some (inv R) (or A (not B))) (and (atmost 1 F) (all S (atleast 2 F))))"
    assert to_sexpr(parse_concept(text)) == text


@given(concepts(numbers=True))
def test_print_then_parse_is_identity(c):
    assert parse_concept(to_sexpr(c)) is c


def test_terms_are_interned():
    assert And(A, Exists(R, B)) is And(Atom("A"), Exists(Role("R"), Atom("B")))
    assert hash(Or(A, B)) == hash(Or(A, B))
    assert Or(A, B) is not Or(B, A)


# -- NNF ------------------------------------------------------------------------


def test_de_morgan():
    assert to_nnf(Not(And(A, B))) is Or(Not(A), Not(B))


def test_existential_dualises_to_universal():
    assert to_nnf(Not(Exists(R, C))) is ForAll(R, Not(C))
    assert to_nnf(Not(Exists(R, Not(C)))) is ForAll(R, C)


def test_functional_restrictions_negate_into_each_other():
    assert to_nnf(Not(AtMost(1, F))) is AtLeast(2, F)
    assert to_nnf(Not(AtLeast(2, F))) is AtMost(1, F)


def test_double_negation_disappears():
    assert to_nnf(Not(Not(A))) is A


@given(concepts(numbers=True))
def test_nnf_is_idempotent_and_normal(c):
    n = to_nnf(c)
    assert is_nnf(n)
    assert to_nnf(n) is n


@given(concepts(max_leaves=6, numbers=True), interpretations())
def test_nnf_preserves_extension(c, i):
    assert extension(i, c) == extension(i, to_nnf(c))


# -- closure --------------------------------------------------------------------


def test_closure_of_atom():
    assert sub_closure(A) == {A}


def test_closure_is_structural():
    c = And(A, Exists(R, B))
    assert sub_closure(c) == {c, A, Exists(R, B), B}


def test_closure_includes_transitive_subrole_restrictions():
    rb = RoleBox(["R", "S"], ["R"], [(R, S)])
    assert ForAll(R, C) in sub_closure(ForAll(S, C), rb)
    assert ForAll(R, C) not in sub_closure(ForAll(S, C))


def test_transitive_propagation_stays_inside_the_closure():
    rb = RoleBox(["R", "S"], ["R"], [(R, S)])
    d = to_nnf(And(ForAll(S, C), Exists(R, Exists(R, A))))
    seen = []
    res = is_satisfiable(d, rb, trace=seen.append)
    assert res.satisfiable
    added = {rec[2] for rec in seen if rec[0] == "label"}
    assert ForAll(R, C) in added
    assert added <= sub_closure(d, rb)


@given(concepts(inverse=False))
def test_closure_is_linear_without_hierarchy(c):
    c = to_nnf(c)
    assert len(sub_closure(c)) <= size(c)


@given(concepts(numbers=True), role_boxes(names=("R", "S")))
def test_closure_bound_with_hierarchy(c, rb):
    c = to_nnf(c)
    assert len(sub_closure(c, rb)) <= size(c) * (1 + 2 * len(rb.names))


# -- roles ---------------------------------------------------------------------------


def test_inverse_is_an_involution():
    assert inv(R) is Role("R", True)
    assert inv(Role("R", True)) is R
    assert inv(inv(S)) is S
    assert str(inv(R)) == "(inv R)"


def test_subrole_reflexive():
    assert subrole_holds(RoleBox(["R"]), R, R)


def test_subrole_closed_under_inverse():
    rb = RoleBox(["F", "R"], [], [(F, R)])
    assert subrole_holds(rb, F, R)
    assert subrole_holds(rb, F.inverse, R.inverse)
    assert not subrole_holds(rb, R, F)
    assert not subrole_holds(rb, F, R.inverse)


def test_subrole_transitive():
    p, q, t = Role("P"), Role("Q"), Role("T")
    rb = RoleBox([], [], [(p, q), (q, t)])
    assert subrole_holds(rb, p, t)


def test_subrole_rejects_unknown_roles():
    with pytest.raises(UnknownRoleError):
        subrole_holds(RoleBox(["R"]), R, Role("Z"))


def test_transitive_role_is_not_simple():
    assert not is_simple(RoleBox(["R"], ["R"]), R)


def test_functional_subrole_of_transitive_role_is_simple():
    rb = RoleBox(["F", "R"], ["R"], [(F, R)])
    assert is_simple(rb, F)
    assert not is_simple(rb, R)


def test_role_with_transitive_subrole_is_not_simple():
    t = Role("T")
    rb = RoleBox(["T", "F"], ["T"], [(t, F)])
    assert not is_simple(rb, F)
    assert not is_simple(rb, F.inverse)


def test_transitivity_of_inverse():
    rb = RoleBox(["R"], ["R"])
    assert rb.is_transitive(R.inverse)


@given(role_boxes())
def test_subrole_is_a_preorder_closed_under_inverse(rb):
    every = rb.roles()
    for r in every:
        assert rb.subrole_holds(r, r)
    for r in every:
        for s in every:
            if rb.subrole_holds(r, s):
                assert rb.subrole_holds(r.inverse, s.inverse)
                for t in every:
                    if rb.subrole_holds(s, t):
                        assert rb.subrole_holds(r, t)


@given(role_boxes())
def test_simplicity_matches_subrole_enumeration(rb):
    for r in rb.roles():
        expected = not any(rb.is_transitive(s) for s in rb.roles() if rb.subrole_holds(s, r))
        assert rb.is_simple(r) == expected


def test_parse_role():
    assert parse_role("(inv (inv R))") is R


# -- fragment validation ---------------------------------------------------------------


def test_si_rejects_hierarchy_and_numbers():
    with pytest.raises(FragmentError):
        validate(A, RoleBox(["F", "R"], [], [(F, R)]), "si")
    with pytest.raises(FragmentError):
        validate(AtMost(1, F), RoleBox(), "si")


def test_shif_rejects_numbers_on_non_simple_roles():
    with pytest.raises(FragmentError, match="not simple"):
        validate(AtMost(1, R), RoleBox(["R"], ["R"]), "shif")
    validate(AtMost(1, F), RoleBox(["F", "R"], ["R"], [(F, R)]), "shif")


def test_shif_rejects_other_cardinalities():
    with pytest.raises(FragmentError):
        validate(AtMost(3, F), RoleBox(), "shif")


# -- knowledge bases ---------------------------------------------------------------------


def test_kb_statements():
    kb = parse_kb(
        """
        (transitive R)
        (subrole F R)
        (subrole (inv G) R)
        (define-concept Big (and A (some R B)))
        (define-concept Bigger (and Big C))
        (implies A (all F B))
        """
    )
    assert kb.rbox.is_transitive(R)
    assert kb.rbox.subrole_holds(Role("G"), R.inverse)
    assert kb.named("Bigger") is And(And(A, Exists(R, B)), C)
    assert kb.gcis == [(A, ForAll(F, B))]
    assert kb.concept_names == ["A", "B", "Big", "Bigger", "C"]
    assert kb.axiom_count == 6


def test_definitions_expand_inside_axioms():
    kb = parse_kb("(define-concept X (and A B)) (implies X C)")
    assert kb.gcis == [(And(A, B), C)]


def test_cyclic_definitions_are_refused():
    with pytest.raises(ParseError, match="cyclic"):
        parse_kb("(define-concept X (some R Y)) (define-concept Y (and A X))")


def test_unknown_statement_reports_position():
    with pytest.raises(ParseError) as info:
        parse_kb("(transitive R)\n  (frobnicate A)")
    assert (info.value.line, info.value.col) == (2, 3)


def test_empty_kb():
    kb = parse_kb("; nothing here\n")
    assert kb.concept_names == [] and kb.gcis == [] and kb.axiom_count == 0


def test_top_is_a_reserved_tautology():
    assert TOP is Or(TOP.left, Not(TOP.left))
    assert TOP.left.name.startswith("$")
