import random

import pytest

from dlreason.corpus import random_concept, random_rbox, random_tbox
from dlreason.internalise import UNIVERSAL_ROLE, Terminology, internalise_sat, internalise_subsumes
from dlreason.oracle import find_model_upto
from dlreason.reasoner import decide
from dlreason.syntax import And, Atom, Exists, FragmentError, Not, Role, RoleBox, TOP, parse_concept, size

A, B = Atom("A"), Atom("B")
R = Role("R")


def sat(q, rb) -> bool:
    return decide(q, rb, "shif").satisfiable


def test_empty_terminology_keeps_the_concept():
    c = parse_concept("(and A (some R B))")
    q, rb = internalise_sat(Terminology(), RoleBox(["R"]), c)
    assert sat(q, rb)
    assert Terminology().internal_concept() is TOP
    assert not sat(*internalise_sat([], RoleBox(), And(A, Not(A))))


def test_universal_role_covers_every_role():
    t = Terminology([(Exists(R, TOP), A)])
    _, rb = internalise_sat(t, RoleBox(["R", "S"], ["S"]), Exists(Role("T"), B))
    assert rb.is_transitive(UNIVERSAL_ROLE)
    for name in ("R", "S", "T"):
        assert rb.subrole_holds(Role(name), UNIVERSAL_ROLE)
        assert rb.subrole_holds(Role(name, True), UNIVERSAL_ROLE)


def test_violated_axiom_is_unsatisfiable():
    t = [(A, B)]
    q, rb = internalise_sat(t, RoleBox(), And(A, Not(B)))
    assert not sat(q, rb)
    # the oracle finds no small model either
    assert find_model_upto(And(A, Not(B)), RoleBox(), 3, tbox=t) is None


def test_reflexive_subsumption():
    c = parse_concept("(some R (or A B))")
    q, rb = internalise_subsumes([], RoleBox(["R"]), c, c)
    assert not sat(q, rb)


def test_conjunction_subsumption():
    q, rb = internalise_subsumes([], RoleBox(), And(A, B), A)
    assert not sat(q, rb)


def test_subsumption_through_an_axiom():
    t = [(Exists(R, TOP), A)]
    c = Exists(R, B)
    q, rb = internalise_subsumes(t, RoleBox(["R"]), c, A)
    assert not sat(q, rb)
    assert find_model_upto(And(c, Not(A)), RoleBox(["R"]), 3, tbox=t) is None
    # without the axiom there is a countermodel
    assert find_model_upto(And(c, Not(A)), RoleBox(["R"]), 3) is not None


def test_axioms_reach_deep_successors():
    t = [(A, Exists(R, A))]
    q, rb = internalise_sat(t, RoleBox(["R"]), And(A, parse_concept("(all R (all R (all R (not A))))")))
    assert not sat(q, rb)


def test_si_refuses_axioms():
    with pytest.raises(FragmentError):
        internalise_sat([(A, B)], RoleBox(), A, logic="si")
    q, _ = internalise_subsumes([], RoleBox(), A, B, logic="si")
    assert q is And(A, Not(B))


def test_reserved_role_name_is_refused():
    with pytest.raises(FragmentError):
        internalise_sat([(A, B)], RoleBox([UNIVERSAL_ROLE.name]), A)


def test_output_size_is_linear():
    rng = random.Random(5)
    for _ in range(50):
        rb = random_rbox(rng, "shif")
        t = [(random_concept(rng, 3, rb, "shif"), random_concept(rng, 3, rb, "shif")) for _ in range(3)]
        c = random_concept(rng, 4, rb, "shif")
        q, _ = internalise_sat(t, rb, c)
        body = sum(size(l) + size(r) for l, r in t) + size(c)
        assert size(q) <= 2 * body + 10 * len(t) + 10


def test_oracle_model_implies_engine_sat():
    rng = random.Random(11)
    checked = 0
    for _ in range(120):
        rb = random_rbox(rng, "shif")
        t = random_tbox(rng, rb)
        c = random_concept(rng, 3, rb, "shif")
        q, rbu = internalise_sat(t, rb, c)
        engine = sat(q, rbu)
        if find_model_upto(c, rb, 3, tbox=t) is not None:
            checked += 1
            assert engine, (t, c)
    assert checked > 30
