import pytest

from dlreason.oracle import find_model_upto
from dlreason.reasoner import ClassificationResult, Reasoner, decide
from dlreason.syntax import And, Atom, FragmentError, KnowledgeBase, Not, RoleBox, load_kb, parse_concept, parse_kb

from conftest import DATA


def below(res, a, b):
    """Whether b's class is a direct parent of a's class."""
    cls = {n: c for c in res.classes for n in c}
    return cls[b] in res.parents[cls[a]]


def test_defined_conjunction_sits_below_its_conjunct():
    kb = parse_kb("(define-concept P A) (define-concept Q (and A B))")
    res = Reasoner(kb).classify(verify=True)
    assert below(res, "Q", "P") and below(res, "Q", "B")
    assert ("A", "P") in res.classes
    assert "Q < A = P B" in res.to_text().splitlines()


def test_empty_kb_classifies_to_nothing():
    res = Reasoner(KnowledgeBase()).classify()
    assert res.classes == [] and res.edges == [] and res.to_text() == ""


def test_equivalent_names_share_a_class():
    kb = parse_kb("(define-concept P (and A B)) (define-concept Q (and B A)) (define-concept U A)")
    res = Reasoner(kb).classify(verify=True)
    assert ("P", "Q") in res.classes
    assert below(res, "P", "U")


def test_unsatisfiable_names_go_to_the_bottom():
    kb = parse_kb("(define-concept P (and A (not A))) (define-concept Q A)")
    res = Reasoner(kb).classify(verify=True)
    assert res.unsatisfiable == ["P"]
    assert "P = BOTTOM" in res.to_text()


def test_transitive_edges_are_not_retested():
    kb = parse_kb(
        "(define-concept X1 A) (define-concept X2 (and A B)) (define-concept X3 (and A (and B C)))"
        "(define-concept X4 (and A (and B (and C E))))"
    )
    res = Reasoner(kb).classify()
    n = len(kb.concept_names)
    # one satisfiability test per name plus fewer than all ordered pairs
    assert res.tests < n + n * (n - 1)
    assert below(res, "X4", "X3") and below(res, "X3", "X2") and below(res, "X2", "X1")
    assert not below(res, "X4", "X1")


def test_subsumption_through_a_terminology():
    kb = parse_kb("(implies A B)")
    r = Reasoner(kb)
    assert r.subsumes(Atom("A"), Atom("B"))[0]
    assert not r.subsumes(Atom("B"), Atom("A"))[0]
    assert find_model_upto(And(Atom("A"), Not(Atom("B"))), RoleBox(), 3, tbox=kb.gcis) is None
    assert find_model_upto(And(Atom("B"), Not(Atom("A"))), RoleBox(), 3, tbox=kb.gcis) is not None


def test_si_refuses_terminologies():
    with pytest.raises(FragmentError):
        Reasoner(parse_kb("(implies A B)"), logic="si")
    r = Reasoner(parse_kb("(define-concept P (some R A))"), logic="si")
    assert r.satisfiable(parse_concept("P")).satisfiable


def test_decide_dispatches_on_logic():
    c = parse_concept("(and (some R A) (all R (not A)))")
    for logic in ("si", "shif"):
        assert not decide(c, RoleBox(["R"]), logic).satisfiable
    assert decide(parse_concept("(some R A)"), RoleBox(["R"]), "si", strategy="bounded").satisfiable


# -- the bundled sample ------------------------------------------------------------------


def test_sample_kb_size(sample_kb_path):
    kb = load_kb(sample_kb_path)
    assert len(kb.concept_names) == 19
    assert kb.axiom_count == 42


def test_sample_kb_matches_the_golden_hierarchy(sample_kb_path):
    kb = load_kb(sample_kb_path)
    res = Reasoner(kb).classify(verify=True)
    assert res.to_text() == (DATA / "sample_hierarchy.txt").read_text(encoding="utf-8")
    assert res.verified == len(res.edges) + len(res.unsatisfiable)


def test_sample_hierarchy_agrees_with_small_models(sample_kb_path):
    # Every pair the reasoner rejects has a countermodel of size <= 3, and no
    # accepted pair has one.
    kb = load_kb(sample_kb_path)
    r = Reasoner(kb)
    res = r.classify()
    names = [n for cls in res.classes for n in cls]
    for a in names:
        for b in names:
            if a == b:
                continue
            holds = r.subsumes(kb.named(a), kb.named(b))[0]
            m = find_model_upto(And(kb.named(a), Not(kb.named(b))), kb.rbox, 3, tbox=kb.gcis)
            assert holds == (m is None), (a, b)
    for u in res.unsatisfiable:
        assert find_model_upto(kb.named(u), kb.rbox, 3, tbox=kb.gcis) is None


def test_classification_result_order_is_reduced():
    res = ClassificationResult()
    closure = {"a": {"b", "c"}, "b": {"c"}, "c": set()}
    res.set_order(["a", "b", "c"], closure)
    assert res.edges == [("a", "b"), ("b", "c")]
