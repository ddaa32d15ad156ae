"""Hypothesis strategies for concepts, role boxes and interpretations."""

from hypothesis import strategies as st

from dlreason.oracle import Interpretation
from dlreason.syntax import And, AtLeast, AtMost, Atom, Exists, ForAll, Not, Or, Role, RoleBox

ATOMS = ("A", "B", "C")
ROLE_NAMES = ("R", "S")

roles = st.builds(Role, st.sampled_from(ROLE_NAMES), st.booleans())
plain_roles = st.builds(Role, st.sampled_from(ROLE_NAMES))


def concepts(max_leaves: int = 8, numbers: bool = False, inverse: bool = True, role_names=ROLE_NAMES):
    rs = st.builds(Role, st.sampled_from(role_names), st.booleans() if inverse else st.just(False))
    base = st.sampled_from(ATOMS).map(Atom)
    if numbers:
        base = base | st.builds(AtMost, st.just(1), rs) | st.builds(AtLeast, st.just(2), rs)

    def extend(inner):
        return (
            st.builds(Not, inner)
            | st.builds(And, inner, inner)
            | st.builds(Or, inner, inner)
            | st.builds(Exists, rs, inner)
            | st.builds(ForAll, rs, inner)
        )

    return st.recursive(base, extend, max_leaves=max_leaves)


propositional = st.recursive(
    st.sampled_from(ATOMS + ("D", "E")).map(Atom),
    lambda inner: st.builds(Not, inner) | st.builds(And, inner, inner) | st.builds(Or, inner, inner),
    max_leaves=10,
)


@st.composite
def role_boxes(draw, names=("P", "Q", "R", "S"), hierarchy: bool = True):
    names = list(names)
    transitive = draw(st.lists(st.sampled_from(names), unique=True, max_size=2))
    incl = []
    if hierarchy:
        pairs = st.tuples(
            st.builds(Role, st.sampled_from(names), st.booleans()),
            st.builds(Role, st.sampled_from(names)),
        )
        incl = draw(st.lists(pairs, max_size=4))
    return RoleBox(names, transitive, incl)


@st.composite
def interpretations(draw, max_size: int = 3, atoms=ATOMS, role_names=ROLE_NAMES):
    n = draw(st.integers(1, max_size))
    elems = st.integers(0, n - 1)
    cext = {a: draw(st.frozensets(elems)) for a in atoms}
    rext = {r: draw(st.frozensets(st.tuples(elems, elems))) for r in role_names}
    return Interpretation(n, cext, rext)
