"""Concept/role syntax, NNF, closure, role boxes and the KB file format."""

from .concepts import (
    BOTTOM,
    RESERVED_PREFIX,
    TOP,
    TOP_ATOM,
    And,
    AtLeast,
    AtMost,
    Atom,
    Concept,
    Exists,
    ForAll,
    Not,
    Or,
    Role,
    at_least_two,
    at_most_one,
    atoms_of,
    conjoin,
    disjoin,
    inv,
    is_nnf,
    negate,
    role_names_of,
    roles_of,
    size,
    sub_closure,
    substitute,
    to_nnf,
    walk,
)
from .fragment import LOGICS, FragmentError, has_inverse, validate
from .parser import KnowledgeBase, ParseError, load_kb, parse_concept, parse_kb, parse_role, read_sexprs
from .printer import role_to_sexpr, to_sexpr
from .roles import RoleBox, UnknownRoleError


def subrole_holds(rb: RoleBox, r: Role, s: Role) -> bool:
    return rb.subrole_holds(r, s)


def is_simple(rb: RoleBox, r: Role) -> bool:
    return rb.is_simple(r)


__all__ = [name for name in dir() if not name.startswith("_")]
