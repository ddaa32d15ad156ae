"""Reduce reasoning w.r.t. general concept inclusions to plain satisfiability.

A fresh transitive role U is made a super-role of every role (and inverse)
in play; ``C_T ⊓ ∀U.C_T`` then forces the axioms onto every element
reachable from the root, which is all a connected model needs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from .syntax import (
    RESERVED_PREFIX,
    TOP,
    And,
    Concept,
    ForAll,
    FragmentError,
    Not,
    Or,
    Role,
    RoleBox,
    conjoin,
    role_names_of,
)

UNIVERSAL_ROLE = Role(RESERVED_PREFIX + "U")


@dataclass
class Terminology:
    gcis: list[tuple[Concept, Concept]] = field(default_factory=list)

    def __bool__(self) -> bool:
        return bool(self.gcis)

    def __len__(self) -> int:
        return len(self.gcis)

    def role_names(self) -> set[str]:
        out: set[str] = set()
        for l, r in self.gcis:
            out |= role_names_of(l) | role_names_of(r)
        return out

    def internal_concept(self) -> Concept:
        """C_T, the conjunction of ¬C ⊔ D over all axioms (TOP if empty)."""
        return conjoin(Or(Not(l), r) for l, r in self.gcis)


def _as_terminology(t) -> Terminology:
    if isinstance(t, Terminology):
        return t
    return Terminology(list(t or ()))


def universal_rbox(t: Terminology, rb: RoleBox, *concepts: Concept) -> RoleBox:
    names = set(rb.names) | t.role_names()
    for c in concepts:
        names |= role_names_of(c)
    if UNIVERSAL_ROLE.name in names:
        raise FragmentError(f"role name {UNIVERSAL_ROLE.name!r} is reserved")
    return _universal(rb, frozenset(names))


@lru_cache(maxsize=128)
def _universal(rb: RoleBox, names: frozenset) -> RoleBox:
    # classification asks for the same box hundreds of times
    extra = []
    for n in sorted(names):
        extra.append((Role(n), UNIVERSAL_ROLE))
        extra.append((Role(n, True), UNIVERSAL_ROLE))
    return rb.extended(roles=names | {UNIVERSAL_ROLE.name}, transitive=[UNIVERSAL_ROLE.name], inclusions=extra)


def internalise_sat(t, rb: RoleBox, c: Concept, logic: str = "shif") -> tuple[Concept, RoleBox]:
    """Concept and role box whose satisfiability equals that of ``c`` w.r.t. ``t`` and ``rb``."""
    t = _as_terminology(t)
    if logic == "si":
        if t:
            raise FragmentError("GCIs need a role hierarchy for internalisation; SI has none (use --logic shif)")
        return c, rb
    ct = t.internal_concept()
    return And(c, And(ct, ForAll(UNIVERSAL_ROLE, ct))), universal_rbox(t, rb, c)


def internalise_subsumes(t, rb: RoleBox, c: Concept, d: Concept, logic: str = "shif") -> tuple[Concept, RoleBox]:
    """Concept that is unsatisfiable iff ``c`` ⊑ ``d`` w.r.t. ``t`` and ``rb``."""
    t = _as_terminology(t)
    query = And(c, Not(d))
    if logic == "si":
        if t:
            raise FragmentError("GCIs need a role hierarchy for internalisation; SI has none (use --logic shif)")
        return query, rb
    ct = t.internal_concept()
    return And(query, And(ct, ForAll(UNIVERSAL_ROLE, ct))), universal_rbox(t, rb, c, d)


__all__ = ["Terminology", "UNIVERSAL_ROLE", "internalise_sat", "internalise_subsumes", "universal_rbox", "TOP"]
