from __future__ import annotations

from .concepts import AtLeast, AtMost, Concept, roles_of, walk
from .roles import RoleBox

LOGICS = ("si", "shif")


class FragmentError(ValueError):
    """Input outside the logic a reasoner was asked to use."""


def validate(c: Concept, rb: RoleBox, logic: str) -> None:
    """Reject constructs the chosen engine cannot decide.

    ``c`` should already be in NNF, otherwise the number-restriction
    checks see the un-normalised form.
    """
    if logic not in LOGICS:
        raise FragmentError(f"unknown logic {logic!r}; expected one of {LOGICS}")
    rb = rb.with_roles(r.name for r in roles_of(c))
    if logic == "si":
        if rb.inclusions:
            raise FragmentError("SI has no role hierarchy; use --logic shif")
        for x in walk(c):
            if isinstance(x, (AtMost, AtLeast)):
                raise FragmentError(f"number restriction {x} is not SI; use --logic shif")
        return
    for x in walk(c):
        if isinstance(x, AtMost) and x.n != 1:
            raise FragmentError(f"{x}: SHIF only allows (atmost 1 r)")
        if isinstance(x, AtLeast) and x.n != 2:
            raise FragmentError(f"{x}: SHIF only allows (atleast 2 r)")
        if isinstance(x, (AtMost, AtLeast)) and not rb.is_simple(x.role):
            raise FragmentError(f"{x}: role {x.role} is not simple (it has a transitive sub-role)")


def has_inverse(c: Concept, rb: RoleBox) -> bool:
    return rb.has_inverse or any(r.inverted for r in roles_of(c))
