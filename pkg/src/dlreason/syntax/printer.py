from __future__ import annotations

from .concepts import And, AtLeast, AtMost, Atom, Concept, Exists, ForAll, Not, Or, Role


def role_to_sexpr(r: Role) -> str:
    return f"(inv {r.name})" if r.inverted else r.name


def to_sexpr(c: Concept) -> str:
    """Canonical s-expression text; :func:`parse_concept` reads it back."""
    parts: list[str] = []
    _emit(c, parts)
    return "".join(parts)


def _emit(c: Concept, out: list[str]) -> None:
    if isinstance(c, Atom):
        out.append(c.name)
    elif isinstance(c, Not):
        out.append("(not ")
        _emit(c.operand, out)
        out.append(")")
    elif isinstance(c, (And, Or)):
        out.append("(and " if isinstance(c, And) else "(or ")
        _emit(c.left, out)
        out.append(" ")
        _emit(c.right, out)
        out.append(")")
    elif isinstance(c, (Exists, ForAll)):
        out.append("(some " if isinstance(c, Exists) else "(all ")
        out.append(role_to_sexpr(c.role))
        out.append(" ")
        _emit(c.filler, out)
        out.append(")")
    elif isinstance(c, AtMost):
        out.append(f"(atmost {c.n} {role_to_sexpr(c.role)})")
    elif isinstance(c, AtLeast):
        out.append(f"(atleast {c.n} {role_to_sexpr(c.role)})")
    else:  # pragma: no cover
        raise TypeError(c)
