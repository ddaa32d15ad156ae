"""Concept and role terms.

Every term is interned: building the same structure twice returns the same
object, so equality and hashing are by identity and label sets stay cheap.
"""

from __future__ import annotations

import itertools
import threading
from typing import Iterator

RESERVED_PREFIX = "$"

_TABLE: dict[tuple, object] = {}
_LOCK = threading.Lock()
_UIDS = itertools.count()


def _intern(cls, fields: tuple):
    key = (cls, *fields)
    obj = _TABLE.get(key)
    if obj is None:
        with _LOCK:
            obj = _TABLE.get(key)
            if obj is None:
                obj = object.__new__(cls)
                for name, value in zip(cls._fields, fields):
                    object.__setattr__(obj, name, value)
                object.__setattr__(obj, "uid", next(_UIDS))
                _TABLE[key] = obj
    return obj


class _Term:
    __slots__ = ("uid",)
    _fields: tuple[str, ...] = ()

    def __setattr__(self, name, value):
        raise AttributeError(f"{type(self).__name__} is immutable")

    def __reduce__(self):
        return (type(self), tuple(getattr(self, f) for f in self._fields))

    def __copy__(self):
        return self

    def __deepcopy__(self, memo):
        return self


class Role(_Term):
    """A role name or its inverse. ``Role('R', True)`` is R⁻."""

    __slots__ = ("name", "inverted")
    _fields = ("name", "inverted")

    def __new__(cls, name: str, inverted: bool = False) -> "Role":
        return _intern(cls, (name, bool(inverted)))

    @property
    def inverse(self) -> "Role":
        return Role(self.name, not self.inverted)

    def __repr__(self) -> str:
        return f"(inv {self.name})" if self.inverted else self.name

    __str__ = __repr__


def inv(r: Role) -> Role:
    return r.inverse


class Concept(_Term):
    __slots__ = ()

    def __repr__(self) -> str:
        from .printer import to_sexpr

        return to_sexpr(self)

    __str__ = __repr__

    def children(self) -> tuple["Concept", ...]:
        return ()


class Atom(Concept):
    __slots__ = ("name",)
    _fields = ("name",)

    def __new__(cls, name: str) -> "Atom":
        return _intern(cls, (name,))


class Not(Concept):
    __slots__ = ("operand",)
    _fields = ("operand",)

    def __new__(cls, operand: Concept) -> "Not":
        return _intern(cls, (operand,))

    def children(self):
        return (self.operand,)


class And(Concept):
    __slots__ = ("left", "right")
    _fields = ("left", "right")

    def __new__(cls, left: Concept, right: Concept) -> "And":
        return _intern(cls, (left, right))

    def children(self):
        return (self.left, self.right)


class Or(Concept):
    __slots__ = ("left", "right")
    _fields = ("left", "right")

    def __new__(cls, left: Concept, right: Concept) -> "Or":
        return _intern(cls, (left, right))

    def children(self):
        return (self.left, self.right)


class Exists(Concept):
    __slots__ = ("role", "filler")
    _fields = ("role", "filler")

    def __new__(cls, role: Role, filler: Concept) -> "Exists":
        return _intern(cls, (role, filler))

    def children(self):
        return (self.filler,)


class ForAll(Concept):
    __slots__ = ("role", "filler")
    _fields = ("role", "filler")

    def __new__(cls, role: Role, filler: Concept) -> "ForAll":
        return _intern(cls, (role, filler))

    def children(self):
        return (self.filler,)


class AtMost(Concept):
    """Unqualified ``<= n R``; the reasoners only accept n = 1."""

    __slots__ = ("n", "role")
    _fields = ("n", "role")

    def __new__(cls, n: int, role: Role) -> "AtMost":
        if n < 0:
            raise ValueError("atmost needs n >= 0")
        return _intern(cls, (int(n), role))


class AtLeast(Concept):
    """Unqualified ``>= n R``; the reasoners only accept n = 2."""

    __slots__ = ("n", "role")
    _fields = ("n", "role")

    def __new__(cls, n: int, role: Role) -> "AtLeast":
        if n < 1:
            raise ValueError("atleast needs n >= 1")
        return _intern(cls, (int(n), role))


def at_most_one(r: Role) -> AtMost:
    return AtMost(1, r)


def at_least_two(r: Role) -> AtLeast:
    return AtLeast(2, r)


TOP_ATOM = Atom(RESERVED_PREFIX + "top")
TOP = Or(TOP_ATOM, Not(TOP_ATOM))
BOTTOM = And(TOP_ATOM, Not(TOP_ATOM))


def conjoin(items) -> Concept:
    """Right-nested conjunction; the empty conjunction is TOP."""
    items = list(items)
    if not items:
        return TOP
    out = items[-1]
    for c in reversed(items[:-1]):
        out = And(c, out)
    return out


def disjoin(items) -> Concept:
    """Right-nested disjunction; the empty disjunction is BOTTOM."""
    items = list(items)
    if not items:
        return BOTTOM
    out = items[-1]
    for c in reversed(items[:-1]):
        out = Or(c, out)
    return out


_NNF: dict[Concept, Concept] = {}
_NEG: dict[Concept, Concept] = {}


def to_nnf(c: Concept) -> Concept:
    """Push negations inwards until they only sit on atoms."""
    hit = _NNF.get(c)
    if hit is not None:
        return hit
    if isinstance(c, Atom):
        out = c
    elif isinstance(c, Not):
        out = negate(c.operand)
    elif isinstance(c, And):
        out = And(to_nnf(c.left), to_nnf(c.right))
    elif isinstance(c, Or):
        out = Or(to_nnf(c.left), to_nnf(c.right))
    elif isinstance(c, Exists):
        out = Exists(c.role, to_nnf(c.filler))
    elif isinstance(c, ForAll):
        out = ForAll(c.role, to_nnf(c.filler))
    else:
        out = c
    _NNF[c] = out
    return out


def negate(c: Concept) -> Concept:
    """NNF of the complement of ``c``."""
    hit = _NEG.get(c)
    if hit is not None:
        return hit
    if isinstance(c, Atom):
        out = Not(c)
    elif isinstance(c, Not):
        out = to_nnf(c.operand)
    elif isinstance(c, And):
        out = Or(negate(c.left), negate(c.right))
    elif isinstance(c, Or):
        out = And(negate(c.left), negate(c.right))
    elif isinstance(c, Exists):
        out = ForAll(c.role, negate(c.filler))
    elif isinstance(c, ForAll):
        out = Exists(c.role, negate(c.filler))
    elif isinstance(c, AtMost):
        out = AtLeast(c.n + 1, c.role)
    elif isinstance(c, AtLeast):
        if c.n == 1:
            # not (>= 1 R) is (<= 0 R)
            out = AtMost(0, c.role)
        else:
            out = AtMost(c.n - 1, c.role)
    else:  # pragma: no cover
        raise TypeError(c)
    _NEG[c] = out
    return out


def is_nnf(c: Concept) -> bool:
    if isinstance(c, Not):
        return isinstance(c.operand, Atom)
    return all(is_nnf(x) for x in c.children())


def walk(c: Concept) -> Iterator[Concept]:
    """Pre-order traversal, duplicates included."""
    stack = [c]
    while stack:
        x = stack.pop()
        yield x
        stack.extend(reversed(x.children()))


def size(c: Concept) -> int:
    """Number of symbols: constructors, atoms and role occurrences."""
    n = 0
    for x in walk(c):
        n += 1
        if isinstance(x, (Exists, ForAll, AtMost, AtLeast)):
            n += 1
    return n


def atoms_of(c: Concept) -> set[str]:
    return {x.name for x in walk(c) if isinstance(x, Atom)}


def roles_of(c: Concept) -> set[Role]:
    return {x.role for x in walk(c) if isinstance(x, (Exists, ForAll, AtMost, AtLeast))}


def role_names_of(c: Concept) -> set[str]:
    return {r.name for r in roles_of(c)}


def substitute(c: Concept, table: dict[str, Concept]) -> Concept:
    """Replace atoms named in ``table`` by their definitions (single pass)."""
    if isinstance(c, Atom):
        return table.get(c.name, c)
    if isinstance(c, Not):
        return Not(substitute(c.operand, table))
    if isinstance(c, And):
        return And(substitute(c.left, table), substitute(c.right, table))
    if isinstance(c, Or):
        return Or(substitute(c.left, table), substitute(c.right, table))
    if isinstance(c, Exists):
        return Exists(c.role, substitute(c.filler, table))
    if isinstance(c, ForAll):
        return ForAll(c.role, substitute(c.filler, table))
    return c


def sub_closure(d: Concept, rb=None) -> set[Concept]:
    """Subconcepts of ``d``.

    With a role box, the set is also closed under the value restrictions the
    transitive-propagation rule can introduce: ∀R.C for each ∀S.C present and
    each transitive R with R ⊑* S.
    """
    out: set[Concept] = set()
    stack = [d]
    while stack:
        x = stack.pop()
        if x in out:
            continue
        out.add(x)
        stack.extend(x.children())
        if rb is not None and isinstance(x, ForAll):
            for r in rb.transitive_subroles(x.role):
                stack.append(ForAll(r, x.filler))
    return out
