from __future__ import annotations

from collections import defaultdict
from typing import Iterable

from .concepts import Role


class UnknownRoleError(KeyError):
    pass


class RoleBox:
    """Role names, transitivity and the sub-role relation ⊑*.

    ⊑* is computed once, at construction, as the reflexive-transitive closure
    of the inclusions together with their inverse copies. Instances are
    immutable; use :meth:`with_roles` to get an extended copy.
    """

    def __init__(
        self,
        roles: Iterable[str] = (),
        transitive: Iterable[str] = (),
        inclusions: Iterable[tuple[Role, Role]] = (),
    ):
        inclusions = tuple(dict.fromkeys((r, s) for r, s in inclusions))
        transitive = frozenset(transitive)
        names = set(roles) | set(transitive)
        for r, s in inclusions:
            names.add(r.name)
            names.add(s.name)
        self.names: frozenset[str] = frozenset(names)
        self.transitive_names: frozenset[str] = transitive
        self.inclusions: tuple[tuple[Role, Role], ...] = inclusions

        every = [Role(n, False) for n in sorted(self.names)] + [Role(n, True) for n in sorted(self.names)]
        up: dict[Role, set[Role]] = defaultdict(set)
        for r, s in inclusions:
            up[r].add(s)
            up[r.inverse].add(s.inverse)
        supers: dict[Role, frozenset[Role]] = {}
        for r in every:
            seen = {r}
            stack = [r]
            while stack:
                x = stack.pop()
                for y in up.get(x, ()):
                    if y not in seen:
                        seen.add(y)
                        stack.append(y)
            supers[r] = frozenset(seen)
        subs: dict[Role, set[Role]] = {r: set() for r in every}
        for r, ups in supers.items():
            for s in ups:
                subs[s].add(r)
        self._supers = supers
        self._subs = {r: frozenset(v) for r, v in subs.items()}
        self._trans_subs = {
            s: tuple(sorted((r for r in v if self.is_transitive(r)), key=lambda r: (r.name, r.inverted)))
            for s, v in self._subs.items()
        }

    # -- queries ---------------------------------------------------------

    def roles(self) -> list[Role]:
        """All declared roles and their inverses."""
        return list(self._supers)

    def _check(self, r: Role) -> None:
        if r.name not in self.names:
            raise UnknownRoleError(r.name)

    def subrole_holds(self, r: Role, s: Role) -> bool:
        """r ⊑* s"""
        self._check(r)
        self._check(s)
        return s in self._supers[r]

    def supers(self, r: Role) -> frozenset[Role]:
        self._check(r)
        return self._supers[r]

    def subs(self, s: Role) -> frozenset[Role]:
        self._check(s)
        return self._subs[s]

    def is_transitive(self, r: Role) -> bool:
        return r.name in self.transitive_names

    def is_simple(self, r: Role) -> bool:
        self._check(r)
        return not any(self.is_transitive(x) for x in self._subs[r])

    def transitive_subroles(self, s: Role) -> tuple[Role, ...]:
        """Transitive R with R ⊑* s (empty for undeclared roles)."""
        return self._trans_subs.get(s, ())

    @property
    def has_hierarchy(self) -> bool:
        return any(r != s for r, s in self.inclusions)

    @property
    def has_inverse(self) -> bool:
        return any(r.inverted or s.inverted for r, s in self.inclusions)

    # -- construction ----------------------------------------------------

    def with_roles(self, names: Iterable[str]) -> "RoleBox":
        names = set(names)
        if names <= self.names:
            return self
        return RoleBox(self.names | names, self.transitive_names, self.inclusions)

    def extended(
        self,
        roles: Iterable[str] = (),
        transitive: Iterable[str] = (),
        inclusions: Iterable[tuple[Role, Role]] = (),
    ) -> "RoleBox":
        return RoleBox(
            self.names | set(roles),
            self.transitive_names | set(transitive),
            self.inclusions + tuple(inclusions),
        )

    def __eq__(self, other):
        if not isinstance(other, RoleBox):
            return NotImplemented
        return (
            self.names == other.names
            and self.transitive_names == other.transitive_names
            and set(self.inclusions) == set(other.inclusions)
        )

    def __hash__(self):
        return hash((self.names, self.transitive_names, frozenset(self.inclusions)))

    def __repr__(self) -> str:
        return (
            f"RoleBox(roles={sorted(self.names)}, transitive={sorted(self.transitive_names)}, "
            f"inclusions={[f'{r} < {s}' for r, s in self.inclusions]})"
        )
