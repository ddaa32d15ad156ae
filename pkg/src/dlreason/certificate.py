"""Frozen completion trees and what can be built from them.

A satisfiable run leaves behind a complete, clash-free completion tree. This
module snapshots it and turns it into something the oracle can check: a
finite interpretation when no node is blocked, and otherwise a tableau
structure obtained by unravelling paths through blocked nodes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .syntax import Atom, Concept, Role, RoleBox, roles_of

UNBLOCKED = "unblocked"
DIRECT = "direct"
INDIRECT = "indirect"


@dataclass(frozen=True)
class NodeView:
    id: int
    parent: Optional[int]
    depth: int
    label: frozenset
    edge: frozenset  # roles on the edge from the parent; empty for the root or a pruned edge
    children: tuple
    status: str = UNBLOCKED
    blocker: Optional[int] = None
    core: Optional[frozenset] = None  # SI only
    cached: bool = False


@dataclass
class CompletionTree:
    nodes: dict
    root: int
    rbox: RoleBox
    concept: Concept

    def __iter__(self):
        return iter(self.nodes.values())

    def __len__(self):
        return len(self.nodes)

    def node(self, i: int) -> NodeView:
        return self.nodes[i]

    def live(self) -> list[NodeView]:
        """Nodes that contribute to a model: not pruned and not below a block."""
        return [n for n in self.nodes.values() if n.status != INDIRECT]

    def blocked(self) -> list[NodeView]:
        return [n for n in self.nodes.values() if n.status == DIRECT]

    @property
    def has_block(self) -> bool:
        return any(n.status == DIRECT for n in self.nodes.values())

    @property
    def has_cached(self) -> bool:
        return any(n.cached for n in self.nodes.values())

    def height(self) -> int:
        return max((n.depth for n in self.live()), default=0)

    def _rbox(self) -> RoleBox:
        names = set()
        for n in self.nodes.values():
            for c in n.label:
                names |= {r.name for r in roles_of(c)}
            names |= {r.name for r in n.edge}
        names |= {r.name for r in roles_of(self.concept)}
        return self.rbox.with_roles(names)

    def to_interpretation(self):
        """The finite model read off a block-free tree."""
        from .oracle import Interpretation, close_roles

        if self.has_block:
            raise ValueError("tree contains a blocked node; unravel it instead")
        rb = self._rbox()
        live = [n for n in self.live()]
        ids = {n.id: i for i, n in enumerate(sorted(live, key=lambda n: n.id))}
        concept_ext: dict[str, set] = {}
        role_ext: dict[str, set] = {name: set() for name in rb.names}
        for n in live:
            for c in n.label:
                if isinstance(c, Atom):
                    concept_ext.setdefault(c.name, set()).add(ids[n.id])
            if n.parent is None or not n.edge:
                continue
            a, b = ids[n.parent], ids[n.id]
            for s in n.edge:
                _add_pair(role_ext, s, a, b)
        close_roles(role_ext, rb)
        return Interpretation(
            len(ids),
            {k: frozenset(v) for k, v in concept_ext.items()},
            {k: frozenset(v) for k, v in role_ext.items()},
        )

    def unravel(self, depth: Optional[int] = None, max_individuals: int = 50000, through_parents: Optional[bool] = None) -> "TableauStructure":
        """Walks from the root, jumping from each blocked node to its blocker.

        With ``through_parents`` (the default for SI trees, which carry core
        labels) a walk may also step from a node to its tree parent. SI
        blocking only matches a blocked node against its blocker's label, not
        the blocker's parent, so an existential the blocker satisfied upwards
        needs a copy of that parent next to every copy of the blocker. SHIF
        pair-wise blocking already matches the parents, and the extra copy
        would break functional restrictions there.

        Individuals deeper than ``depth`` (default: tree height + 1) are not
        expanded; they are listed in ``frontier`` and exempt from the
        witness-existence checks.
        """
        rb = self._rbox()
        if depth is None:
            depth = self.height() + 1
        if through_parents is None:
            through_parents = any(n.core is not None for n in self.nodes.values())
        labels: dict[int, frozenset] = {}
        edges: dict[Role, set] = {}
        frontier: set[int] = set()
        origin: dict[int, int] = {}
        labels[0] = self.nodes[self.root].label
        origin[0] = self.root
        # (individual, tree node, walk length, tree node the walk arrived from)
        stack = [(0, self.root, 0, None)]
        next_id = 1

        def link(a: int, b: int, roles) -> None:
            for s in roles:
                for t in rb.supers(s):
                    edges.setdefault(t, set()).add((a, b))
                    edges.setdefault(t.inverse, set()).add((b, a))

        while stack:
            ind, tnode, d, came_from = stack.pop()
            view = self.nodes[tnode]
            if view.cached or d >= depth or next_id >= max_individuals:
                frontier.add(ind)
                continue
            for cid in view.children:
                child = self.nodes[cid]
                if not child.edge or child.status == INDIRECT or cid == came_from:
                    continue
                target = child.blocker if child.status == DIRECT else cid
                new = next_id
                next_id += 1
                labels[new] = self.nodes[target].label
                origin[new] = target
                link(ind, new, child.edge)
                # after a jump the blocker's own parent is not represented yet
                stack.append((new, target, d + 1, tnode if target == cid else None))
            up = view.parent
            if through_parents and up is not None and view.edge and up != came_from:
                new = next_id
                next_id += 1
                labels[new] = self.nodes[up].label
                origin[new] = up
                link(new, ind, view.edge)
                stack.append((new, up, d + 1, tnode))
        return TableauStructure(labels, {k: frozenset(v) for k, v in edges.items()}, 0, frozenset(frontier), origin)


def _add_pair(role_ext: dict, s: Role, a: int, b: int) -> None:
    if s.inverted:
        role_ext.setdefault(s.name, set()).add((b, a))
    else:
        role_ext.setdefault(s.name, set()).add((a, b))


@dataclass
class TableauStructure:
    """Individuals with concept labels and a role-to-pairs map E."""

    labels: dict
    edges: dict
    root: int = 0
    frontier: frozenset = frozenset()
    origin: dict = field(default_factory=dict)

    @property
    def individuals(self) -> list[int]:
        return sorted(self.labels)

    def pairs(self, r: Role) -> frozenset:
        return self.edges.get(r, frozenset())


__all__ = ["CompletionTree", "NodeView", "TableauStructure", "UNBLOCKED", "DIRECT", "INDIRECT"]
