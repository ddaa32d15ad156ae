"""Satisfiability of SI concepts.

Each node carries two labels, a core B(x) of concepts pushed down from the
predecessor or present at creation, inside the full label L(x). Blocking
only asks the core to fit into an ancestor's label, provided both agree on
their universal restrictions over the inverse of the incoming role. This
keeps paths polynomially short.

The bounded strategy deletes every successor of a node whenever something is
propagated up into it, regenerates them on demand, and throws away subtrees
as soon as they are finished, so only the current path stays live.
"""

from __future__ import annotations

from typing import Callable, Optional

from .certificate import DIRECT, INDIRECT, UNBLOCKED, CompletionTree, NodeView
from .optimiser import EMPTY, OptimiserConfig, SatResult, TableauSearch
from .shif_engine import working_closure
from .syntax import (
    And,
    Concept,
    Exists,
    ForAll,
    Or,
    Role,
    RoleBox,
    negate,
    roles_of,
    sub_closure,
    to_nnf,
    validate,
)

STRATEGIES = ("unbounded", "bounded")

ALIVE = 0
DELETED = 1
DISCARDED = 2


class _SiNode:
    __slots__ = ("id", "parent", "children", "depth", "label", "ors", "core", "role", "edge_deps", "state")

    def __init__(self, nid: int, parent: Optional["_SiNode"], role: Optional[Role], deps: frozenset):
        self.id = nid
        self.parent = parent
        self.children: list[_SiNode] = []
        self.depth = 0 if parent is None else parent.depth + 1
        self.label: dict[Concept, frozenset] = {}
        self.ors: list[Or] = []
        self.core: set[Concept] = set()
        self.role = role
        self.edge_deps = deps
        self.state = ALIVE

    @property
    def dead(self) -> bool:
        return self.state == DELETED

    def __repr__(self):
        return f"<si-node {self.id} d={self.depth} {sorted(map(str, self.label))}>"


class SiSearch(TableauSearch):
    def __init__(
        self,
        d: Concept,
        config: Optional[OptimiserConfig] = None,
        strategy: str = "unbounded",
        trace: Optional[Callable] = None,
        rb: Optional[RoleBox] = None,
    ):
        super().__init__(config)
        if strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")
        self.d = d
        self.rb = (rb or RoleBox()).with_roles(r.name for r in roles_of(d))
        self.strategy = strategy
        self.trace = trace
        self.nodes: list[_SiNode] = []
        self._ids = 0
        self._live = 0
        self.m = len(working_closure(d, self.rb, self.config.semantic_branching))
        self.stats.path_bound = self.m ** 4

    # -- plumbing -------------------------------------------------------------

    def _emit(self, rec) -> None:
        if self.trace is not None:
            self.trace(rec)

    def _set(self, obj, name, value) -> None:
        self._trail.append((setattr, obj, name, getattr(obj, name)))
        setattr(obj, name, value)

    def _pop_node(self) -> None:
        n = self.nodes.pop()
        self._forget(n)
        if n.parent is not None:
            n.parent.children.pop()
        self._live -= 1

    def _set_state(self, n: _SiNode, state: int) -> None:
        if n.state == state:
            return
        old = n.state
        self._trail.append((self._restore_state, n, old))
        if old == ALIVE:
            self._live -= 1
        if state == ALIVE:
            self._live += 1
        n.state = state

    def _restore_state(self, n: _SiNode, old: int) -> None:
        if n.state == ALIVE:
            self._live -= 1
        if old == ALIVE:
            self._live += 1
        n.state = old

    def _new_node(self, parent: Optional[_SiNode], role: Optional[Role], deps: frozenset) -> _SiNode:
        n = _SiNode(self._ids, parent, role, deps)
        self._ids += 1
        self.nodes.append(n)
        if parent is not None:
            parent.children.append(n)
        self._live += 1
        self._trail.append((self._pop_node,))
        st = self.stats
        st.nodes_created += 1
        st.max_path = max(st.max_path, n.depth)
        st.peak_live_nodes = max(st.peak_live_nodes, self._live)
        if parent is not None:
            st.max_out_degree = max(st.max_out_degree, sum(1 for c in parent.children if c.state != DELETED))
        if n.depth > st.path_bound:
            st.bound_violations.append(("path", n.id, n.depth, st.path_bound))
        self._emit(("node", n.id, None if parent is None else parent.id))
        if self.config.max_nodes is not None and st.nodes_created > self.config.max_nodes:
            self._check_budget()
        return n

    def _add(self, node: _SiNode, c: Concept, deps: frozenset, core: bool = False) -> Optional[frozenset]:
        if core and c not in node.core:
            node.core.add(c)
            self._trail.append((node.core.discard, c))
            self._emit(("core", node.id, c))
        lab = node.label
        if c in lab:
            return None
        lab[c] = deps
        self._trail.append((lab.pop, c))
        if isinstance(c, Or):
            node.ors.append(c)
            self._trail.append((node.ors.pop,))
            self._note_or(node)
        self._dirty.add(node)
        self._emit(("label", node.id, c))
        neg = negate(c)
        if neg in lab:
            return deps | lab[neg]
        self._queue.append((node, c))
        return None

    def _delete_successors(self, y: _SiNode) -> None:
        stack = list(y.children)
        while stack:
            n = stack.pop()
            if n.state != DELETED:
                self._set_state(n, DELETED)
                self._emit(("delete", n.id))
            stack.extend(n.children)

    # -- rules ----------------------------------------------------------------

    def _start(self):
        root = self._new_node(None, None, EMPTY)
        return self._add(root, self.d, EMPTY, core=True)

    def _push_up(self, x: _SiNode, c: Concept, deps: frozenset):
        """Predecessor case: add c to L(parent) only."""
        p = x.parent
        if c in p.label:
            return None
        if self.strategy == "bounded":
            self._delete_successors(p)
        return self._add(p, c, deps | x.edge_deps)

    def _process(self, x: _SiNode, c: Concept):
        if isinstance(c, And):
            deps = x.label[c]
            clash = self._add(x, c.left, deps)
            if clash is None:
                clash = self._add(x, c.right, deps)
            return clash
        if not isinstance(c, ForAll):
            return None
        deps = x.label[c]
        s = c.role
        trans = self.rb.is_transitive(s)
        targets = [c.filler, c] if trans else [c.filler]
        for y in x.children:
            if y.state == DELETED or y.role is not s:
                continue
            for t in targets:
                if t not in y.core:
                    clash = self._add(y, t, deps | y.edge_deps, core=True)
                    if clash is not None:
                        return clash
        if x.parent is not None and x.role is s.inverse and x.state == ALIVE:
            for t in targets:
                clash = self._push_up(x, t, deps)
                if clash is not None:
                    return clash
                if x.state == DELETED:
                    break
        return None

    def _branchable(self, node: _SiNode) -> bool:
        return node.state == ALIVE

    # -- blocking -------------------------------------------------------------

    @staticmethod
    def _restrict(label, r: Role) -> set:
        return {c for c in label if isinstance(c, ForAll) and c.role is r}

    def find_blocker(self, x: _SiNode) -> Optional[_SiNode]:
        if x.parent is None:
            return None
        ir = x.role.inverse
        xr = self._restrict(x.label, ir)
        chain = []
        a = x.parent
        while a is not None:
            chain.append(a)
            a = a.parent
        for y in reversed(chain):
            if all(c in y.label for c in x.core) and self._restrict(y.label, ir) == xr:
                return y
        return None

    def _blocked_lazy(self):
        memo: dict[int, bool] = {}

        def blocked(n: _SiNode) -> bool:
            v = memo.get(n.id)
            if v is None:
                if n.parent is None:
                    v = False
                elif blocked(n.parent):
                    v = True
                else:
                    v = self.find_blocker(n) is not None
                memo[n.id] = v
            return v

        return blocked

    def statuses(self) -> dict:
        out: dict[int, tuple] = {}
        for n in self.nodes:
            if n.state == DELETED:
                out[n.id] = (INDIRECT, None)
            elif n.parent is None:
                out[n.id] = (UNBLOCKED, None)
            elif out[n.parent.id][0] != UNBLOCKED:
                out[n.id] = (INDIRECT, None)
            else:
                b = self.find_blocker(n)
                out[n.id] = (DIRECT, b.id) if b is not None else (UNBLOCKED, None)
        return out

    # -- generating rule ------------------------------------------------------

    def _neighbour_has(self, x: _SiNode, s: Role, c: Concept) -> bool:
        for y in x.children:
            if y.state != DELETED and y.role is s and c in y.label:
                return True
        p = x.parent
        return p is not None and x.role is s.inverse and c in p.label

    def _pending(self, x: _SiNode):
        for c in x.label:
            if isinstance(c, Exists) and not self._neighbour_has(x, c.role, c.filler):
                return c
        return None

    def _generate(self):
        blocked = self._blocked_lazy()
        if self.strategy == "unbounded":
            for x in self.nodes:
                if x.state != ALIVE:
                    continue
                c = self._pending(x)
                if c is not None and not blocked(x):
                    return self._fire(x, c)
            return None
        # Bounded: depth-first. A node may only generate once no ancestor
        # can; the most recent such node goes first. Finished subtrees are
        # discarded before looking for work.
        pending: dict[int, object] = {}
        for x in self.nodes:
            if x.state == ALIVE:
                c = self._pending(x)
                if c is not None and not blocked(x):
                    pending[x.id] = c
        busy: set[int] = set()
        for x in reversed(self.nodes):
            if x.state == ALIVE and (x.id in pending or any(ch.id in busy for ch in x.children)):
                busy.add(x.id)
        for x in self.nodes:
            if x.state == ALIVE and x.parent is not None and x.id not in busy and x.parent.id in busy:
                self._discard(x)
        best = None
        for x in self.nodes:
            if x.id not in pending or x.state != ALIVE:
                continue
            a = x.parent
            while a is not None and a.id not in pending:
                a = a.parent
            if a is None:
                best = x
        if best is None:
            return None
        return self._fire(best, pending[best.id])

    def _discard(self, x: _SiNode) -> None:
        stack = [x]
        while stack:
            n = stack.pop()
            if n.state == ALIVE:
                self._set_state(n, DISCARDED)
            stack.extend(n.children)

    def _fire(self, x: _SiNode, c: Exists):
        deps = x.label[c]
        y = self._new_node(x, c.role, deps)
        clash = self._add(y, c.filler, deps, core=True)
        if clash is not None:
            return clash
        # universal restrictions at x reach the new successor
        for u in x.label:
            if isinstance(u, ForAll) and u.role is c.role:
                self._queue.append((x, u))
        return True

    # -- result -----------------------------------------------------------------

    def snapshot(self) -> CompletionTree:
        st = self.statuses()
        views = {}
        for n in self.nodes:
            s, b = st[n.id]
            views[n.id] = NodeView(
                n.id,
                None if n.parent is None else n.parent.id,
                n.depth,
                frozenset(n.label),
                frozenset() if n.role is None or n.state == DELETED else frozenset([n.role]),
                tuple(ch.id for ch in n.children),
                s,
                b,
                frozenset(n.core),
            )
        return CompletionTree(views, self.nodes[0].id, self.rb, self.d)


def _prepare(d: Concept, rb: Optional[RoleBox]) -> Concept:
    d = to_nnf(d)
    validate(d, rb or RoleBox(), "si")
    return d


def si_is_satisfiable(
    d: Concept, opts: Optional[OptimiserConfig] = None, trace: Optional[Callable] = None, rb: Optional[RoleBox] = None
) -> SatResult:
    """Decide satisfiability of an SI concept (unbounded strategy).

    ``rb`` only contributes transitivity; SI has no role inclusions.
    """
    d = _prepare(d, rb)
    s = SiSearch(d, opts, "unbounded", trace, rb)
    sat = s.search()
    return SatResult(sat, s.stats, s.snapshot() if sat else None, s.clash_deps)


def si_is_satisfiable_bounded(
    d: Concept, opts: Optional[OptimiserConfig] = None, trace: Optional[Callable] = None, rb: Optional[RoleBox] = None
) -> SatResult:
    """Same contract, depth-first with successor deletion.

    No tree is returned: finished subtrees have been thrown away.
    """
    d = _prepare(d, rb)
    s = SiSearch(d, opts, "bounded", trace, rb)
    sat = s.search()
    return SatResult(sat, s.stats, None, s.clash_deps)


def si_is_blocked(t: CompletionTree, x: int) -> bool:
    """Blocking test on a frozen SI tree (core labels required)."""
    node = t.node(x)
    if node.parent is None:
        return False
    (s,) = tuple(node.edge) or (None,)
    if s is None:
        return True
    ir = s.inverse

    def restrict(label):
        return {c for c in label if isinstance(c, ForAll) and c.role is ir}

    chain = []
    a = t.node(node.parent)
    while a is not None:
        chain.append(a)
        a = t.node(a.parent) if a.parent is not None else None
    for y in reversed(chain):
        if y.parent is not None and si_is_blocked(t, y.id):
            return True
        if node.core <= y.label and restrict(node.label) == restrict(y.label):
            return True
    return False


def si_apply_rule(search: SiSearch):
    return search.apply_rule()


__all__ = [
    "STRATEGIES",
    "SiSearch",
    "si_apply_rule",
    "si_is_blocked",
    "si_is_satisfiable",
    "si_is_satisfiable_bounded",
    "sub_closure",
]
