"""Satisfiability of SHIF concepts w.r.t. a role hierarchy.

Completion trees carry role sets on edges, so one node can be a successor
for several incomparable roles after a merge. Blocking is pair-wise: a node
and its parent must match an ancestor and its parent, labels and incoming
edge alike.
"""

from __future__ import annotations

from typing import Callable, Iterable, Optional

from .certificate import DIRECT, INDIRECT, UNBLOCKED, CompletionTree, NodeView
from .optimiser import (
    EMPTY,
    OptimiserConfig,
    SatCache,
    SatResult,
    TableauSearch,
)
from .syntax import (
    RESERVED_PREFIX,
    And,
    AtLeast,
    AtMost,
    Atom,
    Concept,
    Exists,
    ForAll,
    Or,
    Role,
    RoleBox,
    conjoin,
    has_inverse,
    negate,
    roles_of,
    sub_closure,
    to_nnf,
    validate,
)


def witness_atom(c: AtLeast) -> Atom:
    """The reserved atom that keeps the two successors of ``c`` apart."""
    r = c.role
    return Atom(f"{RESERVED_PREFIX}ge{c.n}_{r.name}{'-' if r.inverted else ''}")


def working_closure(d: Concept, rb: RoleBox, semantic: bool = True) -> set:
    """sub(D), closed for the transitive-propagation rule, plus the negated
    disjuncts semantic branching may introduce."""
    base = sub_closure(d, rb)
    if not semantic:
        return base
    out = set(base)
    for c in base:
        if isinstance(c, Or):
            out |= sub_closure(negate(c.left), rb)
            out |= sub_closure(negate(c.right), rb)
    return out


def has_clash(rb: RoleBox, label: Iterable[Concept]) -> bool:
    """{A, ¬A}, or {≥2 R, ≤1 S} with R ⊑* S, inside one label."""
    label = set(label)
    for c in label:
        if isinstance(c, Atom) and negate(c) in label:
            return True
        if isinstance(c, AtLeast) and c.n >= 2:
            for x in label:
                if isinstance(x, AtMost) and x.n < c.n and rb.with_roles([c.role.name, x.role.name]).subrole_holds(c.role, x.role):
                    return True
    return False


class _Node:
    __slots__ = ("id", "parent", "children", "depth", "label", "ors", "edge", "dead", "frozen", "cache_checked")

    def __init__(self, nid: int, parent: Optional["_Node"]):
        self.id = nid
        self.parent = parent
        self.children: list[_Node] = []
        self.depth = 0 if parent is None else parent.depth + 1
        self.label: dict[Concept, frozenset] = {}
        self.ors: list[Or] = []
        self.edge: dict[Role, frozenset] = {}
        self.dead = False
        self.frozen = False
        self.cache_checked = False

    def __repr__(self):
        return f"<node {self.id} d={self.depth} {sorted(map(str, self.label))}>"


class ShifSearch(TableauSearch):
    def __init__(
        self,
        d: Concept,
        rb: Optional[RoleBox] = None,
        config: Optional[OptimiserConfig] = None,
        cache: Optional[SatCache] = None,
        trace: Optional[Callable] = None,
    ):
        super().__init__(config)
        rb = (rb or RoleBox()).with_roles(r.name for r in roles_of(d))
        self.d = d
        self.rb = rb
        self.trace = trace
        self._sup = {r: rb.supers(r) for r in rb.roles()}
        self._inverse = has_inverse(d, rb)
        self.cache = cache if cache is not None else (SatCache() if self.config.cache_enabled(self._inverse) else None)
        self.nodes: list[_Node] = []
        self._ids = 0
        self.m = len(sub_closure(d))
        self.stats.out_degree_bound = 2 * len(working_closure(d, rb, self.config.semantic_branching))

    # -- tree plumbing ------------------------------------------------------

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

    def _new_node(self, parent: Optional[_Node]) -> _Node:
        n = _Node(self._ids, parent)
        self._ids += 1
        self.nodes.append(n)
        if parent is not None:
            parent.children.append(n)
        self._trail.append((self._pop_node,))
        st = self.stats
        st.nodes_created += 1
        st.max_path = max(st.max_path, n.depth)
        st.peak_live_nodes = max(st.peak_live_nodes, len(self.nodes))
        if parent is not None:
            deg = len(parent.children)
            st.max_out_degree = max(st.max_out_degree, deg)
            if deg > st.out_degree_bound:
                st.bound_violations.append(("out-degree", parent.id, deg, st.out_degree_bound))
        self._emit(("node", n.id, None if parent is None else parent.id))
        if self.config.max_nodes is not None and st.nodes_created > self.config.max_nodes:
            self._check_budget()
        return n

    def _add(self, node: _Node, c: Concept, deps: frozenset) -> Optional[frozenset]:
        lab = node.label
        if c in lab:
            return None
        lab[c] = deps
        self._trail.append((lab.pop, c))
        if isinstance(c, Or):
            node.ors.append(c)
            self._trail.append((node.ors.pop,))
            self._note_or(node)
        if node.frozen:
            self._set(node, "frozen", False)
            self._set(node, "cache_checked", False)
        self._dirty.add(node)
        self._emit(("label", node.id, c))
        neg = negate(c)
        if neg in lab:
            return deps | lab[neg]
        if isinstance(c, AtLeast):
            for x, xd in lab.items():
                if isinstance(x, AtMost) and x.n < c.n and x.role in self._sup[c.role]:
                    return deps | xd
        elif isinstance(c, AtMost):
            for x, xd in lab.items():
                if isinstance(x, AtLeast) and c.n < x.n and c.role in self._sup[x.role]:
                    return deps | xd
        self._queue.append((node, c))
        return None

    def _add_edge(self, node: _Node, s: Role, deps: frozenset) -> None:
        if s in node.edge:
            return
        node.edge[s] = deps
        self._trail.append((node.edge.pop, s))
        self._emit(("edge", node.id, s))
        self._requeue(node)
        if node.parent is not None:
            self._requeue(node.parent)

    def _requeue(self, node: _Node) -> None:
        q = self._queue
        for c in node.label:
            if isinstance(c, (ForAll, AtMost)):
                q.append((node, c))

    def _prune(self, y: _Node) -> None:
        self._set(y, "edge", {})
        self._emit(("prune", y.id))
        stack = [y]
        while stack:
            n = stack.pop()
            if not n.dead:
                self._set(n, "dead", True)
            stack.extend(n.children)

    def neighbours(self, x: _Node, r: Role) -> list:
        """R-neighbours of x as (node, deps of the connecting edge role)."""
        out = []
        sup = self._sup
        for ch in x.children:
            if ch.dead:
                continue
            for s, d in ch.edge.items():
                if r in sup[s]:
                    out.append((ch, d))
                    break
        p = x.parent
        if p is not None and not x.dead:
            ir = r.inverse
            for s, d in x.edge.items():
                if ir in sup[s]:
                    out.append((p, d))
                    break
        return out

    # -- rules ----------------------------------------------------------------

    def _start(self):
        root = self._new_node(None)
        return self._add(root, self.d, EMPTY)

    def _process(self, node: _Node, c: Concept):
        if isinstance(c, And):
            deps = node.label[c]
            clash = self._add(node, c.left, deps)
            if clash is None:
                clash = self._add(node, c.right, deps)
            return clash
        if isinstance(c, ForAll):
            deps = node.label[c]
            for y, ed in self.neighbours(node, c.role):
                clash = self._add(y, c.filler, deps | ed)
                if clash is not None:
                    return clash
            for r in self.rb.transitive_subroles(c.role):
                fr = ForAll(r, c.filler)
                for y, ed in self.neighbours(node, r):
                    clash = self._add(y, fr, deps | ed)
                    if clash is not None:
                        return clash
            return None
        if isinstance(c, AtMost) and c.n == 1:
            return self._merge(node, c)
        return None

    def _merge(self, x: _Node, c: AtMost):
        nb = self.neighbours(x, c.role)
        if len(nb) < 2:
            return None
        parent = x.parent
        up = [(n, d) for n, d in nb if n is parent]
        down = sorted(((n, d) for n, d in nb if n is not parent), key=lambda t: t[0].id)
        # y is folded into z; y is never an ancestor of z. Between two
        # children the older one goes.
        if up:
            (z, zd), (y, yd) = up[0], down[-1]
        else:
            (y, yd), (z, zd) = down[-2], down[-1]
        md = x.label[c] | yd | zd
        self.stats.merges += 1
        for lc, ld in list(y.label.items()):
            clash = self._add(z, lc, ld | md)
            if clash is not None:
                return clash
        if z is parent:
            for s, sd in list(y.edge.items()):
                self._add_edge(x, s.inverse, sd | md)
        else:
            for s, sd in list(y.edge.items()):
                self._add_edge(z, s, sd | md)
        self._prune(y)
        self._requeue(x)
        self._requeue(z)
        return None

    def _branchable(self, node: _Node) -> bool:
        return not node.dead

    # -- blocking -------------------------------------------------------------

    def find_blocker(self, x: _Node) -> Optional[_Node]:
        """Shallowest ancestor that pair-wise blocks x (ancestors assumed unblocked)."""
        xp = x.parent
        if xp is None:
            return None
        chain = []
        a = xp
        while a is not None:
            chain.append(a)
            a = a.parent
        xl, pl, el = x.label, xp.label, x.edge
        n = len(xl)
        for y in reversed(chain):
            yp = y.parent
            if yp is None or len(y.label) != n:
                continue
            if y.label.keys() == xl.keys() and yp.label.keys() == pl.keys() and y.edge.keys() == el.keys():
                return y
        return None

    def statuses(self) -> dict:
        """Blocking status of every node, computed top-down: id -> (status, blocker id)."""
        out: dict[int, tuple] = {}
        for n in self.nodes:
            if n.dead:
                out[n.id] = (INDIRECT, None)
            elif n.parent is None:
                out[n.id] = (UNBLOCKED, None)
            elif out[n.parent.id][0] != UNBLOCKED:
                out[n.id] = (INDIRECT, None)
            else:
                b = self.find_blocker(n)
                out[n.id] = (DIRECT, b.id) if b is not None else (UNBLOCKED, None)
        return out

    def _blocked_lazy(self):
        memo: dict[int, bool] = {}

        def blocked(n: _Node) -> bool:
            v = memo.get(n.id)
            if v is not None:
                return v
            if n.dead:
                v = True
            elif n.parent is None:
                v = False
            elif blocked(n.parent):
                v = True
            else:
                v = self.find_blocker(n) is not None
            memo[n.id] = v
            return v

        return blocked

    # -- generating rules -------------------------------------------------------

    def _pending(self, x: _Node):
        """First generating rule instance applicable at x, if any."""
        for c in x.label:
            if isinstance(c, Exists):
                if not any(c.filler in y.label for y, _ in self.neighbours(x, c.role)):
                    return c
            elif isinstance(c, AtLeast) and c.n == 2:
                w = witness_atom(c)
                if not any(w in y.label for y, _ in self.neighbours(x, c.role)):
                    return c
        return None

    def _generate(self):
        # Newest node first: a path runs until it is blocked before its
        # siblings widen the tree. Pair-wise blocking only appears once the
        # labels near the leaf have settled, so breadth-first order can build
        # an exponentially wide tree first.
        blocked = self._blocked_lazy()
        for x in reversed(self.nodes):
            if x.dead or x.frozen:
                continue
            c = self._pending(x)
            if c is None or blocked(x):
                continue
            if self.cache is not None and x.parent is not None and not x.cache_checked:
                res = self._consult_cache(x)
                if res is True:
                    continue
                if res is not None:
                    return res
            deps = x.label[c]
            if isinstance(c, Exists):
                y = self._new_node(x)
                self._add_edge(y, c.role, deps)
                clash = self._add(y, c.filler, deps)
                return True if clash is None else clash
            w = witness_atom(c)
            for lit in (w, negate(w)):
                y = self._new_node(x)
                self._add_edge(y, c.role, deps)
                clash = self._add(y, lit, deps)
                if clash is not None:
                    return clash
            return True
        return None

    def _cacheable(self, x: _Node) -> bool:
        if not self._inverse:
            return True
        # Experimental mode: only when nothing in x's label can reach back
        # to its parent.
        sup = self._sup
        for c in x.label:
            for t in roles_of(c):
                it = t.inverse
                if any(it in sup.get(s, ()) for s in x.edge):
                    return False
        return True

    def _consult_cache(self, x: _Node):
        """True when x is known satisfiable (and frozen), a clash when known
        unsatisfiable, None when the cache cannot help."""
        self._set(x, "cache_checked", True)
        if not self._cacheable(x):
            return None
        key = frozenset(x.label)
        status = self.cache.lookup(key)
        if status is None:
            self.stats.cache_misses += 1
            sub = ShifSearch(conjoin(sorted(key, key=lambda c: c.uid)), self.rb, self.config, cache=self.cache)
            sub._deadline = self._deadline
            status = sub.search()
            self.stats.absorb(sub.stats)
            self.cache.store(key, status)
        else:
            self.stats.cache_hits += 1
        if status:
            self._set(x, "frozen", True)
            return True
        weak = EMPTY
        for d in x.label.values():
            weak = weak | d
        for d in x.edge.values():
            weak = weak | d
        return weak

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
                frozenset(n.edge),
                tuple(ch.id for ch in n.children),
                s,
                b,
                None,
                n.frozen,
            )
        return CompletionTree(views, self.nodes[0].id, self.rb, self.d)


def is_satisfiable(
    d: Concept,
    rb: Optional[RoleBox] = None,
    opts: Optional[OptimiserConfig] = None,
    trace: Optional[Callable] = None,
) -> SatResult:
    """Decide satisfiability of a SHIF concept w.r.t. a role hierarchy.

    Raises ResourceLimitExceeded when a configured budget runs out and
    FragmentError for input outside SHIF.
    """
    rb = rb or RoleBox()
    d = to_nnf(d)
    validate(d, rb, "shif")
    s = ShifSearch(d, rb, opts, trace=trace)
    sat = s.search()
    return SatResult(sat, s.stats, s.snapshot() if sat else None, s.clash_deps)


def r_neighbours(t: CompletionTree, x: int, r: Role) -> set:
    """Ids of the R-neighbours of node x in a frozen tree."""
    rb = t.rbox.with_roles([r.name])
    out = set()
    node = t.node(x)
    for cid in node.children:
        ch = t.node(cid)
        if any(rb.subrole_holds(s, r) for s in ch.edge):
            out.add(cid)
    if node.parent is not None and any(rb.subrole_holds(s, r.inverse) for s in node.edge):
        out.add(node.parent)
    return out


def is_directly_blocked(t: CompletionTree, x: int) -> Optional[int]:
    """The shallowest ancestor that pair-wise blocks x, if any."""
    node = t.node(x)
    if node.parent is None:
        return None
    xp = t.node(node.parent)
    chain = []
    a = xp
    while a is not None:
        chain.append(a)
        a = t.node(a.parent) if a.parent is not None else None
    for y in reversed(chain):
        if y.parent is None:
            continue
        yp = t.node(y.parent)
        if y.label == node.label and yp.label == xp.label and y.edge == node.edge:
            return y.id
    return None


def apply_rule(search: ShifSearch):
    """Fire one rule instance on a running search; see TableauSearch.apply_rule."""
    return search.apply_rule()


__all__ = [
    "ShifSearch",
    "apply_rule",
    "has_clash",
    "is_directly_blocked",
    "is_satisfiable",
    "r_neighbours",
    "witness_atom",
    "working_closure",
]
