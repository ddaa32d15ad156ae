"""Search control shared by the SI and SHIF engines.

Both engines are depth-first searches over completion trees. This module
owns the parts that do not depend on the logic: dependency sets, the
branch-point stack and backjumping, boolean constraint propagation, the
branching heuristics, the satisfiability cache and the statistics record.
State is restored by trailing (an undo log), never by copying trees.
"""

from __future__ import annotations

import time
from collections import deque
from functools import lru_cache
from dataclasses import asdict, dataclass, field, fields
from typing import Callable, Iterable, Mapping, Optional, Sequence

from .syntax import Concept, Or, negate, to_sexpr

Deps = frozenset
EMPTY: frozenset = frozenset()

HEURISTICS = ("none", "moms", "jw", "oldest", "oldest+jw")
CACHE_MODES = ("off", "on", "experimental")


class ResourceLimitExceeded(RuntimeError):
    """The node or time budget ran out before a verdict was reached."""


@dataclass(frozen=True)
class OptimiserConfig:
    semantic_branching: bool = True
    bcp: bool = True
    backjumping: bool = True
    heuristic: str = "none"
    caching: str = "off"
    max_nodes: Optional[int] = None
    max_ms: Optional[float] = None

    def __post_init__(self):
        if self.heuristic not in HEURISTICS:
            raise ValueError(f"unknown heuristic {self.heuristic!r}; expected one of {HEURISTICS}")
        if self.caching not in CACHE_MODES:
            raise ValueError(f"unknown cache mode {self.caching!r}; expected one of {CACHE_MODES}")

    def cache_enabled(self, inverse_roles: bool) -> bool:
        if self.caching == "off":
            return False
        if inverse_roles:
            return self.caching == "experimental"
        return True

    def label(self) -> str:
        return (
            f"bcp={int(self.bcp)};bj={int(self.backjumping)};"
            f"br={'sem' if self.semantic_branching else 'syn'};h={self.heuristic}"
        )


def flag_matrix() -> list[OptimiserConfig]:
    """The 2x2x2x5 grid of BCP x backjumping x branching x heuristic."""
    out = []
    for bcp in (True, False):
        for bj in (True, False):
            for sem in (True, False):
                for h in HEURISTICS:
                    out.append(OptimiserConfig(semantic_branching=sem, bcp=bcp, backjumping=bj, heuristic=h))
    return out


@dataclass
class Statistics:
    branch_points: int = 0
    backjumps: int = 0
    bcp_firings: int = 0
    cache_hits: int = 0
    cache_misses: int = 0
    max_path: int = 0
    max_out_degree: int = 0
    nodes_created: int = 0
    peak_live_nodes: int = 0
    merges: int = 0
    millis: float = 0.0
    path_bound: Optional[int] = None
    out_degree_bound: Optional[int] = None
    bound_violations: list = field(default_factory=list)

    def as_text(self) -> str:
        lines = []
        for f in fields(self):
            v = getattr(self, f.name)
            if f.name == "bound_violations":
                v = len(v)
            elif f.name == "millis":
                v = f"{v:.3f}"
            lines.append(f"{f.name}={v}")
        return "\n".join(lines)

    def absorb(self, other: "Statistics") -> None:
        """Fold in counters from a nested run (cache sub-searches)."""
        for name in ("branch_points", "backjumps", "bcp_firings", "cache_hits", "cache_misses", "nodes_created", "merges"):
            setattr(self, name, getattr(self, name) + getattr(other, name))
        self.bound_violations.extend(other.bound_violations)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class SatResult:
    """Verdict of one satisfiability run. ``tree`` is set for satisfiable runs."""

    satisfiable: bool
    stats: Statistics
    tree: object = None
    clash_deps: Optional[frozenset] = None

    @property
    def verdict(self) -> str:
        return "sat" if self.satisfiable else "unsat"

    def __bool__(self) -> bool:
        return self.satisfiable


# -- branch points & backjumping --------------------------------------------


@dataclass
class BranchPoint:
    index: int
    node: object
    disjunction: Optional[Concept]
    chosen: Concept
    alternatives: list
    mark: int
    base_deps: frozenset = EMPTY
    kind: str = "semantic"


@dataclass
class JumpTo:
    target: BranchPoint
    discarded: list


@dataclass
class Unsatisfiable:
    discarded: list


def on_clash_backjump(trail: Sequence[BranchPoint], clash_deps: frozenset, backjumping: bool = True):
    """Pick the branch point to resume after a clash.

    With backjumping, that is the most recent open branch point the clash
    depends on; everything above it is dropped unexplored. Without it, the
    most recent open branch point, as in chronological backtracking.
    """
    target = None
    for bp in reversed(trail):
        if not bp.alternatives:
            continue
        if not backjumping or bp.index in clash_deps:
            target = bp
            break
    if target is None:
        return Unsatisfiable(list(trail))
    return JumpTo(target, [bp for bp in trail if bp.index > target.index])


# -- boolean constraint propagation -------------------------------------------


@dataclass
class Simplified:
    additions: list  # (concept, deps)


@dataclass
class ClashDetected:
    deps: frozenset


class NoChange:
    def __repr__(self):
        return "NoChange"


NO_CHANGE = NoChange()


def is_expanded(label: Mapping, o: Or) -> bool:
    return o.left in label or o.right in label


def bcp_simplify(label: Mapping[Concept, frozenset], ors: Optional[Iterable[Or]] = None):
    """One pass of unit propagation over the unexpanded disjunctions of a label.

    A disjunct is refuted when its negation is in the label. One open
    disjunct left means it is added deterministically; none left is a clash
    whose dependencies are those of the disjunction and of both refutations.
    """
    if ors is None:
        ors = [c for c in label if isinstance(c, Or)]
    additions = []
    for o in ors:
        l, r = o.left, o.right
        if l in label or r in label:
            continue
        nl = label.get(negate(l))
        nr = label.get(negate(r))
        if nl is None and nr is None:
            continue
        od = label[o]
        if nl is not None and nr is not None:
            return ClashDetected(od | nl | nr)
        if nl is not None:
            additions.append((r, od | nl))
        else:
            additions.append((l, od | nr))
    return Simplified(additions) if additions else NO_CHANGE


@lru_cache(maxsize=None)
def disjunct_leaves(c: Concept) -> frozenset:
    """The non-disjunction leaves of a nested disjunction."""
    if isinstance(c, Or):
        return disjunct_leaves(c.left) | disjunct_leaves(c.right)
    return frozenset([c])


def implied_disjuncts(label: Mapping[Concept, frozenset], ors: Optional[Iterable[Or]] = None) -> list:
    """Disjuncts that already hold and can be added without a choice.

    When C1 ⊔ (C2 ⊔ C3) is open but C3 is in the label, C2 ⊔ C3 follows from
    the label as it stands. Returns (concept, deps) pairs.
    """
    if ors is None:
        ors = [c for c in label if isinstance(c, Or)]
    out = []
    for o in ors:
        if o.left in label or o.right in label:
            continue
        for side in (o.left, o.right):
            if not isinstance(side, Or):
                continue
            hit = next((x for x in disjunct_leaves(side) if x in label), None)
            if hit is not None:
                out.append((side, label[o] | label[hit]))
                break
    return out


# -- branching heuristics -----------------------------------------------------


@dataclass
class SemanticChoice:
    disjunct: Concept
    positive_first: bool
    disjunction: Or


@dataclass
class SyntacticChoice:
    disjunction: Or
    first: Concept


def disjunction_size(o: Concept) -> int:
    if isinstance(o, Or):
        return disjunction_size(o.left) + disjunction_size(o.right)
    return 1


@lru_cache(maxsize=None)
def _tie_key(c: Concept) -> str:
    # The printed form, not the interning counter: ties then break the same
    # way whatever else the process has parsed before.
    return to_sexpr(c)


def _max_dep(d: frozenset) -> int:
    return max(d) if d else -1


def choose_branch(label: Mapping[Concept, frozenset], config: OptimiserConfig, ors: Optional[Iterable[Or]] = None):
    """Choose what to branch on among the unexpanded disjunctions of ``label``.

    Returns None when every disjunction is already expanded.
    """
    if ors is None:
        ors = [c for c in label if isinstance(c, Or)]
    cands = [o for o in ors if o.left not in label and o.right not in label]
    if not cands:
        return None

    def open_parts(o: Or) -> list:
        return [x for x in (o.left, o.right) if negate(x) not in label]

    # With BCP off a disjunction can have every disjunct refuted; branch on it
    # syntactically, both alternatives then clash straight away.
    for o in cands:
        if not open_parts(o):
            return SyntacticChoice(o, o.left)

    h = config.heuristic
    if h in ("oldest", "oldest+jw"):
        oldest = min(_max_dep(label[o]) for o in cands)
        cands = [o for o in cands if _max_dep(label[o]) == oldest]

    if h in ("none", "oldest"):
        o = cands[0]
        d = open_parts(o)[0]
        positive_first = True
    else:
        pos: dict[Concept, float] = {}
        if h == "moms":
            smallest = min(disjunction_size(o) for o in cands)
            pool = [o for o in cands if disjunction_size(o) == smallest]
            weight = lambda o: 1.0  # noqa: E731
        else:
            pool = cands
            weight = lambda o: 2.0 ** -disjunction_size(o)  # noqa: E731
        owner: dict[Concept, Or] = {}
        for o in pool:
            w = weight(o)
            for x in open_parts(o):
                pos[x] = pos.get(x, 0.0) + w
                owner.setdefault(x, o)

        def score(x):
            return pos.get(x, 0.0) + pos.get(negate(x), 0.0)

        d = min(owner, key=lambda x: (-score(x), _tie_key(x)))
        o = owner[d]
        positive_first = pos.get(d, 0.0) < pos.get(negate(d), 0.0)

    if config.semantic_branching:
        return SemanticChoice(d, positive_first, o)
    return SyntacticChoice(o, d)


# -- satisfiability cache -----------------------------------------------------


class SatCache:
    """Satisfiability status of node labels, keyed by the set of concepts."""

    def __init__(self):
        self._status: dict[frozenset, bool] = {}
        self.hits = 0
        self.misses = 0

    def lookup(self, key: frozenset) -> Optional[bool]:
        v = self._status.get(key)
        if v is None:
            self.misses += 1
        else:
            self.hits += 1
        return v

    def store(self, key: frozenset, sat: bool) -> None:
        self._status[key] = sat

    def __len__(self):
        return len(self._status)


# -- single-step outcomes -------------------------------------------------------


@dataclass(frozen=True)
class Applied:
    changes: tuple


@dataclass(frozen=True)
class Complete:
    pass


@dataclass(frozen=True)
class Clash:
    deps: frozenset


# -- the search driver ----------------------------------------------------------


class TableauSearch:
    """Depth-first tableau search with trailing.

    Subclasses supply the completion-tree rules:

    * ``_start()`` builds the root and returns a clash or None,
    * ``_process(node, concept)`` fires the deterministic rules for one
      queued concept and returns a clash dependency set or None,
    * ``_sweep()`` runs rules not driven by the queue, returning
      (changed, clash),
    * ``_generate()`` fires one generating rule: True when it did, None when
      nothing is left (the tree is complete), or a clash dependency set,
    * ``_branchable(node)`` tells whether the non-deterministic rules may
      fire at a node,
    * ``_add(node, concept, deps)`` adds to a label and returns a clash or
      None.

    Nodes must expose ``id``, ``label`` (concept -> deps) and ``ors`` (the Or
    concepts of the label in insertion order). Engines call ``_note_or``
    whenever a label gains a disjunction and ``_forget`` when a node is
    removed.
    """

    def __init__(self, config: Optional[OptimiserConfig] = None):
        self.config = config or OptimiserConfig()
        self.stats = Statistics()
        self._trail: list = []
        self._queue: deque = deque()
        self._dirty: set = set()
        self._branches: list[BranchPoint] = []
        # nodes that may still have an unexpanded disjunction
        self._open: set = set()
        self._next_bp = 0
        self._deadline: Optional[float] = None
        self.clash_deps: Optional[frozenset] = None
        self.branch_log: list = []
        self.record_branches = False
        self.trace: Optional[Callable] = None
        self._started = False

    # -- trail ------------------------------------------------------------

    def _undo(self, mark: int) -> None:
        trail = self._trail
        while len(trail) > mark:
            rec = trail.pop()
            rec[0](*rec[1:])
        self._queue.clear()
        self._dirty.clear()

    def _check_budget(self) -> None:
        c = self.config
        if c.max_nodes is not None and self.stats.nodes_created > c.max_nodes:
            raise ResourceLimitExceeded(f"node budget of {c.max_nodes} exceeded")
        if self._deadline is not None and time.perf_counter() > self._deadline:
            raise ResourceLimitExceeded(f"time budget of {c.max_ms} ms exceeded")

    # -- deterministic phase ------------------------------------------------

    def _propagate(self) -> Optional[frozenset]:
        q = self._queue
        while True:
            while q:
                node, c = q.popleft()
                if node.dead:
                    continue
                clash = self._process(node, c)
                if clash is not None:
                    return clash
            changed, clash = self._sweep()
            if clash is not None:
                return clash
            if self._dirty:
                dirty = sorted(self._dirty, key=lambda n: n.id)
                self._dirty.clear()
                for node in dirty:
                    if node.dead:
                        continue
                    for c, d in implied_disjuncts(node.label, node.ors):
                        if c not in node.label:
                            clash = self._add(node, c, d)
                            if clash is not None:
                                return clash
                            changed = True
                    if not self.config.bcp:
                        continue
                    res = bcp_simplify(node.label, node.ors)
                    if isinstance(res, ClashDetected):
                        self.stats.bcp_firings += 1
                        return res.deps
                    if isinstance(res, Simplified):
                        for c, d in res.additions:
                            if c in node.label:
                                continue
                            self.stats.bcp_firings += 1
                            clash = self._add(node, c, d)
                            if clash is not None:
                                return clash
                            changed = True
            if not q and not changed:
                return None

    # -- branching ------------------------------------------------------------

    def _note_or(self, node) -> None:
        self._open.add(node)

    def _forget(self, node) -> None:
        self._open.discard(node)

    def _choose(self):
        for node in sorted(self._open, key=lambda n: n.id):
            if not self._branchable(node):
                continue
            choice = choose_branch(node.label, self.config, node.ors)
            if choice is not None:
                return node, choice
            # Labels only grow until the next undo, which puts the node back.
            self._open.discard(node)
            self._trail.append((self._open.add, node))
        return None

    def _open_branch(self, node, choice) -> Optional[frozenset]:
        idx = self._next_bp
        self._next_bp += 1
        if isinstance(choice, SemanticChoice):
            d = choice.disjunct
            first, second = (d, negate(d)) if choice.positive_first else (negate(d), d)
            bp = BranchPoint(idx, node, choice.disjunction, first, [second], len(self._trail), EMPTY, "semantic")
        else:
            o = choice.disjunction
            first = choice.first
            second = o.right if first is o.left else o.left
            bp = BranchPoint(idx, node, o, first, [second], len(self._trail), node.label[o], "syntactic")
        self._branches.append(bp)
        self.stats.branch_points += 1
        if self.record_branches:
            self.branch_log.append((idx, node.id, first, bp.kind))
        return self._add(node, first, bp.base_deps | {idx})

    def _resume(self, bp: BranchPoint, clash: frozenset) -> Optional[frozenset]:
        self._undo(bp.mark)
        alt = bp.alternatives.pop(0)
        deps = (clash - {bp.index}) | bp.base_deps
        if bp.alternatives:
            deps = deps | {bp.index}
        else:
            self._branches.remove(bp)
        self.stats.branch_points += 1
        if self.record_branches:
            self.branch_log.append((bp.index, bp.node.id, alt, bp.kind))
        return self._add(bp.node, alt, deps)

    def backtrack(self, clash: frozenset) -> bool:
        """Resume after ``clash``; False when no alternative is left."""
        while True:
            jump = on_clash_backjump(self._branches, clash, self.config.backjumping)
            if isinstance(jump, Unsatisfiable):
                self.backjumps_from(jump, None)
                self.clash_deps = clash
                return False
            self.backjumps_from(jump, jump.target)
            for bp in jump.discarded:
                self._branches.remove(bp)
            clash = self._resume(jump.target, clash)
            if clash is None:
                return True

    def backjumps_from(self, jump, target) -> None:
        self.stats.backjumps += sum(1 for bp in jump.discarded if bp.alternatives and bp is not target)

    def apply_rule(self):
        """Fire a single rule instance.

        Deterministic rules go first, then branching, then generating rules.
        Returns Applied(change records), Complete or Clash(deps).
        """
        log: list = []
        saved = self.trace
        self.trace = log.append
        try:
            if not self._started:
                self._started = True
                clash = self._start()
                return Clash(clash) if clash is not None else Applied(tuple(log))
            q = self._queue
            while q:
                node, c = q.popleft()
                if node.dead:
                    continue
                clash = self._process(node, c)
                if clash is not None:
                    return Clash(clash)
                if log:
                    return Applied(tuple(log))
            changed, clash = self._sweep()
            if clash is not None:
                return Clash(clash)
            if changed or log:
                return Applied(tuple(log))
            if self._dirty:
                for node in sorted(self._dirty, key=lambda n: n.id):
                    if node.dead:
                        continue
                    for c, d in implied_disjuncts(node.label, node.ors):
                        if c not in node.label:
                            clash = self._add(node, c, d)
                            if clash is not None:
                                return Clash(clash)
                            return Applied(tuple(log))
                    if not self.config.bcp:
                        continue
                    res = bcp_simplify(node.label, node.ors)
                    if isinstance(res, ClashDetected):
                        self.stats.bcp_firings += 1
                        return Clash(res.deps)
                    if isinstance(res, Simplified):
                        for c, d in res.additions:
                            if c not in node.label:
                                self.stats.bcp_firings += 1
                                clash = self._add(node, c, d)
                                if clash is not None:
                                    return Clash(clash)
                                return Applied(tuple(log))
                self._dirty.clear()
            picked = self._choose()
            if picked is not None:
                clash = self._open_branch(*picked)
                return Clash(clash) if clash is not None else Applied(tuple(log))
            res = self._generate()
            if res is None:
                return Complete()
            if res is True:
                return Applied(tuple(log))
            return Clash(res)
        finally:
            self.trace = saved

    # -- main loop --------------------------------------------------------------

    def search(self) -> bool:
        """Run to a verdict: True if a complete clash-free tree was found."""
        t0 = time.perf_counter()
        if self.config.max_ms is not None:
            self._deadline = t0 + self.config.max_ms / 1000.0
        try:
            self._started = True
            clash = self._start()
            steps = 0
            while True:
                if clash is None:
                    clash = self._propagate()
                if clash is None:
                    picked = self._choose()
                    if picked is not None:
                        clash = self._open_branch(*picked)
                        continue
                    res = self._generate()
                    if res is None:
                        return True
                    if res is True:
                        steps += 1
                        if steps & 63 == 0:
                            self._check_budget()
                        continue
                    clash = res
                jump = on_clash_backjump(self._branches, clash, self.config.backjumping)
                if isinstance(jump, Unsatisfiable):
                    self.backjumps_from(jump, None)
                    self.clash_deps = clash
                    return False
                self.backjumps_from(jump, jump.target)
                for bp in jump.discarded:
                    self._branches.remove(bp)
                clash = self._resume(jump.target, clash)
                steps += 1
                if steps & 63 == 0:
                    self._check_budget()
        finally:
            self.stats.millis = (time.perf_counter() - t0) * 1000.0

    # -- hooks ------------------------------------------------------------------

    def _start(self) -> Optional[frozenset]:  # pragma: no cover - abstract
        raise NotImplementedError

    def _process(self, node, c) -> Optional[frozenset]:  # pragma: no cover - abstract
        raise NotImplementedError

    def _sweep(self):
        return False, None

    def _generate(self):  # pragma: no cover - abstract
        raise NotImplementedError

    def _branchable(self, node) -> bool:  # pragma: no cover - abstract
        raise NotImplementedError

    def _add(self, node, c, deps) -> Optional[frozenset]:  # pragma: no cover - abstract
        raise NotImplementedError


__all__ = [
    "Applied",
    "Clash",
    "Complete",
    "BranchPoint",
    "ClashDetected",
    "Deps",
    "EMPTY",
    "HEURISTICS",
    "CACHE_MODES",
    "JumpTo",
    "NO_CHANGE",
    "OptimiserConfig",
    "ResourceLimitExceeded",
    "SatCache",
    "SemanticChoice",
    "Simplified",
    "SatResult",
    "Statistics",
    "SyntacticChoice",
    "TableauSearch",
    "Unsatisfiable",
    "bcp_simplify",
    "choose_branch",
    "disjunction_size",
    "disjunct_leaves",
    "flag_matrix",
    "implied_disjuncts",
    "is_expanded",
    "on_clash_backjump",
]
