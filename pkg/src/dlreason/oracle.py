"""Model-theoretic ground truth for the reasoners.

Everything here works from the set semantics of concepts over finite
interpretations and shares no code with the tableau engines. Bounded model
search is delegated to a SAT solver over a propositional encoding of
"there is a model with exactly n elements"; every model it returns is
re-evaluated with :func:`eval` before being handed out. A plain enumerator is
kept for cross-checking the encoding on tiny domains.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional

from .certificate import TableauStructure
from .syntax import (
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
    RoleBox,
    atoms_of,
    negate,
    role_names_of,
    to_nnf,
)


class OracleBudgetExceeded(RuntimeError):
    pass


@dataclass
class Interpretation:
    size: int
    concept_ext: dict = field(default_factory=dict)  # atom name -> frozenset of elements
    role_ext: dict = field(default_factory=dict)  # role name -> frozenset of (a, b)

    @property
    def domain(self) -> range:
        return range(self.size)

    def atom(self, name: str) -> frozenset:
        return self.concept_ext.get(name, frozenset())

    def pairs(self, r: Role) -> frozenset:
        ext = self.role_ext.get(r.name, frozenset())
        if r.inverted:
            return frozenset((b, a) for a, b in ext)
        return ext

    def successors(self, r: Role) -> dict:
        out: dict[int, set] = {x: set() for x in self.domain}
        for a, b in self.pairs(r):
            out[a].add(b)
        return out

    def padded(self) -> "Interpretation":
        """The same interpretation plus one isolated element."""
        return Interpretation(self.size + 1, dict(self.concept_ext), dict(self.role_ext))


# -- evaluation -----------------------------------------------------------------


def eval(i: Interpretation, c: Concept) -> frozenset:  # noqa: A001 - mirrors the semantic function
    """Extension of ``c`` in ``i``."""
    memo: dict[Concept, frozenset] = {}
    succ: dict[Role, dict] = {}
    dom = frozenset(i.domain)

    def rs(r: Role) -> dict:
        s = succ.get(r)
        if s is None:
            s = succ[r] = i.successors(r)
        return s

    def ev(x: Concept) -> frozenset:
        hit = memo.get(x)
        if hit is not None:
            return hit
        if isinstance(x, Atom):
            out = i.atom(x.name) & dom
        elif isinstance(x, Not):
            out = dom - ev(x.operand)
        elif isinstance(x, And):
            out = ev(x.left) & ev(x.right)
        elif isinstance(x, Or):
            out = ev(x.left) | ev(x.right)
        elif isinstance(x, Exists):
            f = ev(x.filler)
            s = rs(x.role)
            out = frozenset(e for e in dom if s[e] & f)
        elif isinstance(x, ForAll):
            f = ev(x.filler)
            s = rs(x.role)
            out = frozenset(e for e in dom if s[e] <= f)
        elif isinstance(x, AtMost):
            s = rs(x.role)
            out = frozenset(e for e in dom if len(s[e]) <= x.n)
        elif isinstance(x, AtLeast):
            s = rs(x.role)
            out = frozenset(e for e in dom if len(s[e]) >= x.n)
        else:  # pragma: no cover
            raise TypeError(x)
        memo[x] = out
        return out

    return ev(c)


def holds_at(i: Interpretation, c: Concept, x: int) -> bool:
    """Pointwise recursive evaluation, written independently of :func:`eval`."""
    if isinstance(c, Atom):
        return x in i.atom(c.name)
    if isinstance(c, Not):
        return not holds_at(i, c.operand, x)
    if isinstance(c, And):
        return holds_at(i, c.left, x) and holds_at(i, c.right, x)
    if isinstance(c, Or):
        return holds_at(i, c.left, x) or holds_at(i, c.right, x)
    succ = [b for a, b in i.pairs(c.role) if a == x]
    if isinstance(c, Exists):
        return any(holds_at(i, c.filler, y) for y in succ)
    if isinstance(c, ForAll):
        return all(holds_at(i, c.filler, y) for y in succ)
    if isinstance(c, AtMost):
        return len(set(succ)) <= c.n
    if isinstance(c, AtLeast):
        return len(set(succ)) >= c.n
    raise TypeError(c)  # pragma: no cover


# -- role boxes over interpretations --------------------------------------------


def close_roles(role_ext: dict, rb: RoleBox) -> None:
    """Close role extensions (in place) under transitivity and inclusions."""
    changed = True
    while changed:
        changed = False
        for name in rb.transitive_names:
            ext = role_ext.setdefault(name, set())
            closed = _transitive_closure(ext)
            if len(closed) != len(ext):
                ext |= closed
                changed = True
        for r, s in rb.inclusions:
            src = role_ext.setdefault(r.name, set())
            dst = role_ext.setdefault(s.name, set())
            flip = r.inverted != s.inverted
            add = {(b, a) for a, b in src} if flip else set(src)
            if not add <= dst:
                dst |= add
                changed = True


def _transitive_closure(pairs) -> set:
    out = set(pairs)
    while True:
        succ: dict = {}
        for a, b in out:
            succ.setdefault(a, set()).add(b)
        new = {(a, c) for a, b in out for c in succ.get(b, ()) if (a, c) not in out}
        if not new:
            return out
        out |= new


def model_problems(i: Interpretation, rb: RoleBox, d: Optional[Concept] = None, tbox: Iterable = ()) -> list[str]:
    out = []
    for name in sorted(rb.transitive_names):
        ext = set(i.role_ext.get(name, ()))
        if _transitive_closure(ext) != ext:
            out.append(f"role {name} is transitive but its extension is not transitively closed")
    for r, s in rb.inclusions:
        if not i.pairs(r) <= i.pairs(s):
            out.append(f"inclusion {r} < {s} violated")
    for l, r in tbox:
        if not eval(i, l) <= eval(i, r):
            out.append(f"axiom {l} -> {r} violated")
    if d is not None and not eval(i, d):
        out.append(f"concept {d} has an empty extension")
    return out


def check_model(i: Interpretation, d: Concept, rb: Optional[RoleBox] = None, tbox: Iterable = ()) -> bool:
    """True iff ``i`` respects ``rb`` (and ``tbox``) and ``d`` is non-empty in it."""
    return not model_problems(i, rb or RoleBox(), d, tbox)


# -- bounded model search ---------------------------------------------------------


class _Encoder:
    def __init__(self, n: int):
        from pysat.formula import IDPool

        self.n = n
        self.pool = IDPool()
        self.clauses: list[list[int]] = []
        self._done: dict = {}

    def atom(self, name: str, x: int) -> int:
        return self.pool.id(("a", name, x))

    def role(self, r: Role, a: int, b: int) -> int:
        if r.inverted:
            a, b = b, a
        return self.pool.id(("r", r.name, a, b))

    def fresh(self) -> int:
        return self.pool.id(("aux", len(self.pool.obj2id)))

    def _iff_and(self, v: int, lits: list[int]) -> None:
        for l in lits:
            self.clauses.append([-v, l])
        self.clauses.append([v] + [-l for l in lits])

    def _iff_or(self, v: int, lits: list[int]) -> None:
        self.clauses.append([-v] + lits)
        for l in lits:
            self.clauses.append([v, -l])

    def lit(self, c: Concept, x: int) -> int:
        if isinstance(c, Atom):
            return self.atom(c.name, x)
        if isinstance(c, Not):
            return -self.lit(c.operand, x)
        if isinstance(c, AtMost):
            return -self.lit(AtLeast(c.n + 1, c.role), x)
        key = (c, x)
        v = self._done.get(key)
        if v is not None:
            return v
        v = self.pool.id(("c", c.uid, x))
        self._done[key] = v
        dom = range(self.n)
        if isinstance(c, And):
            self._iff_and(v, [self.lit(c.left, x), self.lit(c.right, x)])
        elif isinstance(c, Or):
            self._iff_or(v, [self.lit(c.left, x), self.lit(c.right, x)])
        elif isinstance(c, Exists):
            ts = []
            for y in dom:
                t = self.fresh()
                self._iff_and(t, [self.role(c.role, x, y), self.lit(c.filler, y)])
                ts.append(t)
            self._iff_or(v, ts)
        elif isinstance(c, ForAll):
            us = []
            for y in dom:
                u = self.fresh()
                self._iff_or(u, [-self.role(c.role, x, y), self.lit(c.filler, y)])
                us.append(u)
            self._iff_and(v, us)
        elif isinstance(c, AtLeast):
            ts = []
            for group in itertools.combinations(dom, c.n):
                t = self.fresh()
                self._iff_and(t, [self.role(c.role, x, y) for y in group])
                ts.append(t)
            self._iff_or(v, ts)
        else:  # pragma: no cover
            raise TypeError(c)
        return v

    def role_axioms(self, rb: RoleBox) -> None:
        dom = range(self.n)
        for name in rb.transitive_names:
            r = Role(name)
            for a, b, c in itertools.product(dom, repeat=3):
                self.clauses.append([-self.role(r, a, b), -self.role(r, b, c), self.role(r, a, c)])
        for r, s in rb.inclusions:
            for a, b in itertools.product(dom, repeat=2):
                self.clauses.append([-self.role(r, a, b), self.role(s, a, b)])


def _decode(enc: _Encoder, model: list[int], atoms: set, roles: set) -> Interpretation:
    true = {v for v in model if v > 0}
    n = enc.n
    cext = {}
    for name in atoms:
        cext[name] = frozenset(x for x in range(n) if enc.atom(name, x) in true)
    rext = {}
    for name in roles:
        r = Role(name)
        rext[name] = frozenset((a, b) for a in range(n) for b in range(n) if enc.role(r, a, b) in true)
    return Interpretation(n, cext, rext)


def find_model_of_size(
    d: Concept, rb: Optional[RoleBox], n: int, tbox: Iterable = (), conflict_budget: Optional[int] = None
) -> Optional[Interpretation]:
    from pysat.solvers import Minisat22

    tbox = list(tbox)
    rb = rb or RoleBox()
    d = to_nnf(d)
    atoms = atoms_of(d)
    roles = set(rb.names) | role_names_of(d)
    tconcepts = [to_nnf(Or(Not(l), r)) for l, r in tbox]
    for t in tconcepts:
        atoms |= atoms_of(t)
        roles |= role_names_of(t)
    rb = rb.with_roles(roles)
    enc = _Encoder(n)
    enc.clauses.append([enc.lit(d, 0)])
    for t in tconcepts:
        for x in range(n):
            enc.clauses.append([enc.lit(t, x)])
    enc.role_axioms(rb)
    with Minisat22(bootstrap_with=enc.clauses) as solver:
        if conflict_budget is not None:
            solver.conf_budget(conflict_budget)
            res = solver.solve_limited()
            if res is None:
                raise OracleBudgetExceeded(f"no answer within {conflict_budget} conflicts at size {n}")
        else:
            res = solver.solve()
        if not res:
            return None
        i = _decode(enc, solver.get_model(), atoms, roles)
    problems = model_problems(i, rb, d, tbox)
    if problems:  # pragma: no cover - would mean the encoding is wrong
        raise AssertionError(f"decoded interpretation is not a model: {problems}")
    return i


def find_model_upto(
    d: Concept, rb: Optional[RoleBox] = None, n: int = 4, tbox: Iterable = (), conflict_budget: Optional[int] = None
) -> Optional[Interpretation]:
    """A model of ``d`` (w.r.t. ``rb`` and ``tbox``) with at most ``n`` elements.

    None only means no model that small exists.
    """
    tbox = list(tbox)
    for k in range(1, n + 1):
        i = find_model_of_size(d, rb, k, tbox, conflict_budget)
        if i is not None:
            return i
    return None


def enumerate_interpretations(atoms: Iterable[str], roles: Iterable[str], n: int, rb: Optional[RoleBox] = None) -> Iterator[Interpretation]:
    """Every interpretation over n elements whose role extensions are closed
    under ``rb``. Role extensions are closed rather than filtered, so each
    distinct closed extension is produced once."""
    atoms = sorted(set(atoms))
    roles = sorted(set(roles))
    rb = (rb or RoleBox()).with_roles(roles)
    cells = [(a, b) for a in range(n) for b in range(n)]
    seen = set()
    role_choices = []
    for bits in itertools.product(range(1 << len(cells)), repeat=len(roles)):
        ext = {r: {cells[k] for k in range(len(cells)) if m >> k & 1} for r, m in zip(roles, bits)}
        close_roles(ext, rb)
        key = tuple(frozenset(ext.get(r, ())) for r in roles)
        if key in seen:
            continue
        seen.add(key)
        role_choices.append({r: frozenset(ext[r]) for r in roles})
    subsets = [frozenset(x for x in range(n) if m >> x & 1) for m in range(1 << n)]
    for rext in role_choices:
        for combo in itertools.product(subsets, repeat=len(atoms)):
            yield Interpretation(n, dict(zip(atoms, combo)), dict(rext))


def find_model_by_enumeration(d: Concept, rb: Optional[RoleBox] = None, n: int = 2, tbox: Iterable = ()) -> Optional[Interpretation]:
    """Exhaustive counterpart of :func:`find_model_upto`, for tiny inputs."""
    tbox = list(tbox)
    rb = rb or RoleBox()
    d = to_nnf(d)
    atoms = set(atoms_of(d))
    roles = set(rb.names) | role_names_of(d)
    for l, r in tbox:
        atoms |= atoms_of(l) | atoms_of(r)
        roles |= role_names_of(l) | role_names_of(r)
    for k in range(1, n + 1):
        for i in enumerate_interpretations(atoms, roles, k, rb):
            if check_model(i, d, rb.with_roles(roles), tbox):
                return i
    return None


# -- tableau properties -------------------------------------------------------------


def check_tableau_properties(t: TableauStructure, d: Concept, rb: Optional[RoleBox] = None, logic: str = "shif") -> list[str]:
    """Violations of the tableau conditions on a finite structure.

    SHIF structures are checked against all ten conditions, SI structures
    against the first seven. Witness existence (conditions 5 and 10) is not
    required of individuals in ``t.frontier``.
    """
    d = to_nnf(d)
    names = set(role_names_of(d))
    for r in t.edges:
        names.add(r.name)
    rb = (rb or RoleBox()).with_roles(names)
    out: list[str] = []
    labels = t.labels
    succ: dict[Role, dict] = {}
    for r, ps in t.edges.items():
        m: dict[int, set] = {}
        for a, b in ps:
            m.setdefault(a, set()).add(b)
        succ[r] = m

    def nb(s: int, r: Role) -> set:
        return succ.get(r, {}).get(s, set())

    if not any(d in lab for lab in labels.values()):
        out.append(f"no individual has {d} in its label")
    every_role = sorted(rb.roles(), key=lambda r: r.uid)
    for s in t.individuals:
        lab = labels[s]
        for c in lab:
            if negate(c) in lab:
                out.append(f"P1: individual {s} has {c} and its negation")
            if isinstance(c, And):
                if c.left not in lab or c.right not in lab:
                    out.append(f"P2: individual {s} has {c} without both conjuncts")
            elif isinstance(c, Or):
                if c.left not in lab and c.right not in lab:
                    out.append(f"P3: individual {s} has {c} without either disjunct")
            elif isinstance(c, ForAll):
                for u in nb(s, c.role):
                    if c.filler not in labels[u]:
                        out.append(f"P4: {c} at {s} but {c.filler} missing at {c.role}-successor {u}")
                subs = [c.role] if logic == "si" else rb.subs(c.role)
                for r in subs:
                    if not rb.is_transitive(r):
                        continue
                    fr = ForAll(r, c.filler)
                    for u in nb(s, r):
                        if fr not in labels[u]:
                            out.append(f"P6: {c} at {s} but {fr} missing at {r}-successor {u}")
            elif isinstance(c, Exists):
                if s not in t.frontier and not any(c.filler in labels[u] for u in nb(s, c.role)):
                    out.append(f"P5: {c} at {s} has no witness")
            elif logic != "si" and isinstance(c, AtMost) and c.n == 1:
                if len(nb(s, c.role)) > 1:
                    out.append(f"P9: {c} at {s} but {len(nb(s, c.role))} {c.role}-successors")
            elif logic != "si" and isinstance(c, AtLeast) and c.n == 2:
                if s not in t.frontier and len(nb(s, c.role)) < 2:
                    out.append(f"P10: {c} at {s} but only {len(nb(s, c.role))} {c.role}-successors")
    for r, ps in t.edges.items():
        back = t.pairs(r.inverse)
        for a, b in ps:
            if (b, a) not in back:
                out.append(f"P7: ({a},{b}) in E({r}) but ({b},{a}) not in E({r.inverse})")
    if logic != "si":
        for r in every_role:
            ps = t.pairs(r)
            if not ps:
                continue
            for s in rb.supers(r):
                missing = ps - t.pairs(s)
                if missing:
                    out.append(f"P8: E({r}) not contained in E({s}); e.g. {sorted(missing)[0]}")
    return out


# -- text format ----------------------------------------------------------------------


def format_model(i: Interpretation) -> str:
    lines = ["domain: " + " ".join(str(x) for x in i.domain)]
    for name in sorted(i.concept_ext):
        lines.append(f"concept {name}: " + " ".join(str(x) for x in sorted(i.concept_ext[name])))
    for name in sorted(i.role_ext):
        lines.append(f"role {name}: " + " ".join(f"({a} {b})" for a, b in sorted(i.role_ext[name])))
    return "\n".join(line.rstrip() for line in lines) + "\n"


def parse_model(text: str) -> Interpretation:
    size = 0
    cext: dict = {}
    rext: dict = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        head, _, rest = line.partition(":")
        parts = head.split()
        if parts == ["domain"]:
            size = len(rest.split())
        elif len(parts) == 2 and parts[0] == "concept":
            cext[parts[1]] = frozenset(int(x) for x in rest.split())
        elif len(parts) == 2 and parts[0] == "role":
            nums = rest.replace("(", " ").replace(")", " ").split()
            rext[parts[1]] = frozenset((int(nums[k]), int(nums[k + 1])) for k in range(0, len(nums), 2))
        else:
            raise ValueError(f"unreadable model line: {raw!r}")
    return Interpretation(size, cext, rext)


__all__ = [
    "Interpretation",
    "OracleBudgetExceeded",
    "check_model",
    "check_tableau_properties",
    "close_roles",
    "enumerate_interpretations",
    "eval",
    "find_model_by_enumeration",
    "find_model_of_size",
    "find_model_upto",
    "format_model",
    "holds_at",
    "model_problems",
    "parse_model",
]
