"""Knowledge-base level services: satisfiability, subsumption, classification."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional

from .internalise import Terminology, internalise_sat, internalise_subsumes
from .optimiser import OptimiserConfig, SatResult
from .shif_engine import is_satisfiable
from .si_engine import STRATEGIES, si_is_satisfiable, si_is_satisfiable_bounded
from .syntax import (
    LOGICS,
    And,
    Concept,
    FragmentError,
    KnowledgeBase,
    Not,
    Or,
    RoleBox,
    roles_of,
    to_nnf,
    validate,
)


def decide(c: Concept, rb: RoleBox, logic: str = "shif", config: Optional[OptimiserConfig] = None, strategy: str = "unbounded") -> SatResult:
    """Run the engine for ``logic`` on an already internalised concept."""
    if logic not in LOGICS:
        raise FragmentError(f"unknown logic {logic!r}; expected one of {LOGICS}")
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")
    if logic == "shif":
        if strategy != "unbounded":
            raise ValueError("the bounded strategy is only available for SI")
        return is_satisfiable(c, rb, config)
    fn = si_is_satisfiable_bounded if strategy == "bounded" else si_is_satisfiable
    return fn(c, config, rb=rb)


class Reasoner:
    def __init__(
        self,
        kb: Optional[KnowledgeBase] = None,
        logic: str = "shif",
        config: Optional[OptimiserConfig] = None,
        strategy: str = "unbounded",
    ):
        self.kb = kb or KnowledgeBase()
        self.logic = logic
        self.config = config or OptimiserConfig()
        self.strategy = strategy
        self.tbox = Terminology(list(self.kb.gcis))
        self.tests = 0
        self._check_kb()

    def _check_kb(self) -> None:
        if self.logic == "si" and self.tbox:
            raise FragmentError("GCIs need a role hierarchy for internalisation; SI has none (use --logic shif)")
        rb = self.kb.rbox
        for l, r in self.tbox.gcis:
            validate(to_nnf(Or(Not(l), r)), rb, self.logic)
        for c in self.kb.definitions.values():
            validate(to_nnf(c), rb, self.logic)

    def _rb(self, *concepts: Concept) -> RoleBox:
        names = set()
        for c in concepts:
            names |= {r.name for r in roles_of(c)}
        return self.kb.rbox.with_roles(names)

    def satisfiable(self, c: Concept) -> SatResult:
        c = self.kb.expand(c)
        validate(to_nnf(c), self._rb(c), self.logic)
        q, rb = internalise_sat(self.tbox, self._rb(c), c, self.logic) if self.tbox else (c, self._rb(c))
        self.tests += 1
        return decide(q, rb, self.logic, self.config, self.strategy)

    def subsumes(self, sub: Concept, sup: Concept) -> tuple[bool, SatResult]:
        """Whether ``sub`` ⊑ ``sup``; the result of the underlying unsatisfiability test comes along."""
        sub, sup = self.kb.expand(sub), self.kb.expand(sup)
        rb = self._rb(sub, sup)
        validate(to_nnf(And(sub, Not(sup))), rb, self.logic)
        if self.tbox:
            q, rb = internalise_subsumes(self.tbox, rb, sub, sup, self.logic)
        else:
            q = And(sub, Not(sup))
        self.tests += 1
        res = decide(q, rb, self.logic, self.config, self.strategy)
        return (not res.satisfiable), res

    def classify(self, verify: bool = False) -> "ClassificationResult":
        t0 = time.perf_counter()
        names = self.kb.concept_names
        result = ClassificationResult()
        sat = {}
        for n in names:
            r = self.satisfiable(self.kb.named(n))
            sat[n] = r.satisfiable
            result.stats.append((f"sat {n}", r.stats))
        result.unsatisfiable = [n for n in names if not sat[n]]
        live = [n for n in names if sat[n]]
        above: dict[str, set] = {n: set() for n in live}

        def known(a: str, b: str) -> bool:
            seen, stack = {a}, [a]
            while stack:
                x = stack.pop()
                for y in above[x]:
                    if y == b:
                        return True
                    if y not in seen:
                        seen.add(y)
                        stack.append(y)
            return False

        for a in live:
            for b in live:
                if a == b or known(a, b):
                    continue
                ok, r = self.subsumes(self.kb.named(a), self.kb.named(b))
                result.stats.append((f"{a} < {b}", r.stats))
                if ok:
                    above[a].add(b)
        closure = {a: {b for b in live if b != a and known(a, b)} for a in live}
        result.set_order(live, closure)
        if verify:
            result.verified = self._verify(result)
        result.millis = (time.perf_counter() - t0) * 1000.0
        return result

    def _verify(self, result: "ClassificationResult") -> int:
        """Re-check every equivalence and direct edge with a fresh subsumption test."""
        fresh = Reasoner(self.kb, self.logic, self.config, self.strategy)
        n = 0
        for cls in result.classes:
            for a in cls:
                for b in cls:
                    if a != b:
                        if not fresh.subsumes(self.kb.named(a), self.kb.named(b))[0]:
                            raise AssertionError(f"verification failed: {a} = {b}")
                        n += 1
        for child, parents in result.parents.items():
            for p in parents:
                if not fresh.subsumes(self.kb.named(child[0]), self.kb.named(p[0]))[0]:
                    raise AssertionError(f"verification failed: {child[0]} < {p[0]}")
                if fresh.subsumes(self.kb.named(p[0]), self.kb.named(child[0]))[0]:
                    raise AssertionError(f"verification failed: {p[0]} is equivalent to {child[0]}")
                n += 1
        for u in result.unsatisfiable:
            if fresh.satisfiable(self.kb.named(u)).satisfiable:
                raise AssertionError(f"verification failed: {u} is satisfiable")
            n += 1
        return n


@dataclass
class ClassificationResult:
    classes: list = field(default_factory=list)  # tuples of equivalent names, sorted
    parents: dict = field(default_factory=dict)  # class -> list of direct super-classes
    unsatisfiable: list = field(default_factory=list)
    stats: list = field(default_factory=list)
    verified: Optional[int] = None
    millis: float = 0.0

    def set_order(self, names: list, closure: dict) -> None:
        rep: dict[str, tuple] = {}
        for a in names:
            if a in rep:
                continue
            cls = tuple(sorted([a] + [b for b in closure[a] if a in closure[b]]))
            for b in cls:
                rep[b] = cls
        classes = sorted(set(rep.values()))
        strictly_above = {c: {rep[b] for b in closure[c[0]]} - {c} for c in classes}
        parents = {}
        for c in classes:
            ups = strictly_above[c]
            direct = [u for u in ups if not any(u in strictly_above[v] for v in ups if v != u)]
            parents[c] = sorted(direct)
        self.classes = classes
        self.parents = parents

    @property
    def edges(self) -> list:
        """Direct subsumptions (child, parent) between class representatives."""
        return [(c[0], p[0]) for c in self.classes for p in self.parents[c]]

    @property
    def tests(self) -> int:
        return len(self.stats)

    def to_text(self) -> str:
        lines = []
        for c in self.classes:
            ps = self.parents[c]
            up = " ".join(" = ".join(p) for p in ps) if ps else "TOP"
            lines.append(f"{' = '.join(c)} < {up}")
        if self.unsatisfiable:
            lines.append(f"{' = '.join(self.unsatisfiable)} = BOTTOM")
        return "\n".join(lines) + ("\n" if lines else "")


__all__ = ["ClassificationResult", "Reasoner", "decide"]
