"""Test and benchmark inputs: random concepts, hand-built families, corpus files."""

from __future__ import annotations

import random
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

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
    conjoin,
    parse_concept,
    role_to_sexpr,
    size,
    to_sexpr,
    walk,
)

ATOMS = ("A", "B", "C")
ROLE_NAMES = ("R", "S")
DEEP = {"some": 3, "all": 3, "not": 0.5}  # weights that favour deep completion trees


@dataclass(frozen=True)
class Instance:
    name: str
    logic: str
    concept: Concept
    rbox: RoleBox
    expected: Optional[str] = None


def constructor_count(c: Concept) -> int:
    return sum(1 for x in walk(c) if not isinstance(x, Atom))


# -- random concepts -------------------------------------------------------------


def random_rbox(rng: random.Random, logic: str, hierarchy: bool = True) -> RoleBox:
    transitive = [r for r in ROLE_NAMES if rng.random() < 0.35]
    inclusions = []
    if logic == "shif" and hierarchy and rng.random() < 0.5:
        a, b = rng.sample(ROLE_NAMES, 2)
        inclusions.append((Role(a, rng.random() < 0.3), Role(b)))
    return RoleBox(ROLE_NAMES, transitive, inclusions)


def random_concept(
    rng: random.Random,
    constructors: int,
    rb: RoleBox,
    logic: str = "si",
    atoms=ATOMS,
    inverse: bool = True,
    weights: Optional[dict] = None,
) -> Concept:
    """A random concept with at most ``constructors`` non-atomic nodes.

    ``weights`` maps constructor kinds ("not", "and", "or", "some", "all",
    "atmost", "atleast") to relative frequencies; unlisted kinds weigh 1.
    """
    roles = [Role(n) for n in sorted(rb.names)]
    if inverse:
        roles += [r.inverse for r in roles]
    simple = [r for r in roles if rb.is_simple(r)] if logic == "shif" else []
    kinds = ["not", "and", "or", "some", "all"]
    if simple:
        kinds += ["atmost", "atleast"]
    w = [(weights or {}).get(k, 1) for k in kinds]

    def gen(n: int) -> Concept:
        if n <= 0:
            return Atom(rng.choice(atoms))
        k = rng.choices(kinds, w)[0]
        if k == "not":
            return Not(gen(n - 1))
        if k in ("and", "or"):
            left = rng.randint(0, n - 1)
            cls = And if k == "and" else Or
            return cls(gen(left), gen(n - 1 - left))
        if k in ("some", "all"):
            cls = Exists if k == "some" else ForAll
            return cls(rng.choice(roles), gen(n - 1))
        r = rng.choice(simple)
        return AtMost(1, r) if k == "atmost" else AtLeast(2, r)

    return gen(constructors)


def random_tbox(rng: random.Random, rb: RoleBox, max_gcis: int = 3, constructors: int = 1, numbers: bool = False) -> list:
    """Between one and ``max_gcis`` random GCIs over ``rb``.

    Number restrictions are left out of the axioms unless ``numbers`` is set:
    an axiom such as ⊤ ⊑ ≥2R applies at every node and makes the completion
    tree branch at every level, which ancestor blocking only cuts off deep down.
    """
    w = None if numbers else {"atmost": 0, "atleast": 0}
    return [
        (random_concept(rng, constructors, rb, "shif", weights=w), random_concept(rng, constructors, rb, "shif", weights=w))
        for _ in range(rng.randint(1, max_gcis))
    ]


def random_instances(
    seed: int,
    count: int,
    logic: str,
    max_constructors: int = 6,
    max_size: Optional[int] = None,
    weights: Optional[dict] = None,
    atoms=ATOMS,
) -> list[Instance]:
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        rb = random_rbox(rng, logic)
        c = random_concept(rng, rng.randint(1, max_constructors), rb, logic, atoms, weights=weights)
        if max_size is not None and size(c) > max_size:
            continue
        out.append(Instance(f"{logic}-{seed}-{len(out):04d}", logic, c, rb))
    return out


# -- hand-built families --------------------------------------------------------------


def thrashing_concept(n: int) -> Concept:
    """(C1 ⊔ D1) ⊓ ... ⊓ (Cn ⊔ Dn) ⊓ ∃R.(A ⊓ B) ⊓ ∀R.¬A.

    Unsatisfiable for a reason unrelated to any of the disjunctions, so
    chronological backtracking tries all 2^n combinations.
    """
    parts: list[Concept] = [Or(Atom(f"C{i}"), Atom(f"D{i}")) for i in range(1, n + 1)]
    parts.append(Exists(Role("R"), And(Atom("A"), Atom("B"))))
    parts.append(ForAll(Role("R"), Not(Atom("A"))))
    return conjoin(parts)


def moms_family(n: int) -> Concept:
    """(C ⊔ D1) ⊓ ... ⊓ (C ⊔ Dn)."""
    return conjoin(Or(Atom("C"), Atom(f"D{i}")) for i in range(1, n + 1))


def bcp_clash_concept() -> Concept:
    """Unsatisfiable, and propagation alone finds it."""
    return parse_concept("(and (or C (and D1 D2)) (or (not D1) (or (not D2) C)) (not C))")


def transitive_blocking_concept() -> tuple[Concept, RoleBox]:
    """C ⊓ ∃R.C ⊓ ∀R.(∃R.C) with R transitive: satisfiable only through a cycle."""
    return parse_concept("(and C (some R C) (all R (some R C)))"), RoleBox(["R"], ["R"])


def infinite_model_concept() -> tuple[Concept, RoleBox]:
    """Satisfiable, but every model is infinite (F ⊑ R, R transitive)."""
    c = parse_concept(
        "(and (not C) (some (inv F) (and C (atmost 1 F))) (all (inv R) (some (inv F) (and C (atmost 1 F)))))"
    )
    return c, RoleBox(["R", "F"], ["R"], [(Role("F"), Role("R"))])


def regeneration_concept() -> Concept:
    """∃R.(∃R.⊤ ⊓ ∀R⁻.(∀R.A)): a value restriction flows up and back down."""
    return parse_concept("(some R (and (some R (or T (not T))) (all (inv R) (all R A))))")


def worked_examples() -> list[Instance]:
    c1, rb1 = transitive_blocking_concept()
    c2, rb2 = infinite_model_concept()
    out = [
        Instance("transitive-blocking", "shif", c1, rb1, "sat"),
        Instance("transitive-blocking-si", "si", c1, rb1, "sat"),
        Instance("infinite-model", "shif", c2, rb2, "sat"),
        Instance("bcp-clash", "si", bcp_clash_concept(), RoleBox(), "unsat"),
        Instance("moms-8", "si", moms_family(8), RoleBox(), "sat"),
        Instance("regeneration", "si", regeneration_concept(), RoleBox(["R"]), "sat"),
        Instance("inverse-clash", "si", parse_concept("(and A (some R (all (inv R) (not A))))"), RoleBox(["R"]), "unsat"),
    ]
    for n in (3, 5, 7):
        out.append(Instance(f"thrashing-{n}", "si", thrashing_concept(n), RoleBox(["R"]), "unsat"))
    return out


# -- corpus files ------------------------------------------------------------------------


def rbox_text(rb: RoleBox) -> str:
    lines = [f"(role {n})" for n in sorted(rb.names)]
    lines += [f"(transitive {n})" for n in sorted(rb.transitive_names)]
    lines += [f"(subrole {role_to_sexpr(r)} {role_to_sexpr(s)})" for r, s in rb.inclusions]
    return "\n".join(lines) + ("\n" if lines else "")


def write_instance(directory, inst: Instance) -> None:
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    (d / f"{inst.name}.kb").write_text(rbox_text(inst.rbox), encoding="utf-8")
    (d / f"{inst.name}.q").write_text(f"(logic {inst.logic})\n(sat {to_sexpr(inst.concept)})\n", encoding="utf-8")


def default_corpus(seed: int = 7, per_logic: int = 60) -> list[Instance]:
    return (
        worked_examples()
        + random_instances(seed, per_logic, "si", max_constructors=8)
        + random_instances(seed + 1, per_logic, "shif", max_constructors=8)
    )


def write_corpus(directory, instances: list[Instance]) -> int:
    for inst in instances:
        write_instance(directory, inst)
    return len(instances)


__all__ = [
    "ATOMS",
    "DEEP",
    "Instance",
    "ROLE_NAMES",
    "bcp_clash_concept",
    "constructor_count",
    "default_corpus",
    "infinite_model_concept",
    "moms_family",
    "random_concept",
    "random_instances",
    "random_rbox",
    "random_tbox",
    "rbox_text",
    "regeneration_concept",
    "thrashing_concept",
    "transitive_blocking_concept",
    "worked_examples",
    "write_corpus",
    "write_instance",
]
