"""S-expression reader for concepts and knowledge-base files.

Concept grammar::

    c ::= NAME | (not c) | (and c c ...) | (or c c ...)
        | (some r c) | (all r c) | (atmost N r) | (atleast N r)
    r ::= NAME | (inv r)

KB statements: ``(transitive r)``, ``(subrole r s)``,
``(define-concept NAME c)``, ``(implies c d)``. ``;`` starts a comment.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .concepts import (
    RESERVED_PREFIX,
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
    atoms_of,
    role_names_of,
    substitute,
)
from .roles import RoleBox

_TOKEN = re.compile(r"\s+|;[^\n]*|\(|\)|[^\s();]+")
_NAME = re.compile(r"[A-Za-z_$][A-Za-z0-9_\-.$:+]*\Z")
KEYWORDS = frozenset({"and", "or", "not", "some", "all", "atmost", "atleast", "inv"})


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        super().__init__(f"line {line}, col {col}: {message}")
        self.message = message
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Tok:
    text: str
    line: int
    col: int


@dataclass
class SList:
    items: list
    line: int
    col: int


def _tokens(text: str):
    line, line_start = 1, 0
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:  # pragma: no cover - the pattern matches any char
            raise ParseError("unreadable input", line, pos - line_start + 1)
        s = m.group()
        if not s[0].isspace() and s[0] != ";":
            yield Tok(s, line, pos - line_start + 1)
        nl = s.count("\n")
        if nl:
            line += nl
            line_start = pos + s.rindex("\n") + 1
        pos = m.end()


def read_sexprs(text: str) -> list:
    """Read every top-level form; forms are ``Tok`` or ``SList``."""
    stack: list[SList] = []
    out: list = []
    for tok in _tokens(text):
        if tok.text == "(":
            stack.append(SList([], tok.line, tok.col))
        elif tok.text == ")":
            if not stack:
                raise ParseError("unbalanced ')'", tok.line, tok.col)
            done = stack.pop()
            (stack[-1].items if stack else out).append(done)
        else:
            (stack[-1].items if stack else out).append(tok)
    if stack:
        raise ParseError("missing ')'", stack[-1].line, stack[-1].col)
    return out


def _where(form) -> tuple[int, int]:
    return form.line, form.col


def _name(form, allow_reserved: bool, what: str) -> str:
    if not isinstance(form, Tok):
        raise ParseError(f"expected {what} name", *_where(form))
    s = form.text
    if not _NAME.match(s) or s in KEYWORDS:
        raise ParseError(f"bad {what} name {s!r}", *_where(form))
    if s.startswith(RESERVED_PREFIX) and not allow_reserved:
        raise ParseError(f"{what} name {s!r} uses the reserved prefix {RESERVED_PREFIX!r}", *_where(form))
    return s


def build_role(form, allow_reserved: bool = False) -> Role:
    if isinstance(form, Tok):
        return Role(_name(form, allow_reserved, "role"))
    items = form.items
    if len(items) == 2 and isinstance(items[0], Tok) and items[0].text == "inv":
        return build_role(items[1], allow_reserved).inverse
    raise ParseError("expected a role name or (inv r)", *_where(form))


def _int(form, lo: int) -> int:
    if isinstance(form, Tok) and form.text.isdigit() and int(form.text) >= lo:
        return int(form.text)
    raise ParseError(f"expected an integer >= {lo}", *_where(form))


def build_concept(form, allow_reserved: bool = False) -> Concept:
    if isinstance(form, Tok):
        return Atom(_name(form, allow_reserved, "concept"))
    items = form.items
    if not items or not isinstance(items[0], Tok):
        raise ParseError("expected a concept constructor", *_where(form))
    head = items[0].text
    args = items[1:]

    def arity(n: int) -> None:
        if len(args) != n:
            raise ParseError(f"'{head}' takes {n} argument(s), got {len(args)}", *_where(form))

    if head == "not":
        arity(1)
        return Not(build_concept(args[0], allow_reserved))
    if head in ("and", "or"):
        if len(args) < 2:
            raise ParseError(f"'{head}' needs at least 2 arguments", *_where(form))
        parts = [build_concept(a, allow_reserved) for a in args]
        cls = And if head == "and" else Or
        out = parts[-1]
        for p in reversed(parts[:-1]):
            out = cls(p, out)
        return out
    if head in ("some", "all"):
        arity(2)
        r = build_role(args[0], allow_reserved)
        c = build_concept(args[1], allow_reserved)
        return Exists(r, c) if head == "some" else ForAll(r, c)
    if head == "atmost":
        arity(2)
        return AtMost(_int(args[0], 0), build_role(args[1], allow_reserved))
    if head == "atleast":
        arity(2)
        return AtLeast(_int(args[0], 1), build_role(args[1], allow_reserved))
    raise ParseError(f"unknown constructor {head!r}", *_where(form))


def parse_concept(text: str, allow_reserved: bool = False) -> Concept:
    forms = read_sexprs(text)
    if len(forms) != 1:
        raise ParseError(f"expected exactly one concept, found {len(forms)} forms", 1, 1)
    return build_concept(forms[0], allow_reserved)


def parse_role(text: str) -> Role:
    forms = read_sexprs(text)
    if len(forms) != 1:
        raise ParseError("expected exactly one role", 1, 1)
    return build_role(forms[0])


@dataclass
class KnowledgeBase:
    """A parsed, macro-expanded KB."""

    rbox: RoleBox = field(default_factory=RoleBox)
    gcis: list[tuple[Concept, Concept]] = field(default_factory=list)
    definitions: dict[str, Concept] = field(default_factory=dict)
    primitives: list[str] = field(default_factory=list)
    source: str = "<string>"
    axiom_count: int = 0

    @property
    def concept_names(self) -> list[str]:
        """Defined and primitive names, the set classification ranges over."""
        return sorted(set(self.definitions) | set(self.primitives))

    def named(self, name: str) -> Concept:
        return self.definitions.get(name, Atom(name))

    def expand(self, c: Concept) -> Concept:
        return substitute(c, self.definitions) if self.definitions else c

    def parse(self, text: str) -> Concept:
        return self.expand(parse_concept(text))

    def role_names(self) -> set[str]:
        names = set(self.rbox.names)
        for l, r in self.gcis:
            names |= role_names_of(l) | role_names_of(r)
        for c in self.definitions.values():
            names |= role_names_of(c)
        return names


def parse_kb(text: str, source: str = "<string>") -> KnowledgeBase:
    transitive: list[str] = []
    inclusions: list[tuple[Role, Role]] = []
    raw_defs: dict[str, Concept] = {}
    raw_gcis: list[tuple[Concept, Concept]] = []
    declared: set[str] = set()
    count = 0
    for form in read_sexprs(text):
        if not isinstance(form, SList) or not form.items or not isinstance(form.items[0], Tok):
            raise ParseError("expected a statement", *_where(form))
        head = form.items[0].text
        args = form.items[1:]
        count += 1
        if head == "transitive" and len(args) == 1:
            r = build_role(args[0])
            transitive.append(r.name)
            declared.add(r.name)
        elif head == "role" and len(args) == 1:
            declared.add(build_role(args[0]).name)
            count -= 1
        elif head == "subrole" and len(args) == 2:
            inclusions.append((build_role(args[0]), build_role(args[1])))
        elif head == "define-concept" and len(args) == 2:
            name = _name(args[0], False, "concept")
            if name in raw_defs:
                raise ParseError(f"concept {name!r} defined twice", *_where(args[0]))
            raw_defs[name] = build_concept(args[1])
        elif head == "implies" and len(args) == 2:
            raw_gcis.append((build_concept(args[0]), build_concept(args[1])))
        else:
            raise ParseError(f"unknown statement {head!r} with {len(args)} argument(s)", *_where(form))

    definitions = _expand_definitions(raw_defs)
    gcis = [(substitute(l, definitions), substitute(r, definitions)) for l, r in raw_gcis]

    prims: set[str] = set()
    for c in list(raw_defs.values()) + [x for pair in raw_gcis for x in pair]:
        prims |= atoms_of(c)
    prims -= set(definitions)

    role_names = set(declared) | set(transitive)
    for l, r in gcis:
        role_names |= role_names_of(l) | role_names_of(r)
    for c in definitions.values():
        role_names |= role_names_of(c)
    rbox = RoleBox(role_names, transitive, inclusions)
    return KnowledgeBase(rbox, gcis, definitions, sorted(prims), source, count)


def _expand_definitions(raw: dict[str, Concept]) -> dict[str, Concept]:
    done: dict[str, Concept] = {}
    active: list[str] = []

    def expand(name: str) -> Concept:
        if name in done:
            return done[name]
        if name in active:
            cycle = " -> ".join(active[active.index(name):] + [name])
            raise ParseError(f"cyclic definition {cycle}; state it with (implies ...) instead")
        active.append(name)
        body = raw[name]
        table = {n: expand(n) for n in atoms_of(body) if n in raw}
        done[name] = substitute(body, table)
        active.pop()
        return done[name]

    for n in raw:
        expand(n)
    return done


def load_kb(path) -> KnowledgeBase:
    with open(path, encoding="utf-8") as fh:
        return parse_kb(fh.read(), source=str(path))
