"""Grid encodings of domino systems, and a brute-force tiler for small grids.

The encoding uses number restrictions on transitive roles, which puts it
outside both SI and SHIF; it is emitted as text and never handed to an
engine.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional

from .syntax import And, AtMost, Atom, Concept, Exists, ForAll, Not, Role, conjoin, disjoin, to_sexpr

HEADER = "; fragment: SHN+ (undecidable)"

GRID = ("A", "B", "C", "D")
X1, X2, Y1, Y2 = Role("X1"), Role("X2"), Role("Y1"), Role("Y2")
S = {(i, j): Role(f"S{i}{j}") for i in (1, 2) for j in (1, 2)}
BOTTOM_NAME = "Bottom"

# grid concept -> (horizontal role, its target, vertical role, its target, (i, j) of the super-role)
_GRID_SHAPE = {
    "A": (X1, "B", Y1, "C", (1, 1)),
    "B": (X2, "A", Y1, "D", (2, 1)),
    "C": (X1, "D", Y2, "A", (1, 2)),
    "D": (X2, "C", Y2, "B", (2, 2)),
}


class TilingBudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class DominoSystem:
    tiles: tuple
    horizontal: frozenset = frozenset()
    vertical: frozenset = frozenset()

    def __post_init__(self):
        tiles = tuple(self.tiles)
        if not tiles:
            raise ValueError("a domino system needs at least one tile")
        object.__setattr__(self, "tiles", tiles)
        object.__setattr__(self, "horizontal", frozenset(self.horizontal))
        object.__setattr__(self, "vertical", frozenset(self.vertical))
        known = set(tiles)
        for a, b in self.horizontal | self.vertical:
            if a not in known or b not in known:
                raise ValueError(f"pair ({a}, {b}) mentions an unknown tile")


@dataclass
class GridEncoding:
    role_axioms: list = field(default_factory=list)  # (kind, *roles)
    grid_axioms: list = field(default_factory=list)  # (lhs, rhs) concept pairs
    covering: list = field(default_factory=list)
    disjointness: list = field(default_factory=list)
    compatibility: list = field(default_factory=list)

    def axioms(self) -> list:
        return self.grid_axioms + self.covering + self.disjointness + self.compatibility

    def to_text(self) -> str:
        lines = [HEADER]
        for ax in self.role_axioms:
            if ax[0] == "transitive":
                lines.append(f"(transitive {ax[1]})")
            else:
                lines.append(f"(subrole {ax[1]} {ax[2]})")
        for l, r in self.axioms():
            lines.append(f"(implies {to_sexpr(l)} {to_sexpr(r)})")
        return "\n".join(lines) + "\n"


_SAFE = re.compile(r"[^A-Za-z0-9_]")


def tile_atom(name: str) -> Atom:
    return Atom("T_" + _SAFE.sub("_", str(name)))


def _tiles_or_bottom(names) -> Concept:
    atoms = [tile_atom(n) for n in names]
    if not atoms:
        b = Atom(BOTTOM_NAME)
        return And(b, Not(b))
    return disjoin(atoms)


def encode_grid_sections(sys: DominoSystem) -> GridEncoding:
    enc = GridEncoding()
    for (i, j), s in sorted(S.items()):
        enc.role_axioms.append(("transitive", s))
        enc.role_axioms.append(("subrole", (X1, X2)[i - 1], s))
        enc.role_axioms.append(("subrole", (Y1, Y2)[j - 1], s))
    for g in GRID:
        x, xt, y, yt, ij = _GRID_SHAPE[g]
        others = [Not(Atom(o)) for o in GRID if o != g]
        rhs = conjoin(others + [Exists(x, Atom(xt)), Exists(y, Atom(yt)), AtMost(3, S[ij])])
        enc.grid_axioms.append((Atom(g), rhs))
    cover = _tiles_or_bottom(sys.tiles)
    for g in GRID:
        enc.covering.append((Atom(g), cover))
    atoms = [tile_atom(t) for t in sys.tiles]
    for a in range(len(atoms)):
        for b in range(a + 1, len(atoms)):
            enc.disjointness.append((atoms[a], Not(atoms[b])))
    for t in sys.tiles:
        h = _tiles_or_bottom([b for b in sys.tiles if (t, b) in sys.horizontal])
        v = _tiles_or_bottom([b for b in sys.tiles if (t, b) in sys.vertical])
        rhs = conjoin([ForAll(X1, h), ForAll(X2, h), ForAll(Y1, v), ForAll(Y2, v)])
        enc.compatibility.append((tile_atom(t), rhs))
    return enc


def encode_grid(sys: DominoSystem) -> str:
    """KB text whose concept A is satisfiable iff ``sys`` tiles the plane."""
    return encode_grid_sections(sys).to_text()


def brute_force_tiling(sys: DominoSystem, k: int, budget: Optional[int] = 1_000_000) -> Optional[dict]:
    """A compatible tiling of the k x k grid as {(m, n): tile}, or None.

    (t(m, n), t(m+1, n)) must be in H and (t(m, n), t(m, n+1)) in V.
    """
    if k <= 0:
        return {}
    cells = [(m, n) for n in range(k) for m in range(k)]
    grid: dict = {}
    steps = 0

    def fits(cell, tile) -> bool:
        m, n = cell
        if m > 0 and (grid[(m - 1, n)], tile) not in sys.horizontal:
            return False
        if n > 0 and (grid[(m, n - 1)], tile) not in sys.vertical:
            return False
        return True

    def place(i: int) -> bool:
        nonlocal steps
        if i == len(cells):
            return True
        cell = cells[i]
        for tile in sys.tiles:
            steps += 1
            if budget is not None and steps > budget:
                raise TilingBudgetExceeded(f"more than {budget} placements tried")
            if fits(cell, tile):
                grid[cell] = tile
                if place(i + 1):
                    return True
                del grid[cell]
        return False

    return dict(grid) if place(0) else None


def checkerboard() -> DominoSystem:
    return DominoSystem(("a", "b"), {("a", "b"), ("b", "a")}, {("a", "b"), ("b", "a")})


__all__ = [
    "DominoSystem",
    "GridEncoding",
    "HEADER",
    "TilingBudgetExceeded",
    "brute_force_tiling",
    "checkerboard",
    "encode_grid",
    "encode_grid_sections",
    "tile_atom",
]
