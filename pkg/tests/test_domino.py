import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dlreason.domino import (
    HEADER,
    DominoSystem,
    TilingBudgetExceeded,
    brute_force_tiling,
    checkerboard,
    encode_grid,
    encode_grid_sections,
    tile_atom,
)
from dlreason.syntax import AtMost, Atom, ForAll, FragmentError, Or, Role, parse_kb, to_nnf, validate, walk


def _at_mosts(c):
    return [x for x in walk(c) if isinstance(x, AtMost)]


def _is_tiling(sys, k, grid):
    if set(grid) != {(m, n) for m in range(k) for n in range(k)}:
        return False
    for (m, n), t in grid.items():
        if m + 1 < k and (t, grid[(m + 1, n)]) not in sys.horizontal:
            return False
        if n + 1 < k and (t, grid[(m, n + 1)]) not in sys.vertical:
            return False
    return True


# -- encoding ----------------------------------------------------------------------------


@pytest.mark.parametrize("sys", [checkerboard(), DominoSystem(["t"], {("t", "t")}, {("t", "t")}), DominoSystem(["x", "y", "z"])])
def test_four_grid_axioms_with_at_most_three(sys):
    kb = parse_kb(encode_grid(sys))
    with_numbers = [(l, r) for l, r in kb.gcis if _at_mosts(l) or _at_mosts(r)]
    assert len(with_numbers) == 4
    assert sorted(l.name for l, _ in with_numbers) == ["A", "B", "C", "D"]
    for _, r in with_numbers:
        (n,) = _at_mosts(r)
        assert n.n == 3 and n.role.name.startswith("S")


def test_grid_axiom_shape():
    enc = encode_grid_sections(checkerboard())
    lhs, rhs = enc.grid_axioms[0]
    assert lhs == Atom("A")
    assert rhs == parse_kb(
        "(implies A (and (not B) (and (not C) (and (not D) (and (some X1 B) (and (some Y1 C) (atmost 3 S11)))))))"
    ).gcis[0][1]


def test_super_roles_are_transitive_above_both_directions():
    kb = parse_kb(encode_grid(checkerboard()))
    rb = kb.rbox
    for i in (1, 2):
        for j in (1, 2):
            s = Role(f"S{i}{j}")
            assert rb.is_transitive(s)
            assert rb.subrole_holds(Role(f"X{i}"), s) and rb.subrole_holds(Role(f"Y{j}"), s)
            assert not rb.is_simple(s)


def test_single_tile_has_one_covering_disjunction_of_size_one():
    enc = encode_grid_sections(DominoSystem(["t"], {("t", "t")}, {("t", "t")}))
    assert {r for _, r in enc.covering} == {tile_atom("t")}
    assert not any(isinstance(r, Or) for _, r in enc.covering)
    assert enc.disjointness == []


def test_compatibility_restricts_successors():
    enc = encode_grid_sections(checkerboard())
    rhs = dict(enc.compatibility)[tile_atom("a")]
    alls = [x for x in walk(rhs) if isinstance(x, ForAll)]
    assert sorted(x.role.name for x in alls) == ["X1", "X2", "Y1", "Y2"]
    assert {x.filler for x in alls} == {tile_atom("b")}
    assert len(enc.disjointness) == 1


def test_encoding_is_marked_outside_the_decidable_fragment():
    text = encode_grid(checkerboard())
    assert text.splitlines()[0] == HEADER
    kb = parse_kb(text)
    with pytest.raises(FragmentError):
        for l, r in kb.gcis:
            validate(to_nnf(r), kb.rbox, "shif")


def test_re_parse_round_trip():
    text = encode_grid(checkerboard())
    kb = parse_kb(text)
    enc = encode_grid_sections(checkerboard())
    assert kb.gcis == enc.axioms()
    assert encode_grid(checkerboard()) == text


def test_invalid_systems_are_refused():
    with pytest.raises(ValueError):
        DominoSystem([])
    with pytest.raises(ValueError):
        DominoSystem(["a"], {("a", "b")})


# -- tiling -----------------------------------------------------------------------------------


def test_checkerboard_alternates():
    grid = brute_force_tiling(checkerboard(), 4)
    assert _is_tiling(checkerboard(), 4, grid)
    for (m, n), t in grid.items():
        assert t == grid[(0, 0)] if (m + n) % 2 == 0 else t != grid[(0, 0)]


@pytest.mark.parametrize("k", [1, 2, 5])
def test_self_compatible_tile_tiles_constantly(k):
    grid = brute_force_tiling(DominoSystem(["t"], {("t", "t")}, {("t", "t")}), k)
    assert set(grid.values()) == {"t"} and len(grid) == k * k


@pytest.mark.parametrize("k", [2, 3])
def test_no_pairs_means_no_tiling(k):
    assert brute_force_tiling(DominoSystem(["a", "b"]), k) is None
    assert brute_force_tiling(DominoSystem(["a"]), 1) == {(0, 0): "a"}


def test_budget_is_enforced():
    sys = DominoSystem(["a", "b", "c"], {("a", "b")}, {("a", "b")})
    with pytest.raises(TilingBudgetExceeded):
        brute_force_tiling(sys, 6, budget=5)


@st.composite
def systems(draw):
    tiles = ["a", "b", "c"][: draw(st.integers(1, 3))]
    pairs = list(itertools.product(tiles, tiles))
    h = draw(st.sets(st.sampled_from(pairs)))
    v = draw(st.sets(st.sampled_from(pairs)))
    return DominoSystem(tiles, h, v)


def _exhaustive(sys, k):
    cells = [(m, n) for m in range(k) for n in range(k)]
    for combo in itertools.product(sys.tiles, repeat=len(cells)):
        if _is_tiling(sys, k, dict(zip(cells, combo))):
            return True
    return False


@settings(max_examples=100)
@given(systems(), st.integers(1, 3))
def test_tiling_search_matches_exhaustive_search(sys, k):
    grid = brute_force_tiling(sys, k)
    assert (grid is not None) == _exhaustive(sys, k)
    if grid is not None:
        assert _is_tiling(sys, k, grid)


@settings(max_examples=100)
@given(systems(), st.integers(1, 4))
def test_larger_tilings_restrict_to_smaller_ones(sys, k):
    bigger = brute_force_tiling(sys, k + 1)
    if bigger is not None:
        smaller = {cell: t for cell, t in bigger.items() if max(cell) < k}
        assert _is_tiling(sys, k, smaller)
        assert brute_force_tiling(sys, k) is not None
