import itertools
import math

import pytest

from planarcsp.arrows import (
    ArrowGrid,
    LEFT,
    UP,
    rotation,
    scan_all_conflicts,
    strict_allowed,
)
from planarcsp.ppad import (
    ArrowOracle,
    ColoringOracle,
    InvalidInstance,
    NotALeaf,
    RleafdInstance,
    arrow_group,
    block_of,
    brouwer_point_to_arrow_cells,
    find_trichromatic_square,
    map_conflict_to_leaf,
    next_pow2,
    pipeline,
    random_rleafd,
    reduce_arrows_to_brouwer,
    reduce_rleafd_to_arrows,
    trichromatic_to_conflict,
)


def strictly_valid_inward_oracle(n, off=0.3):
    cx = cy = (n - 1) / 2 + off

    def fn(cell):
        col, row = cell
        phi = math.atan2(cy - row, cx - col)
        d = round(-phi / (math.pi / 4)) % 8
        allowed = strict_allowed(cell, n)
        if d in allowed:
            return d
        return min(allowed, key=lambda e: abs(rotation(d, e)))

    return ArrowOracle(n, fn)


# ---------------------------------------------------------------- grouping


def test_arrow_group_assignments():
    from planarcsp.arrows import DOWN, DOWN_LEFT, DOWN_RIGHT, RIGHT, UP_LEFT, UP_RIGHT

    assert arrow_group(LEFT) == 0
    assert arrow_group(DOWN) == 0 and arrow_group(DOWN_LEFT) == 0
    assert arrow_group(RIGHT) == 1 and arrow_group(DOWN_RIGHT) == 1
    assert arrow_group(UP) == 2 and arrow_group(UP_LEFT) == 2 and arrow_group(UP_RIGHT) == 2


def test_trichromatic_totality_all_4096():
    hits = 0
    for d in itertools.product(range(8), repeat=4):
        square = {(0, 0): d[0], (1, 0): d[1], (0, 1): d[2], (1, 1): d[3]}
        if {arrow_group(x) for x in d} == {0, 1, 2}:
            a, b = trichromatic_to_conflict(square)
            assert abs(rotation(square[a], square[b])) > 45
            hits += 1
    assert hits == 1728


# ------------------------------------------------------- arrows -> brouwer


def test_reduction_validity_scan():
    for n in (6, 8, 16):
        oracle = strictly_valid_inward_oracle(n)
        assert oracle.boundary_valid()
        coloring = reduce_arrows_to_brouwer(oracle)
        assert coloring.n == next_pow2(n + 4)
        assert coloring.boundary_valid()


def test_reduction_trichromatic_is_interior_and_maps_back():
    for n in (6, 8, 13):
        for off in (0.3, -0.4, 1.7):
            oracle = strictly_valid_inward_oracle(n, off)
            coloring = reduce_arrows_to_brouwer(oracle)
            p = find_trichromatic_square(coloring)
            cells = brouwer_point_to_arrow_cells(coloring, p)
            square = {cell: oracle(cell) for cell in cells}
            a, b = trichromatic_to_conflict(square)
            assert abs(rotation(square[a], square[b])) > 45
            grid = ArrowGrid(n)
            grid.cells = {(c, r): oracle((c, r)) for c in range(n) for r in range(n)}
            assert tuple(sorted((a, b))) in {
                tuple(sorted(pair)) for pair in scan_all_conflicts(grid)
            }


def test_reduction_collar_never_trichromatic():
    oracle = strictly_valid_inward_oracle(8)
    coloring = reduce_arrows_to_brouwer(oracle)
    n, side = 8, coloring.n
    inner = range(2, 8 + 2)
    for p1 in range(side - 1):
        for p2 in range(side - 1):
            if p1 in inner and p1 + 1 in inner and p2 in inner and p2 + 1 in inner:
                continue
            cols = {
                coloring((p1, p2)),
                coloring((p1 + 1, p2)),
                coloring((p1, p2 + 1)),
                coloring((p1 + 1, p2 + 1)),
            }
            assert cols != {0, 1, 2}, f"collar square at {(p1, p2)}"


def test_planted_4x4_coloring():
    grid = {
        (x, y): 1 for x in range(4) for y in range(4)
    }
    grid[(1, 1)] = 0
    grid[(2, 2)] = 2
    coloring = ColoringOracle(4, lambda p: grid[p])
    assert find_trichromatic_square(coloring) == (1, 1)


def test_scan_determinism():
    oracle = strictly_valid_inward_oracle(8)
    coloring = reduce_arrows_to_brouwer(oracle)
    assert find_trichromatic_square(coloring) == find_trichromatic_square(coloring)


# ------------------------------------------------------------- rleafd


def test_rleafd_validation():
    inst = RleafdInstance(2, [((0, 0), (1, 0)), ((1, 0), (1, 1))])
    assert inst.degree((1, 1)) == 1
    assert (1, 1) in inst.directed_leaves()
    assert inst.neighbors_of((1, 0)) == ((0, 0), (1, 1))
    assert inst.neighbors_of((0, 0)) == (None, (1, 0))


def test_rleafd_rejects_bad_instances():
    with pytest.raises(InvalidInstance):
        RleafdInstance(2, [])  # missing mandatory edge
    with pytest.raises(InvalidInstance):
        RleafdInstance(2, [((0, 0), (1, 0)), ((2, 2), (0, 0))])  # origin pred
    with pytest.raises(InvalidInstance):
        RleafdInstance(2, [((0, 0), (1, 0)), ((1, 0), (3, 0))])  # not neighbours
    with pytest.raises(InvalidInstance):
        RleafdInstance(
            2, [((0, 0), (1, 0)), ((1, 0), (1, 1)), ((1, 0), (2, 0))]
        )  # out-degree 2


def test_rleafd_json_roundtrip():
    inst = random_rleafd(3, 11)
    back = RleafdInstance.from_json(inst.to_json())
    assert back.edges == inst.edges and back.k == inst.k


def test_random_rleafd_deterministic_and_leafy():
    for k in (1, 2, 3, 4):
        for seed in range(5):
            a = random_rleafd(k, seed)
            b = random_rleafd(k, seed)
            assert a.edges == b.edges
            assert a.directed_leaves(), "a directed leaf beyond the origin must exist"


# ------------------------------------------------------ rleafd -> arrows


def test_reduce_rleafd_conflicts_exactly_at_leaves():
    for k, seed in [(2, 0), (2, 3), (3, 1)]:
        inst = random_rleafd(k, seed)
        oracle, grid = reduce_rleafd_to_arrows(inst)
        assert oracle.boundary_valid()
        conflicts = scan_all_conflicts(grid)
        assert conflicts
        blocks = {block_of(inst, c) for pair in conflicts for c in pair}
        leaves = set(inst.directed_leaves())
        assert blocks <= leaves
        assert leaves <= blocks
        for pair in conflicts:
            assert len({block_of(inst, c) for c in pair}) == 1


def test_reduce_rleafd_two_cycle_is_quiet():
    inst = RleafdInstance(
        2,
        [((0, 0), (1, 0)), ((1, 0), (1, 1)), ((2, 2), (3, 2)), ((3, 2), (2, 2))],
    )
    assert inst.directed_leaves() == [(1, 1)]
    oracle, grid = reduce_rleafd_to_arrows(inst)
    conflicts = scan_all_conflicts(grid)
    blocks = {block_of(inst, c) for pair in conflicts for c in pair}
    assert blocks == {(1, 1)}


def test_map_conflict_to_leaf_rejects_cross_block():
    inst = random_rleafd(2, 0)
    with pytest.raises(NotALeaf):
        map_conflict_to_leaf(inst, (( (6, 6), (6 + 9, 6) )))


def test_pipeline_many_instances():
    for k in (2, 3):
        for seed in range(5):
            res = pipeline(k, seed)
            inst = res["instance"]
            assert res["leaf"] in inst.directed_leaves()
            assert res["leaf"] != (0, 0)
