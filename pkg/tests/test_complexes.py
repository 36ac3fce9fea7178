import itertools

import numpy as np
import pytest

from stokeslab import (
    Cell,
    box_region,
    boundary,
    build_grid_complex,
    cells_region,
    chain_from_json,
    chain_to_json,
    connected_components,
    interior_region,
)
from stokeslab.complexes import Chain
from stokeslab.errors import (
    DegreeError,
    InvalidGeometryError,
    NoInteriorError,
    NotACycleError,
)


def unit_grid(*shape):
    lo = tuple(0.0 for _ in shape)
    hi = tuple(float(s) for s in shape)
    return build_grid_complex(box_region(lo, hi), shape)


class TestCellCounts:
    def test_unit_square_2x2(self):
        cx = unit_grid(2, 2)
        assert cx.cell_count(0) == 9
        assert cx.cell_count(1) == 12
        assert cx.cell_count(2) == 4

    def test_interval_shape_4(self):
        cx = unit_grid(4)
        assert cx.cell_count(0) == 5
        assert cx.cell_count(1) == 4

    def test_unit_cube(self):
        cx = unit_grid(1, 1, 1)
        assert [cx.cell_count(k) for k in range(4)] == [8, 12, 6, 1]

    @pytest.mark.parametrize("shape", [(3,), (5, 2), (4, 4), (2, 3, 2), (3, 3, 3)])
    def test_count_formula(self, shape):
        cx = unit_grid(*shape)
        n = len(shape)
        for k in range(n + 1):
            expected = 0
            for extents in itertools.combinations(range(n), k):
                prod = 1
                for i in range(n):
                    prod *= shape[i] if i in extents else shape[i] + 1
                expected += prod
            assert cx.cell_count(k) == expected

    def test_bad_geometry_rejected(self):
        with pytest.raises(InvalidGeometryError):
            build_grid_complex(box_region((0, 0), (1, 1)), (0, 2))
        with pytest.raises(InvalidGeometryError):
            box_region((0, 0), (0, 1))
        with pytest.raises(InvalidGeometryError):
            build_grid_complex(box_region((0, 0, 0), (1, 1, 1)), (1, 1, 1),
                               chart="polar")

    def test_cell_volume_is_product_of_spacings(self):
        cx = build_grid_complex(box_region((0, 0), (3, 2)), (3, 4))
        face = cx.cells(2)[0]
        assert cx.cell_volume(face) == pytest.approx(1.0 * 0.5)
        edge_x = Cell(extents=(0,), index=(0, 0))
        assert cx.cell_volume(edge_x) == pytest.approx(1.0)
        vertex = Cell(extents=(), index=(0, 0))
        assert cx.cell_volume(vertex) == 1.0


class TestBoundary:
    def test_square_cell_has_four_signed_edges(self):
        cx = unit_grid(2, 2)
        cell = cx.cells(2)[0]
        b = boundary(Chain(cx, 2, {cell: 1}))
        assert len(b.terms) == 4
        assert sorted(b.terms.values()) == [-1, -1, 1, 1]
        assert boundary(b).is_empty()

    def test_full_2x2_boundary_is_the_perimeter(self):
        cx = unit_grid(2, 2)
        b = boundary(cx.full_chain())
        assert len(b.terms) == 8
        # every surviving edge lies on the geometric perimeter
        for edge in b.support:
            lo, hi = cx.cell_bounds(edge)
            on_rim = any(lo[i] == 0.0 and hi[i] == 0.0 or lo[i] == 2.0
                         for i in range(2))
            assert on_rim

    def test_single_edge_head_minus_tail(self):
        cx = unit_grid(4)
        edge = Cell(extents=(0,), index=(1,))
        b = boundary(Chain(cx, 1, {edge: 1}))
        assert b.terms == {Cell(extents=(), index=(2,)): 1,
                           Cell(extents=(), index=(1,)): -1}

    def test_degree_zero_rejected(self):
        cx = unit_grid(2, 2)
        v = cx.cells(0)[0]
        with pytest.raises(DegreeError):
            boundary(Chain(cx, 0, {v: 1}))

    def test_boundary_squared_vanishes_randomly(self):
        rng = np.random.RandomState(7)
        shapes = [(16, 16), (6, 6, 6), (5, 3), (2, 2, 4), (9,)]
        for trial in range(1000):
            shape = shapes[trial % len(shapes)]
            cx = unit_grid(*shape)
            k = rng.randint(1, len(shape) + 1)
            pool = cx.cells(k)
            picks = rng.choice(len(pool), size=min(6, len(pool)), replace=False)
            terms = {pool[i]: int(rng.randint(-4, 5)) for i in picks}
            c = Chain(cx, k, terms)
            if k >= 2:
                assert boundary(boundary(c)).is_empty()
            else:
                # degree-1 chains: check linearity instead
                assert boundary(c.scale(3)) == boundary(c).scale(3)

    def test_boundary_linearity(self):
        cx = unit_grid(3, 3)
        faces = cx.cells(2)
        a = Chain(cx, 2, {faces[0]: 2, faces[4]: -1})
        b = Chain(cx, 2, {faces[4]: 1, faces[8]: 3})
        assert boundary(a + b) == boundary(a) + boundary(b)


class TestConnectedComponents:
    def test_perimeter_is_one_component(self):
        cx = unit_grid(2, 2)
        comps = connected_components(boundary(cx.full_chain()))
        assert len(comps) == 1

    def test_two_disjoint_squares(self):
        cx = unit_grid(4, 4)
        faces = {c.index: c for c in cx.cells(2)}
        b = boundary(Chain(cx, 2, {faces[(0, 0)]: 1, faces[(3, 3)]: 1}))
        comps = connected_components(b)
        assert len(comps) == 2
        combined = comps[0] + comps[1]
        assert combined == b

    def test_empty_chain(self):
        cx = unit_grid(2, 2)
        assert connected_components(Chain(cx, 1, {})) == []

    def test_supports_partition_the_input(self):
        cx = unit_grid(4, 4)
        faces = {c.index: c for c in cx.cells(2)}
        chain = boundary(Chain(cx, 2, {faces[(0, 0)]: 1, faces[(2, 2)]: 1,
                                       faces[(3, 2)]: 1}))
        comps = connected_components(chain)
        union = frozenset().union(*(c.support for c in comps))
        assert union == chain.support
        for a, b in itertools.combinations(comps, 2):
            assert not (a.support & b.support)


class TestInteriorRegion:
    def test_full_perimeter_encloses_everything(self):
        cx = unit_grid(2, 2)
        region = interior_region(boundary(cx.full_chain()))
        assert region.cells == frozenset(cx.cells(2))

    def test_corner_cell(self):
        cx = unit_grid(3, 3)
        corner = cx.cells(2)[0]
        region = interior_region(boundary(Chain(cx, 2, {corner: 1})))
        assert region.cells == frozenset([corner])

    def test_ring_of_eight_cells(self):
        cx = unit_grid(3, 3)
        ring = [c for c in cx.cells(2) if c.index != (1, 1)]
        b = boundary(Chain(cx, 2, {c: 1 for c in ring}))
        assert len(connected_components(b)) == 2
        region = interior_region(b)
        assert region.cells == frozenset(ring)

    def test_non_closed_chain_rejected(self):
        cx = unit_grid(2, 2)
        edge = cx.cells(1)[0]
        with pytest.raises(NotACycleError):
            interior_region(Chain(cx, 1, {edge: 1}))

    def test_doubled_cycle_rejected(self):
        cx = unit_grid(2, 2)
        b = boundary(cx.full_chain()).scale(2)
        with pytest.raises(NoInteriorError):
            interior_region(b)

    def test_empty_chain_rejected(self):
        cx = unit_grid(2, 2)
        with pytest.raises(NoInteriorError):
            interior_region(Chain(cx, 1, {}))

    def test_exhaustive_connected_subsets_of_4x4(self):
        cx = unit_grid(4, 4)
        faces = cx.cells(2)

        def connected(mask):
            idx = [i for i in range(16) if mask >> i & 1]
            seen = {idx[0]}
            stack = [idx[0]]
            rest = set(idx[1:])
            while stack:
                c = stack.pop()
                row, col = divmod(c, 4)
                for d in (c - 4, c + 4,
                          c - 1 if col else -1, c + 1 if col < 3 else -1):
                    if d in rest:
                        rest.discard(d)
                        seen.add(d)
                        stack.append(d)
            return not rest

        checked = 0
        for mask in range(1, 1 << 16):
            if not connected(mask):
                continue
            subset = {faces[i] for i in range(16) if mask >> i & 1}
            b = boundary(Chain(cx, 2, {c: 1 for c in subset}))
            assert interior_region(b).cells == frozenset(subset)
            checked += 1
        assert checked > 10000

    def test_1d_interval(self):
        cx = unit_grid(4)
        edges = cx.cells(1)
        b = boundary(Chain(cx, 1, {edges[1]: 1, edges[2]: 1}))
        region = interior_region(b)
        assert region.cells == frozenset(edges[1:3])


class TestSerialization:
    def test_round_trip(self):
        cx = unit_grid(3, 3)
        b = boundary(cx.full_chain())
        data = chain_to_json(b)
        back = chain_from_json(cx, b.degree, data)
        assert back == b

    def test_region_volume(self):
        cx = unit_grid(3, 3)
        region = cells_region(cx, cx.cells(2)[:4])
        assert region.volume() == pytest.approx(4.0)
