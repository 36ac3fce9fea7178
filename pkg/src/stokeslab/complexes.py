"""Cubical complexes on axis-aligned boxes, integer chains, and interiors.

Cells carry the standard increasing-coordinate orientation.  A k-cell is
identified by the sorted tuple of axes along which it has extent and a
per-axis base index: extent axes index the n-cell column the cell spans,
transverse axes index the lattice position.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field

from .errors import (
    ComplexMismatchError,
    DegreeError,
    InvalidGeometryError,
    NoInteriorError,
    NotACycleError,
)


@dataclass(frozen=True)
class Cell:
    extents: tuple  # sorted axes with extent
    index: tuple    # per-axis base index

    @property
    def degree(self):
        return len(self.extents)


@dataclass(frozen=True)
class RegionDescriptor:
    """Integration domain: a box, an annulus, or a set of n-cells."""

    kind: str                      # "box" | "annulus" | "cells"
    lo: tuple = None               # box corners
    hi: tuple = None
    r_inner: float = None          # annulus radii
    r_outer: float = None
    cells: frozenset = None        # n-cell subset
    complex: "GridComplex" = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind == "box":
            if self.lo is None or self.hi is None or len(self.lo) != len(self.hi):
                raise InvalidGeometryError("box region needs matching lo/hi corners")
            if any(a >= b for a, b in zip(self.lo, self.hi)):
                raise InvalidGeometryError("box corners must be strictly ordered")
        elif self.kind == "annulus":
            if not (0 < self.r_inner < self.r_outer):
                raise InvalidGeometryError("annulus needs 0 < r_inner < r_outer")
        elif self.kind == "cells":
            if not self.cells or self.complex is None:
                raise InvalidGeometryError("cell-subset region must be nonempty")
            n = self.complex.dimension
            for c in self.cells:
                if c.degree != n or not self.complex.contains(c):
                    raise InvalidGeometryError(f"cell {c} is not an n-cell of the complex")
        else:
            raise InvalidGeometryError(f"unknown region kind {self.kind!r}")

    @property
    def dimension(self):
        if self.kind == "box":
            return len(self.lo)
        if self.kind == "annulus":
            return 2
        return self.complex.dimension

    def volume(self):
        """Chart-coordinate volume of the region."""
        if self.kind == "box":
            v = 1.0
            for a, b in zip(self.lo, self.hi):
                v *= b - a
            return v
        if self.kind == "annulus":
            import math
            return (self.r_outer - self.r_inner) * 2 * math.pi
        return sum(self.complex.cell_volume(c) for c in self.cells)

    def contains_box(self, other):
        if self.kind != "box" or other.kind != "box":
            return False
        eps = 1e-12
        return all(a <= c + eps and d <= b + eps
                   for a, b, c, d in zip(self.lo, self.hi, other.lo, other.hi))


def box_region(lo, hi):
    return RegionDescriptor(kind="box", lo=tuple(map(float, lo)), hi=tuple(map(float, hi)))


def annulus_region(r_inner, r_outer):
    return RegionDescriptor(kind="annulus", r_inner=float(r_inner), r_outer=float(r_outer))


def cells_region(complex_, cells):
    return RegionDescriptor(kind="cells", cells=frozenset(cells), complex=complex_)


class GridComplex:
    """Axis-aligned cubical decomposition of a box in R^n (n <= 3)."""

    def __init__(self, origin, spacing, shape, chart="cartesian"):
        origin = tuple(map(float, origin))
        spacing = tuple(map(float, spacing))
        shape = tuple(map(int, shape))
        n = len(shape)
        if not (1 <= n <= 3) or len(origin) != n or len(spacing) != n:
            raise InvalidGeometryError("origin, spacing, shape must share dimension 1..3")
        if any(s <= 0 for s in spacing) or any(m <= 0 for m in shape):
            raise InvalidGeometryError("spacing and shape must be strictly positive")
        if chart not in ("cartesian", "polar"):
            raise InvalidGeometryError(f"unknown chart {chart!r}")
        if chart == "polar" and n != 2:
            raise InvalidGeometryError("polar chart is only valid in dimension 2")
        self.origin = origin
        self.spacing = spacing
        self.shape = shape
        self.chart = chart
        self.dimension = n
        self._cells = {}
        self._ids = {}

    def cells(self, k):
        """All k-cells in lexicographic (extents, index) order."""
        if not (0 <= k <= self.dimension):
            raise DegreeError(f"no cells of degree {k} in dimension {self.dimension}")
        if k not in self._cells:
            out = []
            for extents in itertools.combinations(range(self.dimension), k):
                ranges = [range(self.shape[i]) if i in extents else range(self.shape[i] + 1)
                          for i in range(self.dimension)]
                for index in itertools.product(*ranges):
                    out.append(Cell(extents=extents, index=index))
            self._cells[k] = out
            self._ids[k] = {c: i for i, c in enumerate(out)}
        return self._cells[k]

    def cell_count(self, k):
        return len(self.cells(k))

    def cell_id(self, cell):
        self.cells(cell.degree)
        try:
            return self._ids[cell.degree][cell]
        except KeyError:
            raise ComplexMismatchError(f"cell {cell} does not belong to this complex") from None

    def contains(self, cell):
        if not (0 <= cell.degree <= self.dimension) or len(cell.index) != self.dimension:
            return False
        for i in range(self.dimension):
            top = self.shape[i] - 1 if i in cell.extents else self.shape[i]
            if not (0 <= cell.index[i] <= top):
                return False
        return tuple(sorted(cell.extents)) == cell.extents

    def cell_volume(self, cell):
        """k-volume in chart coordinates: product of spacings over extent axes."""
        v = 1.0
        for axis in cell.extents:
            v *= self.spacing[axis]
        return v

    def cell_bounds(self, cell):
        lo = []
        hi = []
        for i in range(self.dimension):
            a = self.origin[i] + cell.index[i] * self.spacing[i]
            lo.append(a)
            hi.append(a + (self.spacing[i] if i in cell.extents else 0.0))
        return tuple(lo), tuple(hi)

    def boundary_faces(self, cell):
        """Signed faces of a cell per the alternating-sign cubical formula."""
        faces = []
        for j, axis in enumerate(cell.extents):
            sign = 1 if j % 2 == 0 else -1
            rest = tuple(a for a in cell.extents if a != axis)
            low = list(cell.index)
            high = list(cell.index)
            high[axis] += 1
            faces.append((sign, Cell(extents=rest, index=tuple(high))))
            faces.append((-sign, Cell(extents=rest, index=tuple(low))))
        return faces

    def full_chain(self):
        """The fundamental n-chain: every n-cell with coefficient +1."""
        return Chain(self, self.dimension, {c: 1 for c in self.cells(self.dimension)})

    def bounds(self):
        lo = self.origin
        hi = tuple(o + s * m for o, s, m in zip(self.origin, self.spacing, self.shape))
        return lo, hi


def build_grid_complex(box, shape, chart="cartesian"):
    """Mesh a box region into ``shape`` n-cells per axis."""
    if box.kind == "annulus":
        if chart != "polar":
            raise InvalidGeometryError("annulus regions mesh in the polar chart")
        import math
        lo = (box.r_inner, 0.0)
        hi = (box.r_outer, 2 * math.pi)
    elif box.kind == "box":
        lo, hi = box.lo, box.hi
    else:
        raise InvalidGeometryError("build_grid_complex needs a box or annulus region")
    shape = tuple(map(int, shape))
    if len(shape) != len(lo):
        raise InvalidGeometryError("shape dimension does not match the box")
    if any(m <= 0 for m in shape):
        raise InvalidGeometryError("shape must be positive per axis")
    spacing = tuple((b - a) / m for a, b, m in zip(lo, hi, shape))
    if any(s <= 0 for s in spacing):
        raise InvalidGeometryError("box must have positive extent per axis")
    return GridComplex(origin=lo, spacing=spacing, shape=shape, chart=chart)


class Chain:
    """Finite integer combination of k-cells of one complex."""

    def __init__(self, complex_, degree, terms):
        self.complex = complex_
        self.degree = int(degree)
        clean = {}
        for cell, coeff in terms.items():
            coeff = int(coeff)
            if coeff == 0:
                continue
            if cell.degree != self.degree:
                raise DegreeError(f"cell {cell} has degree {cell.degree}, chain has {self.degree}")
            if not complex_.contains(cell):
                raise ComplexMismatchError(f"cell {cell} is not in the complex")
            clean[cell] = coeff
        self.terms = clean

    def __eq__(self, other):
        return (isinstance(other, Chain) and self.complex is other.complex
                and self.degree == other.degree and self.terms == other.terms)

    def __hash__(self):
        return hash((id(self.complex), self.degree, frozenset(self.terms.items())))

    def __add__(self, other):
        if other.complex is not self.complex or other.degree != self.degree:
            raise ComplexMismatchError("chains must share complex and degree")
        terms = dict(self.terms)
        for cell, c in other.terms.items():
            terms[cell] = terms.get(cell, 0) + c
        return Chain(self.complex, self.degree, terms)

    def __neg__(self):
        return Chain(self.complex, self.degree, {c: -v for c, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, k):
        return Chain(self.complex, self.degree, {c: k * v for c, v in self.terms.items()})

    def is_empty(self):
        return not self.terms

    @property
    def support(self):
        return frozenset(self.terms)

    def __repr__(self):
        return f"<Chain deg={self.degree} terms={len(self.terms)}>"


def boundary(chain):
    """Cubical boundary operator; linear, with boundary(boundary(c)) = 0."""
    if chain.degree == 0:
        raise DegreeError("0-chains have no boundary")
    terms = {}
    for cell, coeff in chain.terms.items():
        for sign, face in chain.complex.boundary_faces(cell):
            terms[face] = terms.get(face, 0) + sign * coeff
    return Chain(chain.complex, chain.degree - 1, terms)


def _adjacent(complex_, a, b):
    """Two k-cells are adjacent when they share a (k-1)-face."""
    if a.degree == 0:
        return False
    fa = {f for _, f in complex_.boundary_faces(a)}
    fb = {f for _, f in complex_.boundary_faces(b)}
    return bool(fa & fb)


def connected_components(chain):
    """Partition a chain into cell-adjacency-connected subchains."""
    remaining = set(chain.terms)
    components = []
    while remaining:
        seed = remaining.pop()
        group = {seed}
        frontier = deque([seed])
        while frontier:
            cur = frontier.popleft()
            for other in list(remaining):
                if _adjacent(chain.complex, cur, other):
                    remaining.discard(other)
                    group.add(other)
                    frontier.append(other)
        components.append(Chain(chain.complex, chain.degree,
                                {c: chain.terms[c] for c in group}))
    return components


def _incident_ncells(complex_, face):
    """The one or two n-cells sharing an (n-1)-face ('exterior' for the outside)."""
    n = complex_.dimension
    missing = next(i for i in range(n) if i not in face.extents)
    out = []
    for base in (face.index[missing] - 1, face.index[missing]):
        if 0 <= base <= complex_.shape[missing] - 1:
            idx = list(face.index)
            idx[missing] = base
            out.append(Cell(extents=tuple(range(n)), index=tuple(idx)))
    return out


def interior_region(b):
    """Jordan-Brouwer interior of a closed (n-1)-chain, as an n-cell subset.

    Solves boundary(X) = b for the unique n-chain X by propagating potentials
    from the complex exterior (potential 0), then returns the support of X.
    Inconsistent constraints or coefficients outside {-1, 0, 1} mean b does
    not bound a plain cell subset.
    """
    complex_ = b.complex
    n = complex_.dimension
    if b.degree != n - 1:
        raise DegreeError(f"interior needs an (n-1)-chain, got degree {b.degree}")
    if b.degree >= 1 and not boundary(b).is_empty():
        raise NotACycleError("chain is not closed")

    wall = dict(b.terms)
    # Signed incidence of each face in each incident n-cell's boundary.
    sign_in = {}
    for cell in complex_.cells(n):
        for sign, face in complex_.boundary_faces(cell):
            sign_in[(cell, face)] = sign

    potential = {}
    frontier = deque()
    # Seed from the exterior through every perimeter face.
    for face in complex_.cells(n - 1):
        incident = _incident_ncells(complex_, face)
        if len(incident) != 1:
            continue
        cell = incident[0]
        value = wall.get(face, 0) * sign_in[(cell, face)]
        if cell in potential:
            if potential[cell] != value:
                raise NoInteriorError("cycle does not bound within the complex")
        else:
            potential[cell] = value
            frontier.append(cell)

    while frontier:
        cell = frontier.popleft()
        for sign, face in complex_.boundary_faces(cell):
            for other in _incident_ncells(complex_, face):
                if other == cell:
                    continue
                # sign*(X(cell) - X(other)) = coeff of face in b
                value = potential[cell] - wall.get(face, 0) * sign
                if other in potential:
                    if potential[other] != value:
                        raise NoInteriorError("cycle does not bound within the complex")
                else:
                    potential[other] = value
                    frontier.append(other)

    if any(v not in (-1, 0, 1) for v in potential.values()):
        raise NoInteriorError("cycle has multiplicity; no plain cell-subset interior")
    inside = {c for c, v in potential.items() if v != 0}
    if not inside:
        if b.is_empty():
            raise NoInteriorError("empty chain has no interior")
        raise NoInteriorError("cycle encloses no n-cells")
    return cells_region(complex_, inside)


# ----------------------------- serialization --------------------------------


def chain_to_json(chain):
    """Chains serialize as a list of {cell: [k, index, extents], coeff} entries."""
    items = sorted(chain.terms.items(), key=lambda kv: (kv[0].extents, kv[0].index))
    return [{"cell": [chain.degree, list(cell.index), list(cell.extents)], "coeff": coeff}
            for cell, coeff in items]


def chain_from_json(complex_, degree, data):
    terms = {}
    for entry in data:
        k, index, extents = entry["cell"]
        if k != degree:
            raise DegreeError(f"entry degree {k} does not match chain degree {degree}")
        cell = Cell(extents=tuple(extents), index=tuple(index))
        terms[cell] = terms.get(cell, 0) + int(entry["coeff"])
    return Chain(complex_, degree, terms)
