"""Analytic and discrete differential forms: derivative, pairing, quadrature.

Analytic k-forms carry one coefficient expression per lexicographic basis
k-covector of the chart.  Integration of n-forms over regions and 1-forms
over curves uses the composite midpoint rule; curve integration can work on
the exact parametrization (default) or on an inscribed polygon, which is the
discretization the curve entropy pipeline uses.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from math import fsum

import numpy as np

from . import expressions as ex
from .complexes import Cell, Chain, RegionDescriptor, box_region
from .errors import (
    ChartMismatchError,
    ComplexMismatchError,
    DegreeError,
    DomainError,
    InvalidGeometryError,
)

_CHART_VARS = {"cartesian": ("x", "y", "z"), "polar": ("r", "theta")}


def chart_variables(chart, dimension):
    return _CHART_VARS[chart][:dimension]


def basis_subsets(dimension, degree):
    """Lexicographic k-subsets of axes, the basis k-covector order."""
    return list(itertools.combinations(range(dimension), degree))


@dataclass(frozen=True)
class Piece:
    region: RegionDescriptor            # box sub-region
    coefficients: tuple                 # expression overrides, same basis order


@dataclass(frozen=True)
class Curve:
    """Parametric (n-1)-carrier in the plane: circle, box perimeter, annulus boundary."""

    kind: str                           # "circle" | "box_perimeter" | "annulus_boundary"
    radius: float = None
    center: tuple = (0.0, 0.0)
    orientation: int = 1                # +1 counterclockwise, -1 clockwise
    box: RegionDescriptor = None
    r_inner: float = None
    r_outer: float = None

    def __post_init__(self):
        if self.kind == "circle":
            if not self.radius or self.radius <= 0:
                raise InvalidGeometryError("circle needs a positive radius")
        elif self.kind == "annulus_boundary":
            if not (0 < self.r_inner < self.r_outer):
                raise InvalidGeometryError("annulus boundary needs 0 < r_inner < r_outer")
        elif self.kind == "box_perimeter":
            if self.box is None or self.box.kind != "box" or len(self.box.lo) != 2:
                raise InvalidGeometryError("box perimeter needs a 2-D box region")
        else:
            raise InvalidGeometryError(f"unsupported curve kind {self.kind!r}")


def circle_curve(radius, orientation=1, center=(0.0, 0.0)):
    return Curve(kind="circle", radius=float(radius), orientation=orientation,
                 center=tuple(center))


def annulus_boundary_curve(r_inner, r_outer):
    """Outer circle counterclockwise, inner circle clockwise."""
    return Curve(kind="annulus_boundary", r_inner=float(r_inner), r_outer=float(r_outer))


def box_perimeter_curve(box, orientation=1):
    return Curve(kind="box_perimeter", box=box, orientation=orientation)


class AnalyticForm:
    """Degree-k form with parsed coefficient expressions over a chart."""

    def __init__(self, degree, chart, coefficients, domain, pieces=None):
        if chart not in _CHART_VARS:
            raise ChartMismatchError(f"unknown chart {chart!r}")
        if chart == "polar":
            if domain.kind not in ("annulus",):
                raise InvalidGeometryError("polar forms are defined on annulus domains")
            dimension = 2
        else:
            if domain.kind != "box":
                raise InvalidGeometryError("cartesian forms are defined on box domains")
            dimension = len(domain.lo)
        expected = math.comb(dimension, degree)
        coefficients = tuple(self._coerce(c) for c in coefficients)
        if len(coefficients) != expected:
            raise DegreeError(
                f"degree-{degree} form in dimension {dimension} needs "
                f"{expected} coefficients, got {len(coefficients)}")
        self.degree = int(degree)
        self.chart = chart
        self.dimension = dimension
        self.coefficients = coefficients
        self.domain = domain
        if pieces:
            coerced = []
            for p in pieces:
                if len(p.coefficients) != expected:
                    raise DegreeError("piece coefficient count mismatch")
                coerced.append(Piece(region=p.region,
                                     coefficients=tuple(self._coerce(c)
                                                        for c in p.coefficients)))
            self.pieces = tuple(coerced)
        else:
            self.pieces = None

    @staticmethod
    def _coerce(c):
        if isinstance(c, ex.Expression):
            return c
        if isinstance(c, str):
            return ex.parse_expression(c)
        return ex.Const(float(c))

    @classmethod
    def constant(cls, value, domain, chart="cartesian"):
        """Constant top-degree form value * dvol."""
        n = 2 if chart == "polar" else len(domain.lo)
        return cls(degree=n, chart=chart, coefficients=[ex.Const(value)], domain=domain)

    @property
    def variables(self):
        return chart_variables(self.chart, self.dimension)

    def _env(self, point):
        return dict(zip(self.variables, point))

    def _piece_coefficients(self, point):
        if self.pieces:
            for p in self.pieces:
                if all(a - 1e-12 <= v <= b + 1e-12
                       for a, b, v in zip(p.region.lo, p.region.hi, point)):
                    return p.coefficients
        return self.coefficients

    def coefficient_at(self, point, which=0):
        """Evaluate the coefficient of the ``which``-th basis covector at a point."""
        env = self._env(point)
        return self._piece_coefficients(point)[which].evaluate(env)

    def contains_point(self, point):
        if self.domain.kind == "box":
            return all(a - 1e-12 <= v <= b + 1e-12
                       for a, b, v in zip(self.domain.lo, self.domain.hi, point))
        r = point[0]
        return self.domain.r_inner - 1e-12 <= r <= self.domain.r_outer + 1e-12

    def __repr__(self):
        return f"<AnalyticForm deg={self.degree} chart={self.chart} dim={self.dimension}>"


def exterior_derivative(form):
    """Coordinate exterior derivative; piecewise forms go piece by piece."""
    n = form.dimension
    if form.degree >= n:
        raise DegreeError(f"cannot take d of a degree-{form.degree} form in dimension {n}")
    variables = form.variables
    in_subsets = basis_subsets(n, form.degree)
    out_subsets = basis_subsets(n, form.degree + 1)

    def derive(coefficients):
        out = []
        for target in out_subsets:
            acc = ex.Const(0.0)
            for pos, axis in enumerate(target):
                rest = tuple(a for a in target if a != axis)
                src = in_subsets.index(rest)
                term = ex.differentiate(coefficients[src], variables[axis])
                acc = ex.add(acc, term) if pos % 2 == 0 else ex.sub(acc, term)
            out.append(acc)
        return tuple(out)

    pieces = None
    if form.pieces:
        pieces = [Piece(region=p.region, coefficients=derive(p.coefficients))
                  for p in form.pieces]
    return AnalyticForm(degree=form.degree + 1, chart=form.chart,
                        coefficients=derive(form.coefficients),
                        domain=form.domain, pieces=pieces)


# ------------------------------- cochains -----------------------------------


class Cochain:
    """Per-cell integrals of a k-form over the oriented k-cells of a complex."""

    def __init__(self, complex_, degree, values):
        count = complex_.cell_count(degree)
        values = np.asarray(values)
        if values.shape != (count,):
            raise DegreeError(f"expected {count} values for degree {degree}, got {values.shape}")
        if not np.issubdtype(values.dtype, np.integer):
            values = values.astype(float)
        self.complex = complex_
        self.degree = int(degree)
        self.values = values

    @property
    def is_integer(self):
        return np.issubdtype(self.values.dtype, np.integer)

    def value(self, cell):
        return self.values[self.complex.cell_id(cell)]

    def to_json(self):
        return {"degree": self.degree, "shape": list(self.complex.shape),
                "values": [v.item() for v in self.values]}

    @classmethod
    def from_json(cls, complex_, data):
        values = data["values"]
        if all(isinstance(v, int) for v in values):
            values = np.array(values, dtype=np.int64)
        return cls(complex_, data["degree"], values)


def pairing(cochain, chain):
    """<cochain, chain> = sum of coeff * value; exact for integer data."""
    if not isinstance(cochain, Cochain) or not isinstance(chain, Chain):
        raise TypeError("pairing expects (Cochain, Chain)")
    if chain.complex is not cochain.complex:
        raise ComplexMismatchError("pairing needs a common complex")
    if chain.degree != cochain.degree:
        raise DegreeError(f"degree mismatch: {cochain.degree} vs {chain.degree}")
    if cochain.is_integer:
        return sum(coeff * int(cochain.values[cochain.complex.cell_id(cell)])
                   for cell, coeff in chain.terms.items())
    return fsum(coeff * float(cochain.values[cochain.complex.cell_id(cell)])
                for cell, coeff in chain.terms.items())


def coboundary(cochain):
    """Discrete d: adjoint of the boundary, so <d w, c> = <w, boundary c> exactly."""
    complex_ = cochain.complex
    k = cochain.degree
    if k >= complex_.dimension:
        raise DegreeError(f"cannot take coboundary of top-degree {k}")
    upper = complex_.cells(k + 1)
    if cochain.is_integer:
        out = np.zeros(len(upper), dtype=np.int64)
        for i, cell in enumerate(upper):
            out[i] = sum(sign * int(cochain.values[complex_.cell_id(face)])
                         for sign, face in complex_.boundary_faces(cell))
    else:
        out = np.zeros(len(upper))
        for i, cell in enumerate(upper):
            out[i] = fsum(sign * float(cochain.values[complex_.cell_id(face)])
                          for sign, face in complex_.boundary_faces(cell))
    return Cochain(complex_, k + 1, out)


# ------------------------------ quadrature ----------------------------------


def _midpoints(a, b, m):
    h = (b - a) / m
    return [a + (i + 0.5) * h for i in range(m)], h


def _integrate_box(func, lo, hi, resolution):
    """Composite midpoint rule over an axis-aligned box, fixed summation order."""
    axes = []
    vol = 1.0
    for a, b in zip(lo, hi):
        pts, h = _midpoints(a, b, resolution)
        axes.append(pts)
        vol *= h
    return fsum(func(p) * vol for p in itertools.product(*axes))


def _region_subboxes(form, region):
    """Piece-aligned sub-boxes covering a box/annulus region."""
    if region.kind == "annulus":
        lo = (region.r_inner, 0.0)
        hi = (region.r_outer, 2 * math.pi)
    elif region.kind == "box":
        lo, hi = region.lo, region.hi
    else:
        raise InvalidGeometryError(f"cannot mesh region kind {region.kind!r}")
    if not form.pieces:
        return [(lo, hi)]
    boxes = []
    for p in form.pieces:
        clo = tuple(max(a, c) for a, c in zip(lo, p.region.lo))
        chi = tuple(min(b, d) for b, d in zip(hi, p.region.hi))
        if all(a < b for a, b in zip(clo, chi)):
            boxes.append((clo, chi))
    covered = fsum(math.prod(b - a for a, b in zip(clo, chi)) for clo, chi in boxes)
    total = math.prod(b - a for a, b in zip(lo, hi))
    if abs(covered - total) > 1e-9 * max(1.0, total):
        raise DomainError("piecewise form does not cover the integration region")
    return boxes


def _check_region_in_domain(form, region):
    if form.chart == "polar":
        if region.kind != "annulus":
            raise ChartMismatchError("polar forms integrate over annulus regions")
        if region.r_inner < form.domain.r_inner - 1e-12 or \
           region.r_outer > form.domain.r_outer + 1e-12:
            raise DomainError("region exceeds the form's annulus domain")
    else:
        if region.kind != "box":
            raise ChartMismatchError("cartesian forms integrate over box regions")
        if not form.domain.contains_box(region):
            raise DomainError("region exceeds the form's box domain")


def integrate_region(form, region, absolute=False, resolution=16):
    """Midpoint quadrature of a top-degree form over a region.

    Piecewise forms integrate piece by piece with piece-aligned sub-grids, so
    step coefficients integrate exactly.  ``absolute`` integrates |alpha|.
    Integrals are taken against the chart-coordinate volume (the natural
    integral of a form; no metric factor).
    """
    if resolution <= 0:
        raise InvalidGeometryError("resolution must be positive")
    if form.degree != form.dimension:
        raise DegreeError("integrate_region needs a top-degree form")

    def integrand(p):
        v = form.coefficient_at(p, 0)
        return abs(v) if absolute else v

    if region.kind == "cells":
        boxes = [region.complex.cell_bounds(c)
                 for c in sorted(region.cells, key=lambda c: c.index)]
    else:
        _check_region_in_domain(form, region)
        boxes = _region_subboxes(form, region)
    return fsum(_integrate_box(integrand, lo, hi, resolution) for lo, hi in boxes)


# --- curve integration -------------------------------------------------------


def _circle_segments(radius, center, orientation, resolution, method):
    """Per-segment (point, chart tangent-increment callable) data for one circle.

    Yields tuples (point_xy, delta_param, chart_increments, chord_length) where
    chart_increments maps a chart to the pairing of each basis covector with
    the segment displacement.
    """
    out = []
    h = 2 * math.pi / resolution
    cx, cy = center
    for j in range(resolution):
        t0 = orientation * j * h
        t1 = orientation * (j + 1) * h
        if method == "param":
            tm = 0.5 * (t0 + t1)
            px = cx + radius * math.cos(tm)
            py = cy + radius * math.sin(tm)
            # exact tangent * dt
            dx = -radius * math.sin(tm) * (t1 - t0)
            dy = radius * math.cos(tm) * (t1 - t0)
            chord = radius * h
        else:  # inscribed polygon: evaluate at the chord midpoint, move along the chord
            ax = cx + radius * math.cos(t0)
            ay = cy + radius * math.sin(t0)
            bx = cx + radius * math.cos(t1)
            by = cy + radius * math.sin(t1)
            px, py = 0.5 * (ax + bx), 0.5 * (ay + by)
            dx, dy = bx - ax, by - ay
            chord = math.hypot(dx, dy)
        out.append(((px, py), t1 - t0, (dx, dy), chord))
    return out


def _segment_pullback(form, point_xy, displacement):
    """Apply the 1-form at a point to a small displacement, chart-aware."""
    dx, dy = displacement
    if form.chart == "cartesian":
        p = point_xy
        return (form.coefficient_at(p, 0) * dx + form.coefficient_at(p, 1) * dy,
                (dx, dy))
    x, y = point_xy
    r = math.hypot(x, y)
    if r == 0:
        raise DomainError("polar form evaluated at the origin")
    theta = math.atan2(y, x) % (2 * math.pi)
    dr = (x * dx + y * dy) / r
    dtheta = (x * dy - y * dx) / (r * r)
    p = (r, theta)
    return (form.coefficient_at(p, 0) * dr + form.coefficient_at(p, 1) * dtheta,
            (dr, dtheta))


def curve_segments(form, curve, resolution, method="param"):
    """Segment decomposition of a curve with per-segment form increments.

    Returns a list of (value, coord_measure, chord_length) where ``value`` is
    the form paired with the segment displacement, ``coord_measure`` the chart
    parameter increment (theta for circles, arclength for straight edges),
    and ``chord_length`` the Euclidean segment length.
    """
    if form.dimension != 2 or form.degree != 1:
        raise DegreeError("curve integration needs a 1-form in dimension 2")
    segs = []
    if curve.kind == "circle":
        circles = [(curve.radius, curve.center, curve.orientation)]
    elif curve.kind == "annulus_boundary":
        circles = [(curve.r_outer, (0.0, 0.0), 1), (curve.r_inner, (0.0, 0.0), -1)]
    else:
        circles = []
    for radius, center, orientation in circles:
        if form.chart == "polar" and center != (0.0, 0.0):
            raise DomainError("polar forms support origin-centered circles only")
        for point, dparam, disp, chord in _circle_segments(
                radius, center, orientation, resolution, method):
            value, _ = _segment_pullback(form, point, disp)
            segs.append((value, dparam, chord))
    if curve.kind == "box_perimeter":
        if form.chart != "cartesian":
            raise ChartMismatchError("box perimeters pair with cartesian forms")
        (x0, y0), (x1, y1) = curve.box.lo, curve.box.hi
        corners = [(x0, y0), (x1, y0), (x1, y1), (x0, y1)]
        if curve.orientation < 0:
            corners = [corners[0]] + corners[:0:-1]
        m = max(1, resolution // 4)
        for a, b in zip(corners, corners[1:] + corners[:1]):
            vx, vy = (b[0] - a[0]) / m, (b[1] - a[1]) / m
            for j in range(m):
                px = a[0] + (j + 0.5) * vx
                py = a[1] + (j + 0.5) * vy
                value, _ = _segment_pullback(form, (px, py), (vx, vy))
                length = math.hypot(vx, vy)
                segs.append((value, length, length))
    return segs


def integrate_curve(form, curve, resolution=1024, method="param", absolute=False):
    """Line integral of a 1-form over a circle or box perimeter.

    ``method='param'`` uses the midpoint rule on the exact parametrization;
    ``method='polygon'`` integrates along the inscribed polygon (the curve
    discretization used by the entropy pipeline and convergence studies).
    """
    if resolution <= 0:
        raise InvalidGeometryError("resolution must be positive")
    segs = curve_segments(form, curve, resolution, method=method)
    if absolute:
        return fsum(abs(v) for v, _, _ in segs)
    return fsum(v for v, _, _ in segs)


# ------------------------------ discretize ----------------------------------


def discretize(form, complex_, degree=None, quadrature=4):
    """Sample a k-form into a k-cochain: per-cell midpoint quadrature.

    Exact for coefficients that are cell-wise constant (and, per axis, affine).
    """
    if form.chart != complex_.chart:
        raise ChartMismatchError(
            f"form chart {form.chart!r} does not match complex chart {complex_.chart!r}")
    k = form.degree if degree is None else degree
    if k != form.degree:
        raise DegreeError("discretize degree must match the form degree")
    subsets = basis_subsets(form.dimension, k)
    cells = complex_.cells(k)
    values = np.zeros(len(cells))
    for i, cell in enumerate(cells):
        lo, hi = complex_.cell_bounds(cell)
        which = subsets.index(cell.extents)
        if k == 0:
            values[i] = form.coefficient_at(lo, which)
            continue
        axes = []
        weight = 1.0
        for axis in range(form.dimension):
            if axis in cell.extents:
                pts, h = _midpoints(lo[axis], hi[axis], quadrature)
                axes.append(pts)
                weight *= h
            else:
                axes.append([lo[axis]])
        values[i] = fsum(form.coefficient_at(p, which) * weight
                         for p in itertools.product(*axes))
    return Cochain(complex_, k, values)
