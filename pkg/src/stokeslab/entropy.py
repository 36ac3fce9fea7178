"""Density functions induced by forms, mass-equivalent balls, and entropy.

Densities follow one of two conventions on lower-dimensional carriers and
polar regions: ``coordinate`` takes the local mass per chart-coordinate
volume, ``intrinsic`` per induced Euclidean volume/arclength.  The entropy
integral itself is always taken against the intrinsic measure; the annulus
reproduction therefore uses the mixed (coordinate density, arclength
integral) combination.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from math import fsum

import numpy as np

from .complexes import Chain, RegionDescriptor
from .errors import (
    DegreeError,
    DomainError,
    InvalidGeometryError,
    NoLimitError,
    NormalizationError,
    SingularPointError,
    ZeroMassError,
)
from .forms import (
    AnalyticForm,
    Cochain,
    Curve,
    _integrate_box,
    _region_subboxes,
    curve_segments,
    integrate_curve,
    integrate_region,
)

UNIT_BALL_VOLUME = {1: 2.0, 2: math.pi, 3: 4.0 * math.pi / 3.0}

DEFAULT_EPS_LEVELS = 7
DEFAULT_LIMIT_TOLERANCE = 1e-6


@dataclass
class DensitySample:
    location: tuple        # sample point, or cell bounds midpoint
    rho: float             # density under the chosen convention
    weight: float          # intrinsic measure attached to the sample
    conv_weight: float     # measure under the density's own convention


@dataclass
class DensityField:
    region: object
    convention: str
    normalizer: float                       # Z = int |alpha| (coordinate mass)
    samples: list

    def sum_rho_measure(self):
        """Sum rho * measure under the density's convention; 1 when matching."""
        return fsum(s.rho * s.conv_weight for s in self.samples)

    def entropy(self):
        return -fsum(s.rho * math.log(s.rho) * s.weight
                     for s in self.samples if s.rho > 0)


@dataclass
class EntropyReport:
    S: float
    Z: float
    convention: str
    resolution: int
    method: str
    sum_rho_measure: float
    schedule_residual: float = None

    def to_payload(self):
        return {
            "schema": "entropy_report",
            "version": 1,
            "S": self.S,
            "Z": self.Z,
            "convention": self.convention,
            "resolution": self.resolution,
            "method": self.method,
            "sum_rho_measure": self.sum_rho_measure,
            "schedule_residual": self.schedule_residual,
        }


def _check_convention(convention):
    if convention not in ("intrinsic", "coordinate"):
        raise InvalidGeometryError(f"unknown convention {convention!r}")


# ------------------------------- ball mass ----------------------------------


def _ball_points(dimension, resolution):
    """Midpoint nodes and weights for the unit ball in measure-preserving
    radial coordinates (exact for constant integrands in any dimension)."""
    if dimension == 1:
        us, hu = _mid(-1.0, 1.0, resolution)
        return [((u,), hu) for u in us]
    if dimension == 2:
        # u = rho^2/2 in [0, 1/2], angle phi
        us, hu = _mid(0.0, 0.5, resolution)
        ps, hp = _mid(0.0, 2 * math.pi, resolution)
        out = []
        for u in us:
            rho = math.sqrt(2 * u)
            for p in ps:
                out.append(((rho * math.cos(p), rho * math.sin(p)), hu * hp))
        return out
    # n = 3: u = rho^3/3, v = cos(theta)
    us, hu = _mid(0.0, 1.0 / 3.0, resolution)
    vs, hv = _mid(-1.0, 1.0, resolution)
    ps, hp = _mid(0.0, 2 * math.pi, resolution)
    out = []
    for u in us:
        rho = (3 * u) ** (1.0 / 3.0)
        for v in vs:
            st = math.sqrt(max(0.0, 1 - v * v))
            for p in ps:
                out.append(((rho * st * math.cos(p), rho * st * math.sin(p), rho * v),
                            hu * hv * hp))
    return out


def _mid(a, b, m):
    h = (b - a) / m
    return [a + (i + 0.5) * h for i in range(m)], h


def ball_mass(form, x, eps, resolution=32):
    """Quadrature of |alpha| over the chart-coordinate ball B(x, eps)."""
    n = form.dimension
    if form.degree != n:
        raise DegreeError("ball_mass needs a top-degree form")
    if eps <= 0:
        raise InvalidGeometryError("eps must be positive")
    x = tuple(map(float, x))
    lo = tuple(v - eps for v in x)
    hi = tuple(v + eps for v in x)
    if form.domain.kind == "box":
        if not all(a - 1e-12 <= c and d <= b + 1e-12 for a, b, c, d in
                   zip(form.domain.lo, form.domain.hi, lo, hi)):
            raise DomainError("ball exits the form's domain")
    else:
        if lo[0] < form.domain.r_inner - 1e-12 or hi[0] > form.domain.r_outer + 1e-12:
            raise DomainError("ball exits the form's domain")
    scale = eps ** n
    total = 0.0
    parts = []
    for unit_point, w in _ball_points(n, resolution):
        p = tuple(xi + eps * ui for xi, ui in zip(x, unit_point))
        parts.append(abs(form.coefficient_at(p, 0)) * w * scale)
    total = fsum(parts)
    return total


def alpha_ball_radius(form, x, eps, resolution=32):
    """Radius of the ball whose plain volume equals the |alpha|-mass of B(x, eps)."""
    mass = ball_mass(form, x, eps, resolution=resolution)
    if mass <= 0:
        raise ZeroMassError("ball carries no |alpha| mass; radius undefined")
    n = form.dimension
    return (mass / UNIT_BALL_VOLUME[n]) ** (1.0 / n)


def ball_intrinsic_volume(form, x, eps, resolution=32):
    """Intrinsic volume of the chart ball (equals its coordinate volume except
    in the polar chart, where the area element is r dr dtheta)."""
    n = form.dimension
    coord = UNIT_BALL_VOLUME[n] * eps ** n
    if form.chart != "polar":
        return coord
    return coord * x[0]  # exact: mean of r over a disk centered at (r0, theta0)


# ---------------------------- density function ------------------------------


def _default_schedule(form, x, region):
    if isinstance(region, Curve):
        if region.kind == "circle":
            span = region.radius
        elif region.kind == "annulus_boundary":
            span = region.r_inner
        else:
            span = min(b - a for a, b in zip(region.box.lo, region.box.hi))
        eps0 = span / 8.0
    else:
        if form.domain.kind == "box":
            eps0 = min(min(v - a, b - v)
                       for a, b, v in zip(form.domain.lo, form.domain.hi, x))
        else:
            eps0 = min(x[0] - form.domain.r_inner, form.domain.r_outer - x[0])
        eps0 = eps0 / 2.0
        if eps0 <= 0:
            raise DomainError("point sits on the domain boundary; pass an eps schedule")
    return [eps0 * 2.0 ** (-k) for k in range(DEFAULT_EPS_LEVELS)]


def _curve_point_average(form, curve, x, eps, convention, resolution=64):
    """Average of |omega| over the parameter arc of coordinate half-width eps
    around x, per the requested measure."""
    if curve.kind == "box_perimeter":
        raise InvalidGeometryError("pointwise densities support circle carriers")
    if curve.kind == "circle":
        radius, orientation = curve.radius, curve.orientation
    else:
        r = math.hypot(x[0], x[1]) if len(x) == 2 and form.chart == "cartesian" else x[0]
        if abs(r - curve.r_outer) < abs(r - curve.r_inner):
            radius, orientation = curve.r_outer, 1
        else:
            radius, orientation = curve.r_inner, -1
    if form.chart == "polar":
        r0, t0 = x
        if abs(r0 - radius) > 1e-9 * max(1.0, radius):
            raise DomainError("point does not lie on the carrier circle")
    else:
        r0 = math.hypot(x[0], x[1])
        t0 = math.atan2(x[1], x[0])
        if abs(r0 - radius) > 1e-9 * max(1.0, radius):
            raise DomainError("point does not lie on the carrier circle")
    delta = eps / radius  # angular half-width for an arclength half-width eps
    ts, h = _mid(t0 - delta, t0 + delta, resolution)
    vals = []
    for t in ts:
        if form.chart == "polar":
            p = (radius, t % (2 * math.pi))
            g = form.coefficient_at(p, 1)  # d(theta) component; dr vanishes on the arc
            vals.append(abs(g) * h)
        else:
            px, py = radius * math.cos(t), radius * math.sin(t)
            gx = form.coefficient_at((px, py), 0)
            gy = form.coefficient_at((px, py), 1)
            # pullback to theta: (-R sin t, R cos t)
            vals.append(abs(gx * (-radius * math.sin(t)) + gy * (radius * math.cos(t))) * h)
    mass = fsum(vals)  # integral of |omega| over the arc, coordinate (theta) measure
    measure = 2 * delta if convention == "coordinate" else 2 * delta * radius
    return mass / measure


def density_at(form, region, x, convention="intrinsic", eps_schedule=None,
               resolution=32, limit_tolerance=DEFAULT_LIMIT_TOLERANCE, full=False):
    """Ball-average density rho(x) = lim ball-average(|alpha|) / Z.

    Evaluates the quotient along a decreasing eps schedule and certifies the
    limit by the Cauchy residual of the last two values.
    """
    _check_convention(convention)
    x = tuple(map(float, x))
    if isinstance(region, Curve):
        z = integrate_curve(form, region, resolution=max(resolution * 8, 256),
                            absolute=True)
        averager = lambda eps: _curve_point_average(form, region, x, eps,
                                                    convention, resolution)
    else:
        z = integrate_region(form, region, absolute=True,
                             resolution=max(resolution, 16))

        def averager(eps):
            mass = ball_mass(form, x, eps, resolution=resolution)
            if convention == "coordinate":
                vol = UNIT_BALL_VOLUME[form.dimension] * eps ** form.dimension
            else:
                vol = ball_intrinsic_volume(form, x, eps, resolution=resolution)
            return mass / vol

    if z <= 0:
        raise NormalizationError("total |alpha| mass is zero; density undefined")
    if eps_schedule is None:
        eps_schedule = _default_schedule(form, x, region)
    if len(eps_schedule) < 2 or any(b >= a for a, b in zip(eps_schedule, eps_schedule[1:])):
        raise InvalidGeometryError("eps schedule must be strictly decreasing, length >= 2")

    history = []
    for eps in eps_schedule:
        try:
            avg = averager(eps)
        except (ZeroDivisionError, ValueError, OverflowError) as exc:
            raise SingularPointError(f"form is singular near {x}: {exc}") from exc
        if not math.isfinite(avg):
            raise SingularPointError(f"form is singular near {x}")
        history.append(avg / z)
    residual = abs(history[-1] - history[-2]) / max(1.0, abs(history[-1]))
    if residual > limit_tolerance:
        raise NoLimitError(
            f"eps schedule did not converge (residual {residual:.3e})", residual=residual)
    value = history[-1]
    if full:
        return value, residual, history
    return value


# ---------------------------- entropy functional ----------------------------


def build_density_field(form, region, convention="intrinsic", resolution=128):
    """Sampled density over a region, curve, chain, or cell subset.

    ``form`` may be an AnalyticForm (with a RegionDescriptor or Curve carrier)
    or a Cochain (with a Chain or cell-subset carrier).
    """
    _check_convention(convention)
    if isinstance(form, Cochain):
        return _cochain_density_field(form, region, convention)
    if isinstance(region, Curve):
        return _curve_density_field(form, region, convention, resolution)
    return _region_density_field(form, region, convention, resolution)


def _region_density_field(form, region, convention, resolution):
    z = integrate_region(form, region, absolute=True, resolution=resolution)
    if z <= 0:
        raise NormalizationError("total |alpha| mass is zero")
    polar = form.chart == "polar"
    if region.kind == "cells":
        boxes = [region.complex.cell_bounds(c)
                 for c in sorted(region.cells, key=lambda c: c.index)]
    else:
        boxes = _region_subboxes(form, region)
    samples = []
    for lo, hi in boxes:
        axes = []
        coord_w = 1.0
        for a, b in zip(lo, hi):
            pts, h = _mid(a, b, resolution)
            axes.append(pts)
            coord_w *= h
        for p in itertools.product(*axes):
            g = abs(form.coefficient_at(p, 0))
            if polar:
                local = g / p[0] if convention == "intrinsic" else g
                weight = coord_w * p[0]
            else:
                local = g
                weight = coord_w
            conv_w = coord_w if convention == "coordinate" or not polar else weight
            samples.append(DensitySample(location=p, rho=local / z,
                                         weight=weight, conv_weight=conv_w))
    return DensityField(region=region, convention=convention, normalizer=z,
                        samples=samples)


def _curve_density_field(form, region, convention, resolution):
    """Polygonal discretization of a curve carrier: one sample per chord."""
    segs = curve_segments(form, region, resolution, method="polygon")
    z = fsum(abs(v) for v, _, _ in segs)
    if z <= 0:
        raise NormalizationError("total |omega| mass is zero")
    samples = []
    for value, dparam, chord in segs:
        coord_w = abs(dparam)
        local = abs(value) / coord_w if convention == "coordinate" else abs(value) / chord
        conv_w = coord_w if convention == "coordinate" else chord
        samples.append(DensitySample(location=None, rho=local / z,
                                     weight=chord, conv_weight=conv_w))
    return DensityField(region=region, convention=convention, normalizer=z,
                        samples=samples)


def _cochain_density_field(cochain, region, convention):
    complex_ = cochain.complex
    if isinstance(region, Chain):
        cells = sorted(region.support, key=lambda c: (c.extents, c.index))
    elif isinstance(region, RegionDescriptor) and region.kind == "cells":
        cells = sorted(region.cells, key=lambda c: (c.extents, c.index))
    else:
        raise InvalidGeometryError("cochain entropy needs a chain or cell-subset carrier")
    values = [abs(float(cochain.values[complex_.cell_id(c)])) for c in cells]
    vols = [complex_.cell_volume(c) for c in cells]
    z = fsum(v for v in values)
    if z <= 0:
        raise NormalizationError("total cochain mass is zero")
    samples = []
    for cell, v, vol in zip(cells, values, vols):
        samples.append(DensitySample(location=cell, rho=(v / vol) / z,
                                     weight=vol, conv_weight=vol))
    return DensityField(region=region, convention=convention, normalizer=z,
                        samples=samples)


def entropy_direct(form, region, convention="intrinsic", resolution=128):
    """S = -sum rho log rho * intrinsic measure over the discretized carrier."""
    field = build_density_field(form, region, convention=convention,
                                resolution=resolution)
    return EntropyReport(
        S=field.entropy(),
        Z=field.normalizer,
        convention=convention,
        resolution=resolution,
        method="direct",
        sum_rho_measure=field.sum_rho_measure(),
    )


def entropy_geometric_mean(values, measures):
    """log of the weighted geometric mean of Z/|c_i| with weights |c_i|v_i/Z.

    Cells with c_i = 0 carry weight 0 and contribute factor 1.
    """
    if len(values) != len(measures):
        raise InvalidGeometryError("values and measures must have equal length")
    if any(v <= 0 for v in measures):
        raise InvalidGeometryError("measures must be positive")
    z = fsum(abs(c) * v for c, v in zip(values, measures))
    if z <= 0:
        raise NormalizationError("all cell values vanish")
    return fsum((abs(c) * v / z) * math.log(z / abs(c))
                for c, v in zip(values, measures) if c != 0)


def generalized_mean(form, region, convention="intrinsic", p=1.0, resolution=128):
    """Order-p mean (int |f|^p rho dmeasure)^(1/p); p = 1 is the plain mean."""
    if p < 1:
        raise InvalidGeometryError("generalized mean is defined for p >= 1")
    if isinstance(form, Cochain):
        raise InvalidGeometryError("generalized mean expects an analytic form")
    field = build_density_field(form, region, convention=convention,
                                resolution=resolution)
    # |f| at a sample equals rho * Z under the matching convention.
    total = fsum(((s.rho * field.normalizer) ** p) * s.rho * s.conv_weight
                 for s in field.samples)
    return total ** (1.0 / p)
