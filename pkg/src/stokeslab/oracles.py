"""Closed-form references for the two worked examples.

The rectangle oracle covers the step function on X = [-2a,2a] x [-b,b] with
inner block Y = [-a,a] x [-b,b]; the annulus oracle covers omega = r dtheta
on the annulus (r_i, r_o).  Both evaluate the printed formulas verbatim,
including the annulus's mixed density/arclength convention.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InvalidGeometryError


@dataclass(frozen=True)
class RectangleParams:
    a: float
    b: float
    c: float
    r: float

    def __post_init__(self):
        if min(self.a, self.b, self.c, self.r) <= 0:
            raise InvalidGeometryError("rectangle parameters must be positive")


@dataclass(frozen=True)
class AnnulusParams:
    r_inner: float
    r_outer: float

    def __post_init__(self):
        if not (0 < self.r_inner < self.r_outer):
            raise InvalidGeometryError("annulus needs 0 < r_inner < r_outer")

    @property
    def r_circle(self):
        return self.r_outer - self.r_inner


def rectangle_oracle(params, p_order=None):
    """Closed-form masses, entropies, and means for the rectangle example."""
    a, b, c, r = params.a, params.b, params.c, params.r
    area_y = 4 * a * b
    z_y = area_y * c
    z_x = area_y * c * (1 + 1 / r)
    s_y = math.log(area_y)
    w_in = 1 / (1 + 1 / r)      # mass fraction of the inner block
    w_out = 1 / (1 + r)         # mass fraction of the two outer strips
    s_x = w_in * math.log(area_y + area_y / r) + w_out * math.log(area_y + area_y * r)
    delta_s = w_in * math.log(1 + 1 / r) + w_out * math.log(1 + r)
    mean_y = c
    mean_x = w_in * c + w_out * (c / r)
    out = {
        "Z_Y": z_y,
        "Z_X": z_x,
        "S_Y": s_y,
        "S_X": s_x,
        "delta_S": delta_s,
        "mean_Y": mean_y,
        "mean_X": mean_x,
    }
    if p_order is not None:
        p = float(p_order)
        if p < 1:
            raise InvalidGeometryError("mean order must satisfy p >= 1")
        out["p"] = p
        out["mean_p_Y"] = c
        out["mean_p_X"] = (w_in * c ** p + w_out * (c / r) ** p) ** (1 / p)
    return out


def annulus_oracle(params):
    """Closed-form flux, candidate radius, and entropies for the annulus example."""
    ri, ro = params.r_inner, params.r_outer
    rb = params.r_circle
    two_pi = 2 * math.pi
    flux = two_pi * rb
    s_boundary = (ri ** 2 / (ro + ri)) * math.log(two_pi * ro / ri + two_pi) \
        + (ro ** 2 / (ro + ri)) * math.log(two_pi * ri / ro + two_pi)
    s_circle = rb * math.log(two_pi)
    # the printed difference expression, kept separate for cross-checking
    delta_formula = (ri ** 2 / (ro + ri)) * math.log(two_pi ** 2 * ro / ri + two_pi ** 2) \
        + (ro ** 2 / (ro + ri)) * math.log(ri / ro + 1)
    return {
        "flux": flux,
        "r_B": rb,
        "S_boundary": s_boundary,
        "S_circle": s_circle,
        "delta_S": s_boundary - s_circle,
        "delta_S_formula": delta_formula,
        "rho_outer": ro / (two_pi * (ro + ri)),
        "rho_inner": ri / (two_pi * (ro + ri)),
    }
