"""Ready-made forms and regions for the two worked examples."""

from __future__ import annotations

from . import expressions as ex
from .complexes import annulus_region, box_region
from .forms import AnalyticForm, Piece, annulus_boundary_curve, circle_curve


def rectangle_regions(params):
    """(X, Y) boxes for the rectangle example."""
    a, b = params.a, params.b
    return (box_region((-2 * a, -b), (2 * a, b)),
            box_region((-a, -b), (a, b)))


def rectangle_form(params):
    """The step 2-form f dx^dy: c on Y, c/r on the right strip, -c/r on the left."""
    a, b, c, r = params.a, params.b, params.c, params.r
    x_box, y_box = rectangle_regions(params)
    pieces = [
        Piece(region=y_box, coefficients=(ex.Const(c),)),
        Piece(region=box_region((a, -b), (2 * a, b)), coefficients=(ex.Const(c / r),)),
        Piece(region=box_region((-2 * a, -b), (-a, b)), coefficients=(ex.Const(-c / r),)),
    ]
    return AnalyticForm(degree=2, chart="cartesian", coefficients=(ex.Const(0.0),),
                        domain=x_box, pieces=pieces)


def annulus_form(params):
    """omega = r dtheta on the annulus, in the polar chart (basis order dr, dtheta)."""
    domain = annulus_region(params.r_inner, params.r_outer)
    return AnalyticForm(degree=1, chart="polar",
                        coefficients=("0", "r"), domain=domain)


def annulus_boundary(params):
    return annulus_boundary_curve(params.r_inner, params.r_outer)


def annulus_candidate_circle(params):
    return circle_curve(params.r_circle)
