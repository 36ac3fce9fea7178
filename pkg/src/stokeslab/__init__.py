"""Entropy of differential forms over regions and Stokes-candidate subsets."""

from .complexes import (
    Cell,
    Chain,
    GridComplex,
    RegionDescriptor,
    annulus_region,
    boundary,
    box_region,
    build_grid_complex,
    cells_region,
    chain_from_json,
    chain_to_json,
    connected_components,
    interior_region,
)
from .duality import (
    CandidateReport,
    ConvergenceTable,
    convergence_study,
    enumerate_candidates,
    stokes_residual,
    verify_extremality,
)
from .entropy import (
    DensityField,
    EntropyReport,
    alpha_ball_radius,
    ball_mass,
    build_density_field,
    density_at,
    entropy_direct,
    entropy_geometric_mean,
    generalized_mean,
)
from .expressions import Expression, differentiate, parse_expression
from .forms import (
    AnalyticForm,
    Cochain,
    Curve,
    Piece,
    annulus_boundary_curve,
    box_perimeter_curve,
    circle_curve,
    coboundary,
    discretize,
    exterior_derivative,
    integrate_curve,
    integrate_region,
    pairing,
)
from .oracles import AnnulusParams, RectangleParams, annulus_oracle, rectangle_oracle
from .reports import emit_report

__version__ = "0.1.0"

__all__ = [
    "AnalyticForm", "AnnulusParams", "CandidateReport", "Cell", "Chain",
    "Cochain", "ConvergenceTable", "Curve", "DensityField", "EntropyReport",
    "Expression", "GridComplex", "Piece", "RectangleParams", "RegionDescriptor",
    "alpha_ball_radius", "annulus_boundary_curve", "annulus_oracle",
    "annulus_region", "ball_mass", "boundary", "box_perimeter_curve",
    "box_region", "build_density_field", "build_grid_complex", "cells_region",
    "chain_from_json", "chain_to_json", "circle_curve", "coboundary",
    "connected_components", "convergence_study", "density_at", "differentiate",
    "discretize", "emit_report", "entropy_direct", "entropy_geometric_mean",
    "enumerate_candidates", "exterior_derivative", "generalized_mean",
    "integrate_curve", "integrate_region", "interior_region", "pairing",
    "parse_expression", "rectangle_oracle", "stokes_residual",
    "verify_extremality",
]
