"""Stokes residuals, candidate enumeration, and extremality verification.

The discrete candidate space is the set of boundaries of nonempty n-cell
subsets, so every candidate has a well-defined interior; continuous
candidates (circles in the annulus) are handled parametrically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from math import fsum

import numpy as np

from .complexes import Chain, GridComplex, RegionDescriptor, cells_region
from .entropy import entropy_direct, entropy_geometric_mean
from .errors import (
    DegreeError,
    InvalidGeometryError,
    NormalizationError,
    TooLargeError,
)
from .forms import (
    AnalyticForm,
    Cochain,
    Curve,
    coboundary,
    exterior_derivative,
    integrate_curve,
    integrate_region,
    pairing,
)

ENUMERATION_CAP = 24
DISCRETE_TOLERANCE = 1e-9
QUADRATURE_TOLERANCE = 1e-6
TIE_TOLERANCE = 1e-9


@dataclass
class Candidate:
    bitmask: int
    interior_size: int
    residual: float
    entropy: float = None
    cells: list = None

    def to_payload(self):
        return {
            "bitmask": self.bitmask,
            "interior_size": self.interior_size,
            "residual": self.residual,
            "entropy": self.entropy,
        }


@dataclass
class CandidateReport:
    target: float
    tolerance: float
    candidates: list
    boundary_entropy: float = None
    argmax: object = None
    verdict: str = None

    def to_payload(self):
        return {
            "schema": "candidate_report",
            "version": 1,
            "target": self.target,
            "tolerance": self.tolerance,
            "boundary_entropy": self.boundary_entropy,
            "argmax": self.argmax,
            "verdict": self.verdict,
            "candidates": [c.to_payload() for c in self.candidates],
        }

    def to_csv_rows(self):
        header = ["bitmask", "residual", "entropy"]
        rows = [[c.bitmask, c.residual, c.entropy] for c in self.candidates]
        return header, rows


def stokes_residual(omega, candidate, manifold, resolution=1024,
                    curve_method="param"):
    """|int_B omega - int_M d omega|, discrete (exact) or by quadrature."""
    if isinstance(omega, Cochain):
        if not isinstance(candidate, Chain):
            raise DegreeError("discrete residual needs a chain candidate")
        if candidate.degree != omega.degree:
            raise DegreeError("candidate and cochain degrees must match")
        if isinstance(manifold, GridComplex):
            manifold = manifold.full_chain()
        d_omega = coboundary(omega)
        return abs(pairing(omega, candidate) - pairing(d_omega, manifold))
    if not isinstance(candidate, Curve):
        raise DegreeError("analytic residual needs a curve candidate")
    lhs = integrate_curve(omega, candidate, resolution=resolution, method=curve_method)
    rhs = integrate_region(exterior_derivative(omega), manifold,
                           resolution=min(resolution, 256))
    return abs(lhs - rhs)


def _as_face_values(omega):
    """Interpret the input as d(omega) on n-cells: apply the coboundary when an
    (n-1)-cochain is given, pass n-cochains through."""
    n = omega.complex.dimension
    if omega.degree == n:
        return omega
    if omega.degree == n - 1:
        return coboundary(omega)
    raise DegreeError(f"expected a cochain of degree {n} or {n - 1}, got {omega.degree}")


def _subset_sums(values):
    """Signed subset sums indexed by bitmask (doubling construction)."""
    sums = np.zeros(1, dtype=float)
    for v in values:
        sums = np.concatenate([sums, sums + float(v)])
    return sums


def enumerate_candidates(omega, complex_, tol=DISCRETE_TOLERANCE, cap=ENUMERATION_CAP,
                         sample=None, seed=0):
    """All nonempty n-cell subsets whose d(omega) mass matches the full total.

    Subsets are scanned in ascending bitmask order over the canonical n-cell
    ordering; the full set (the discrete boundary of M) is always a candidate
    with residual exactly zero.  Above the cap, pass ``sample`` for a seeded
    random subset scan.
    """
    d_omega = _as_face_values(omega)
    n = complex_.dimension
    m = complex_.cell_count(n)
    values = [float(v) for v in d_omega.values]
    target = fsum(values)
    band = tol * (1 + abs(target))

    if m > cap:
        if sample is None:
            raise TooLargeError(
                f"{m} n-cells exceed the enumeration cap {cap}; "
                "pass sample=N for the random-sampling mode")
        rng = np.random.RandomState(seed)
        masks = sorted(set(int(rng.randint(1, 2 ** m, dtype=np.int64))
                           for _ in range(sample)) | {2 ** m - 1})
    else:
        sums = _subset_sums(values)
        masks = [int(k) for k in np.nonzero(np.abs(sums - target) <= band)[0] if k != 0]

    candidates = []
    for mask in masks:
        subset_sum = fsum(values[i] for i in range(m) if mask >> i & 1)
        residual = abs(subset_sum - target)
        if residual > band:
            continue
        candidates.append(Candidate(
            bitmask=mask,
            interior_size=bin(mask).count("1"),
            residual=residual,
            cells=[i for i in range(m) if mask >> i & 1],
        ))
    return CandidateReport(target=target, tolerance=tol, candidates=candidates)


def verify_extremality(omega, complex_, tol=DISCRETE_TOLERANCE, cap=ENUMERATION_CAP,
                       sample=None, seed=0, tie_tolerance=TIE_TOLERANCE):
    """Brute-force check that the full boundary maximizes candidate entropy.

    Each candidate's entropy is the weighted-geometric-mean entropy of |d omega|
    over its interior cells.  Ties against the boundary are degenerate exactly
    when d(omega) vanishes on the complementary cells.
    """
    d_omega = _as_face_values(omega)
    n = complex_.dimension
    cells = complex_.cells(n)
    values = [float(v) for v in d_omega.values]
    vols = [complex_.cell_volume(c) for c in cells]
    if all(v == 0 for v in values):
        raise NormalizationError("d(omega) vanishes identically")

    report = enumerate_candidates(omega, complex_, tol=tol, cap=cap,
                                  sample=sample, seed=seed)
    full_mask = 2 ** len(cells) - 1

    def subset_entropy(mask):
        cs = [values[i] / vols[i] for i in range(len(cells)) if mask >> i & 1]
        vs = [vols[i] for i in range(len(cells)) if mask >> i & 1]
        if all(c == 0 for c in cs):
            return None  # zero-mass candidate: density undefined
        return entropy_geometric_mean(cs, vs)

    boundary_entropy = subset_entropy(full_mask)
    verdict = "extremal"
    argmax = "boundary"
    best = boundary_entropy
    for cand in report.candidates:
        cand.entropy = subset_entropy(cand.bitmask)
        if cand.bitmask == full_mask or cand.entropy is None:
            continue
        if cand.entropy > boundary_entropy + tie_tolerance:
            verdict = "violated"
            if cand.entropy > best:
                best = cand.entropy
                argmax = cand.bitmask
        elif cand.entropy >= boundary_entropy - tie_tolerance:
            complement_zero = all(
                values[i] == 0 for i in range(len(cells))
                if not (cand.bitmask >> i & 1))
            if complement_zero:
                if verdict != "violated":
                    verdict = "tie-degenerate"
            else:
                verdict = "violated"
    report.boundary_entropy = boundary_entropy
    report.argmax = argmax
    report.verdict = verdict
    return report


@dataclass
class ConvergenceRow:
    resolution: int
    value: float
    abs_error: float = None
    observed_order: float = None


@dataclass
class ConvergenceTable:
    quantity: str
    reference: float
    rows: list

    def to_payload(self):
        return {
            "schema": "convergence_table",
            "version": 1,
            "quantity": self.quantity,
            "reference": self.reference,
            "rows": [{
                "resolution": r.resolution,
                "value": r.value,
                "abs_error": r.abs_error,
                "observed_order": r.observed_order,
            } for r in self.rows],
        }

    def to_csv_rows(self):
        header = ["resolution", "value", "abs_error", "observed_order"]
        rows = [[r.resolution, r.value, r.abs_error, r.observed_order]
                for r in self.rows]
        return header, rows


def convergence_study(quantity, problem, schedule):
    """Tabulate a quantity against a closed-form reference over mesh resolutions.

    ``problem`` is a config mapping; see the CLI docs for the supported keys.
    Observed order is the slope of successive errors against resolution.
    """
    schedule = [int(s) for s in schedule]
    if len(schedule) < 3 or any(b <= a for a, b in zip(schedule, schedule[1:])):
        raise InvalidGeometryError("schedule must be >= 3 strictly increasing entries")
    evaluate, reference = _study_problem(quantity, problem)

    rows = []
    prev = None
    for res in schedule:
        value = evaluate(res)
        err = abs(value - reference) if reference is not None else None
        order = None
        if prev is not None and err is not None and prev[1] and err:
            order = math.log(prev[1] / err) / math.log(res / prev[0])
        rows.append(ConvergenceRow(resolution=res, value=value,
                                   abs_error=err, observed_order=order))
        prev = (res, err)
    return ConvergenceTable(quantity=quantity, reference=reference, rows=rows)


def _study_problem(quantity, problem):
    from .complexes import annulus_region, box_region
    from .oracles import AnnulusParams, annulus_oracle
    from . import presets

    example = problem.get("example", "annulus")
    if example == "uniform":
        lo = tuple(problem.get("lo", (0.0, 0.0)))
        hi = tuple(problem.get("hi", (2.0, 2.0)))
        region = box_region(lo, hi)
        form = AnalyticForm.constant(problem.get("value", 1.0), region)
        reference = math.log(region.volume())
        if quantity != "entropy":
            raise InvalidGeometryError("uniform problems study entropy only")
        return (lambda res: entropy_direct(form, region, convention="intrinsic",
                                           resolution=res).S,
                reference)

    params = AnnulusParams(problem.get("r_inner", 1.0), problem.get("r_outer", 2.0))
    oracle = annulus_oracle(params)
    form = presets.annulus_form(params)
    if quantity == "entropy":
        carrier_kind = problem.get("carrier", "boundary")
        if carrier_kind == "circle":
            carrier = presets.annulus_candidate_circle(params)
            reference = oracle["S_circle"]
        else:
            carrier = presets.annulus_boundary(params)
            reference = oracle["S_boundary"]
        return (lambda res: entropy_direct(form, carrier, convention="coordinate",
                                           resolution=res).S,
                reference)
    if quantity == "residual":
        region = annulus_region(params.r_inner, params.r_outer)
        circle = presets.annulus_candidate_circle(params)
        # the study certifies quadrature convergence, so it exercises the
        # polygonal curve discretization (the parametric rule is exact here)
        return (lambda res: stokes_residual(form, circle, region, resolution=res,
                                            curve_method="polygon"),
                0.0)
    if quantity == "density":
        from .entropy import build_density_field
        carrier = presets.annulus_boundary(params)
        # arclength density on the outer circle; the coordinate density is
        # exact at every resolution by symmetry, so it cannot be studied
        reference = oracle["rho_outer"] / params.r_outer

        def density_outer(res):
            field = build_density_field(form, carrier, convention="intrinsic",
                                        resolution=res)
            return field.samples[0].rho  # first segment lies on the outer circle

        return density_outer, reference
    raise InvalidGeometryError(f"unknown study quantity {quantity!r}")
