import math

import numpy as np
import pytest

from stokeslab import (
    Cochain,
    annulus_region,
    boundary,
    box_region,
    build_grid_complex,
    circle_curve,
    convergence_study,
    enumerate_candidates,
    stokes_residual,
    verify_extremality,
)
from stokeslab import presets
from stokeslab.errors import (
    InvalidGeometryError,
    NormalizationError,
    TooLargeError,
)
from stokeslab.oracles import AnnulusParams


def unit_grid(*shape):
    lo = tuple(0.0 for _ in shape)
    hi = tuple(float(s) for s in shape)
    return build_grid_complex(box_region(lo, hi), shape)


def face_cochain(cx, values):
    return Cochain(cx, cx.dimension, np.array(values, dtype=np.int64))


def interiors(report):
    """Candidate interiors as sorted tuples of canonical cell indices."""
    return sorted(tuple(c.cells) for c in report.candidates)


class TestStokesResidual:
    def test_discrete_boundary_is_exact(self):
        rng = np.random.RandomState(2)
        cx = unit_grid(3, 3)
        for _ in range(20):
            w = Cochain(cx, 1, rng.randint(-9, 10, cx.cell_count(1)).astype(np.int64))
            assert stokes_residual(w, boundary(cx.full_chain()), cx) == 0

    def test_annulus_candidate_circle(self):
        p = AnnulusParams(1.0, 2.0)
        w = presets.annulus_form(p)
        region = annulus_region(1.0, 2.0)
        res = stokes_residual(w, circle_curve(1.0), region, resolution=4096)
        assert res <= 1e-9

    def test_annulus_off_circle(self):
        p = AnnulusParams(1.0, 2.0)
        w = presets.annulus_form(p)
        region = annulus_region(1.0, 2.0)
        res = stokes_residual(w, circle_curve(1.5), region, resolution=4096)
        assert res == pytest.approx(math.pi, abs=1e-6)


class TestEnumerateCandidates:
    def test_2x2_example(self):
        cx = unit_grid(2, 2)
        report = enumerate_candidates(face_cochain(cx, [1, -1, 2, 0]), cx)
        assert interiors(report) == [(0, 1, 2), (0, 1, 2, 3), (2,), (2, 3)]
        assert report.target == 2.0
        full = next(c for c in report.candidates if c.bitmask == 15)
        assert full.residual == 0.0

    def test_constant_positive_has_single_candidate(self):
        cx = unit_grid(3, 3)
        report = enumerate_candidates(face_cochain(cx, [2] * 9), cx)
        assert len(report.candidates) == 1
        assert report.candidates[0].bitmask == 2 ** 9 - 1

    def test_1d_path_vertex_cochain(self):
        cx = unit_grid(3)
        f = Cochain(cx, 0, np.array([0, 4, 2, 4], dtype=np.int64))
        report = enumerate_candidates(f, cx)
        # edge increments (4, -2, 2), target 4: the first edge alone and the
        # whole path, i.e. vertex pairs {0,1} and {0,3}
        assert interiors(report) == [(0,), (0, 1, 2)]

    def test_candidates_sorted_by_bitmask(self):
        cx = unit_grid(2, 2)
        report = enumerate_candidates(face_cochain(cx, [1, -1, 2, 0]), cx)
        masks = [c.bitmask for c in report.candidates]
        assert masks == sorted(masks)

    def test_cap_exceeded(self):
        cx = unit_grid(5, 5)
        with pytest.raises(TooLargeError):
            enumerate_candidates(face_cochain(cx, [1] * 25), cx)

    def test_sampling_mode_above_cap(self):
        cx = unit_grid(5, 5)
        report = enumerate_candidates(face_cochain(cx, [1] * 25), cx,
                                      sample=500, seed=3)
        masks = [c.bitmask for c in report.candidates]
        assert 2 ** 25 - 1 in masks  # the boundary is always scanned
        assert all(c.residual <= report.tolerance * (1 + abs(report.target))
                   for c in report.candidates)


class TestVerifyExtremality:
    def test_mixed_sign_with_zero_cell(self):
        # dw = (1, -1, 2, 0): {1,2,3} ties with the full set through the zero
        # cell, so the verdict is the degenerate-tie classification
        cx = unit_grid(2, 2)
        report = verify_extremality(face_cochain(cx, [1, -1, 2, 0]), cx)
        assert report.argmax == "boundary"
        assert report.verdict == "tie-degenerate"
        by_mask = {c.bitmask: c for c in report.candidates}
        assert set(by_mask) == {4, 7, 12, 15}
        assert by_mask[7].entropy == pytest.approx(report.boundary_entropy,
                                                   abs=1e-12)
        assert by_mask[12].entropy < report.boundary_entropy

    def test_constant_positive_is_extremal(self):
        cx = unit_grid(2, 2)
        report = verify_extremality(face_cochain(cx, [3, 3, 3, 3]), cx)
        assert report.verdict == "extremal"
        assert len(report.candidates) == 1

    def test_zero_cell_tie_is_degenerate(self):
        cx = unit_grid(2, 2)
        report = verify_extremality(face_cochain(cx, [1, 1, 1, 0]), cx)
        assert report.verdict == "tie-degenerate"
        masks = {c.bitmask for c in report.candidates}
        assert masks == {7, 15}

    def test_all_zero_rejected(self):
        cx = unit_grid(2, 2)
        with pytest.raises(NormalizationError):
            verify_extremality(face_cochain(cx, [0, 0, 0, 0]), cx)

    @pytest.mark.parametrize("lam", [0.5, 3.0, -2.0])
    def test_scaling_invariance(self, lam):
        cx = unit_grid(3, 3)
        values = [1, -1, 2, 0, 3, -2, 1, 1, 2]
        base = verify_extremality(face_cochain(cx, values), cx)
        scaled_values = np.array(values, dtype=float) * lam
        scaled = verify_extremality(Cochain(cx, 2, scaled_values), cx)
        assert [c.bitmask for c in scaled.candidates] == \
            [c.bitmask for c in base.candidates]
        assert scaled.verdict == base.verdict
        for a, b in zip(base.candidates, scaled.candidates):
            if a.entropy is None:
                assert b.entropy is None
            else:
                assert b.entropy == pytest.approx(a.entropy, abs=1e-12)

    def test_determinism(self):
        cx = unit_grid(3, 3)
        values = [1, -1, 2, 0, 3, -2, 1, 1, 2]
        a = verify_extremality(face_cochain(cx, values), cx).to_payload()
        b = verify_extremality(face_cochain(cx, values), cx).to_payload()
        assert a == b

    def test_report_payload_and_csv(self):
        cx = unit_grid(2, 2)
        report = verify_extremality(face_cochain(cx, [1, -1, 2, 0]), cx)
        payload = report.to_payload()
        assert payload["schema"] == "candidate_report"
        header, rows = report.to_csv_rows()
        assert header == ["bitmask", "residual", "entropy"]
        assert len(rows) == len(report.candidates)


class TestConvergenceStudy:
    def test_uniform_entropy_is_exact(self):
        table = convergence_study("entropy", {"example": "uniform"},
                                  [8, 16, 32])
        for row in table.rows:
            assert row.abs_error <= 1e-12

    def test_annulus_boundary_entropy_order(self):
        table = convergence_study(
            "entropy",
            {"example": "annulus", "r_inner": 1.0, "r_outer": 2.0,
             "carrier": "boundary"},
            [64, 128, 256])
        errors = [row.abs_error for row in table.rows]
        assert all(b < a for a, b in zip(errors, errors[1:]))
        for row in table.rows[1:]:
            assert row.observed_order >= 1.0

    def test_circle_residual_decreases(self):
        table = convergence_study(
            "residual",
            {"example": "annulus", "r_inner": 1.0, "r_outer": 2.0},
            [256, 1024, 4096])
        values = [row.value for row in table.rows]
        assert all(b < a for a, b in zip(values, values[1:]))

    def test_density_study_converges(self):
        table = convergence_study(
            "density",
            {"example": "annulus", "r_inner": 1.0, "r_outer": 2.0},
            [32, 64, 128])
        errors = [row.abs_error for row in table.rows]
        assert all(b < a for a, b in zip(errors, errors[1:]))

    def test_bad_schedule_rejected(self):
        with pytest.raises(InvalidGeometryError):
            convergence_study("entropy", {"example": "uniform"}, [8, 8, 16])
        with pytest.raises(InvalidGeometryError):
            convergence_study("entropy", {"example": "uniform"}, [8, 16])
