"""Axiom-check tests; expected values come from brute-force oracles over the grid."""

import math

import numpy as np
import pytest

from copula_lab.core import (
    Copula2D,
    GridSpec,
    Rectangle,
    UnitPoint,
    check_boundary,
    check_componentwise_monotone,
    check_lipschitz,
    check_partial_difference_monotone,
    check_two_increasing,
    h_volume,
    sklar_join,
    verify_copula,
)
from copula_lab.errors import DomainError, InputError
from copula_lab.families import (
    counterexample_max,
    counterexample_product_factor,
    fgm,
    independence,
    min_copula,
    w_copula,
)

PI = independence()
M = min_copula()
W = w_copula()
F = counterexample_product_factor()
G = counterexample_max()


# ---------------------------------------------------------------- oracles


def brute_two_increasing(c, grid):
    """Most negative rectangle volume over all grid rectangles, by direct loops."""
    pts = grid.points()
    worst = math.inf
    for i1 in range(len(pts) - 1):
        for i2 in range(i1 + 1, len(pts)):
            for j1 in range(len(pts) - 1):
                for j2 in range(j1 + 1, len(pts)):
                    vol = (c(pts[i2], pts[j2]) - c(pts[i1], pts[j2])) - (
                        c(pts[i2], pts[j1]) - c(pts[i1], pts[j1])
                    )
                    worst = min(worst, vol)
    return worst


def brute_boundary(c, grid):
    """Max boundary-identity violation over every grid point."""
    worst = 0.0
    for t in grid.points():
        worst = max(worst, abs(c(0.0, t)), abs(c(t, 0.0)), abs(c(1.0, t) - t), abs(c(t, 1.0) - t))
    return worst


def brute_lipschitz(c, grid):
    """Max of |dC| - (|dx| + |dy|) over all grid point pairs."""
    pts = grid.points()
    nodes = [(x, y) for x in pts for y in pts]
    worst = -math.inf
    for a in range(len(nodes)):
        for b in range(a + 1, len(nodes)):
            (x1, y1), (x2, y2) = nodes[a], nodes[b]
            worst = max(worst, abs(c(x2, y2) - c(x1, y1)) - abs(x2 - x1) - abs(y2 - y1))
    return worst


def brute_partial_difference(c, grid):
    """Max consecutive decrease of both families of partial differences."""
    pts = grid.points()
    n = len(pts)
    worst = -math.inf
    for j1 in range(n - 1):
        for j2 in range(j1 + 1, n):
            for k in range(n - 1):
                before = c(pts[k], pts[j2]) - c(pts[k], pts[j1])
                after = c(pts[k + 1], pts[j2]) - c(pts[k + 1], pts[j1])
                worst = max(worst, before - after)
    for i1 in range(n - 1):
        for i2 in range(i1 + 1, n):
            for k in range(n - 1):
                before = c(pts[i2], pts[k]) - c(pts[i1], pts[k])
                after = c(pts[i2], pts[k + 1]) - c(pts[i1], pts[k + 1])
                worst = max(worst, before - after)
    return worst


# ---------------------------------------------------------------- types


class TestTypes:
    def test_unit_point_snaps_float_noise(self):
        p = UnitPoint(-1e-13, 1.0 + 1e-13)
        assert p.u == 0.0 and p.v == 1.0

    def test_unit_point_rejects_outside(self):
        with pytest.raises(DomainError):
            UnitPoint(-0.001, 0.5)
        with pytest.raises(DomainError):
            UnitPoint(0.5, 1.01)

    def test_rectangle_requires_ordered_corners(self):
        with pytest.raises(InputError):
            Rectangle(0.6, 0.4, 0.0, 1.0)
        assert Rectangle(0.3, 0.3, 0.1, 0.9).is_degenerate

    def test_grid_points_are_exact_fractions(self):
        pts = GridSpec(3).points()
        assert pts.tolist() == [0.0, 0.5, 1.0]
        pts = GridSpec(11).points()
        assert pts.tolist() == [k / 10 for k in range(11)]

    def test_grid_rejects_small_n(self):
        with pytest.raises(InputError):
            GridSpec(1)

    def test_copula_eval_snaps_and_is_float(self):
        assert PI(1.0 + 1e-14, 0.5) == 0.5
        assert isinstance(M(0.3, 0.8), float)

    def test_report_json_shape(self):
        report = check_boundary(G, GridSpec(3), 1e-12)
        data = report.to_json_dict()
        assert set(data) == {"check_name", "passed", "violation", "tolerance", "witness"}
        assert data["witness"] == {"u": 0.0, "v": 1.0}


# ---------------------------------------------------------------- h_volume


class TestHVolume:
    def test_independence_unit_square(self):
        assert h_volume(PI, Rectangle(0, 1, 0, 1)) == 1.0

    def test_max_counterexample_unit_square_is_minus_one(self):
        assert h_volume(G, Rectangle(0, 1, 0, 1)) == -1.0

    def test_product_factor_matches_closed_form(self):
        # volume of f over [u1,u2]x[v1,v2] expands to 4(u2-u1)(v2-v1)
        assert h_volume(F, Rectangle(0, 0.5, 0, 0.5)) == 1.0
        for rect in [Rectangle(0.1, 0.7, 0.2, 0.9), Rectangle(0.25, 0.5, 0.5, 1.0)]:
            brute = (F(rect.u2, rect.v2) - F(rect.u1, rect.v2)) - (
                F(rect.u2, rect.v1) - F(rect.u1, rect.v1)
            )
            assert h_volume(F, rect) == brute
            closed = 4 * (rect.u2 - rect.u1) * (rect.v2 - rect.v1)
            assert h_volume(F, rect) == pytest.approx(closed, abs=1e-15)

    def test_degenerate_rectangle_is_exact_zero(self):
        assert h_volume(PI, Rectangle(0.3, 0.3, 0.1, 0.9)) == 0.0
        assert h_volume(M, Rectangle(0.2, 0.7, 0.4, 0.4)) == 0.0

    def test_out_of_square_rectangle_is_rejected(self):
        with pytest.raises(DomainError):
            Rectangle(-0.2, 0.5, 0.0, 1.0)


# ---------------------------------------------------------------- boundary


class TestBoundary:
    def test_independence_exact(self):
        report = check_boundary(PI, GridSpec(17), 1e-12)
        assert report.passed and report.violation == 0.0 and report.worst_witness is None

    def test_max_counterexample_fails_at_oracle_worst_point(self):
        grid = GridSpec(3)
        report = check_boundary(G, grid, 1e-12)
        assert not report.passed
        assert report.violation == brute_boundary(G, grid) == 1.0
        # max violation first reached on the u=0 edge at v=1, where g(0,1)=1
        assert report.worst_witness == UnitPoint(0.0, 1.0)

    def test_w_copula_passes(self):
        report = check_boundary(W, GridSpec(13), 1e-12)
        assert report.passed

    def test_rejects_negative_tolerance(self):
        with pytest.raises(InputError):
            check_boundary(PI, GridSpec(3), -1.0)


# ---------------------------------------------------------------- 2-increasing


class TestTwoIncreasing:
    def test_min_copula_passes_grid_11(self):
        grid = GridSpec(11)
        report = check_two_increasing(M, grid, 1e-12)
        assert report.passed
        assert brute_two_increasing(M, grid) >= 0.0

    def test_max_counterexample_fails_on_two_point_grid(self):
        report = check_two_increasing(G, GridSpec(2), 1e-12)
        assert not report.passed
        assert report.violation == 1.0
        assert report.worst_witness == Rectangle(0, 1, 0, 1)

    def test_product_factor_passes_at_zero_tolerance(self):
        report = check_two_increasing(F, GridSpec(11), 0.0)
        assert report.passed

    def test_adjacent_only_agrees_with_full_on_pass_fail(self):
        for c in (PI, M, W, F, G):
            full = check_two_increasing(c, GridSpec(7), 1e-12)
            cells = check_two_increasing(c, GridSpec(7), 1e-12, adjacent_only=True)
            assert full.passed == cells.passed

    def test_full_mode_violation_matches_oracle(self):
        grid = GridSpec(5)
        report = check_two_increasing(G, grid, 1e-12)
        assert report.violation == -brute_two_increasing(G, grid)


# ---------------------------------------------------------------- monotonicity


class TestComponentwiseMonotone:
    def test_product_factor_fails_on_line_v0(self):
        report = check_componentwise_monotone(F, GridSpec(3), 1e-12)
        assert not report.passed
        # f(0,0)=1 drops to f(0.5,0)=0: witness is the segment's lower endpoint
        assert report.violation == 1.0
        assert report.worst_witness == UnitPoint(0.0, 0.0)

    def test_independence_passes(self):
        assert check_componentwise_monotone(PI, GridSpec(9), 1e-12).passed

    def test_max_counterexample_passes(self):
        assert check_componentwise_monotone(G, GridSpec(9), 1e-12).passed


class TestPartialDifferenceMonotone:
    def test_copulas_pass_at_their_exactness_level(self):
        assert check_partial_difference_monotone(PI, GridSpec(9), 0.0).passed
        assert check_partial_difference_monotone(M, GridSpec(9), 1e-12).passed

    def test_independence_partial_difference_values(self):
        # for Pi the partial difference a -> a(v2 - v1) increases with slope v2-v1
        report = check_partial_difference_monotone(PI, GridSpec(6), 0.0)
        assert report.passed and report.violation == 0.0

    def test_max_counterexample_fails_matching_oracle(self):
        grid = GridSpec(3)
        report = check_partial_difference_monotone(G, grid, 1e-12)
        assert not report.passed
        assert report.violation == brute_partial_difference(G, grid) == 0.5
        assert report.worst_witness == Rectangle(0.0, 0.5, 0.0, 0.5)


# ---------------------------------------------------------------- Lipschitz


class TestLipschitz:
    def test_min_copula_passes_grid_11(self):
        grid = GridSpec(11)
        report = check_lipschitz(M, grid, 1e-12)
        assert report.passed
        assert brute_lipschitz(M, grid) <= 0.0

    def test_product_factor_fails(self):
        grid = GridSpec(3)
        report = check_lipschitz(F, grid, 1e-12)
        assert not report.passed
        assert report.violation == brute_lipschitz(F, grid) == 1.0
        # the pair (0,0)-(0.5,0) already violates: |0 - 1| = 1 > 0.5
        assert abs(F(0.5, 0.0) - F(0.0, 0.0)) > 0.5

    def test_independence_passes(self):
        assert check_lipschitz(PI, GridSpec(9), 1e-12).passed


# ---------------------------------------------------------------- verify_copula


class TestVerifyCopula:
    def test_report_order_is_stable(self):
        names = [r.check_name for r in verify_copula(PI, GridSpec(5), 1e-12)]
        assert names == [
            "boundary",
            "two_increasing",
            "lipschitz",
            "partial_difference_monotone",
            "componentwise_monotone",
        ]

    def test_independence_all_pass(self):
        assert all(r.passed for r in verify_copula(PI, GridSpec(11), 1e-12))

    def test_max_counterexample_pattern(self):
        by_name = {r.check_name: r for r in verify_copula(G, GridSpec(5), 1e-12)}
        assert not by_name["boundary"].passed
        assert not by_name["two_increasing"].passed
        assert by_name["componentwise_monotone"].passed

    def test_product_factor_pattern(self):
        by_name = {r.check_name: r for r in verify_copula(F, GridSpec(5), 0.0)}
        assert by_name["two_increasing"].passed
        assert not by_name["boundary"].passed
        assert not by_name["componentwise_monotone"].passed


# ---------------------------------------------------------------- Sklar join


class TestSklarJoin:
    def test_independence_with_identity_margins(self):
        h = sklar_join(PI, lambda x: x, lambda y: y)
        assert h(0.3, 0.7) == 0.3 * 0.7

    def test_min_copula_with_identity_margins(self):
        h = sklar_join(M, lambda x: x, lambda y: y)
        assert h(0.4, 0.9) == 0.4

    def test_square_margin(self):
        h = sklar_join(PI, lambda x: x * x, lambda y: y)
        assert h(0.5, 0.5) == 0.125

    def test_margin_outside_unit_interval_raises(self):
        h = sklar_join(PI, lambda x: 2.0 * x, lambda y: y)
        with pytest.raises(DomainError):
            h(0.8, 0.5)


# ---------------------------------------------------------------- determinism


class TestDeterminism:
    def test_reports_identical_across_runs(self):
        grid = GridSpec(9)
        first = verify_copula(G, grid, 1e-12)
        second = verify_copula(G, grid, 1e-12)
        assert first == second

    def test_scalar_only_callable_falls_back(self):
        def scalar_only(u, v):
            if isinstance(u, np.ndarray):
                raise TypeError("scalars only")
            return u * v

        c = Copula2D(name="scalar-pi", func=scalar_only)
        report = check_boundary(c, GridSpec(5), 1e-12)
        assert report.passed
