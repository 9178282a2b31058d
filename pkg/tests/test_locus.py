import math

import numpy as np
import pytest

import polyfiber as pf
from polyfiber.locus import FULL_LINE

Z2P4 = pf.RealPolynomial((4.0, 0.0, 1.0))
Z2P4Z8 = pf.RealPolynomial((8.0, 4.0, 1.0))
Z3M3Z = pf.RealPolynomial((0.0, -3.0, 0.0, 1.0))
Z3 = pf.RealPolynomial((0.0, 0.0, 0.0, 1.0))
Z3P3Z = pf.RealPolynomial((0.0, 3.0, 0.0, 1.0))
Z4 = pf.RealPolynomial((0.0, 0.0, 0.0, 0.0, 1.0))


def rand_poly(rng, degrees, low=-5.0, high=5.0):
    deg = int(rng.choice(degrees))
    c = rng.uniform(low, high, deg + 1)
    while abs(c[-1]) < 0.1:
        c[-1] = rng.uniform(low, high)
    return pf.RealPolynomial(tuple(c))


def q_residual_ok(f, x, y, tol=1e-8):
    _, q = pf.expand_real_imag(f)
    val = abs(float(q(x, y)))
    scale = float(q.magnitude_at(x, y))
    return val <= tol * scale or (scale == 0.0 and val == 0.0)


def branches_of(kind, branches):
    return [b for b in branches if b.kind == kind]


class TestSolveOffaxis:
    def test_cubic_example(self):
        r = pf.reduce_imag(Z3M3Z)
        ys = pf.solve_offaxis_at(r, 2.0)
        assert ys == pytest.approx([3.0])

    def test_full_line_for_pure_quadratic(self):
        r = pf.reduce_imag(Z2P4)
        assert pf.solve_offaxis_at(r, 0.0) is FULL_LINE

    def test_quartic_example(self):
        r = pf.reduce_imag(Z4)
        ys = pf.solve_offaxis_at(r, 1.0)
        assert ys == pytest.approx([1.0])

    def test_empty_inside_cubic_gap(self):
        r = pf.reduce_imag(Z3M3Z)
        assert pf.solve_offaxis_at(r, 0.5) == []

    def test_small_negative_clamped(self):
        r = pf.reduce_imag(Z3M3Z)
        # u = 3x^2 - 3 is approximately -3e-9 here; clamps to the axis
        x = math.sqrt(1.0 - 1e-9 / 3.0)
        ys = pf.solve_offaxis_at(r, x, tol=1e-8)
        assert ys == [0.0]

    def test_invalid_tol(self):
        r = pf.reduce_imag(Z2P4)
        with pytest.raises(ValueError):
            pf.solve_offaxis_at(r, 0.0, tol=0.0)

    def test_degree_one_never_offaxis(self):
        r = pf.reduce_imag(pf.RealPolynomial((2.0, 3.0)))
        for x in (-2.0, 0.0, 2.0):
            assert pf.solve_offaxis_at(r, x) == []

    def test_root_count_bounded(self):
        rng = np.random.default_rng(21)
        for _ in range(50):
            f = rand_poly(rng, range(2, 9))
            r = pf.reduce_imag(f)
            x = float(rng.uniform(-3, 3))
            ys = pf.solve_offaxis_at(r, x)
            if ys is FULL_LINE:
                continue
            assert 2 * len(ys) <= 2 * ((f.degree - 1) // 2)


class TestSweep:
    def test_z2_plus_4(self):
        branches = pf.sweep_locus(Z2P4, -3.0, 3.0, 129)
        kinds = [b.kind for b in branches]
        assert kinds.count(pf.BranchKind.REAL_AXIS) == 1
        verts = branches_of(pf.BranchKind.VERTICAL_LINE, branches)
        assert len(verts) == 1
        assert verts[0].points[0][0] == pytest.approx(0.0, abs=1e-12)
        assert not branches_of(pf.BranchKind.OFF_AXIS, branches)

    def test_shifted_quadratic(self):
        branches = pf.sweep_locus(Z2P4Z8, -6.0, 2.0, 129)
        verts = branches_of(pf.BranchKind.VERTICAL_LINE, branches)
        assert len(verts) == 1
        assert verts[0].points[0][0] == pytest.approx(-2.0, abs=1e-12)

    def test_cubic_arcs_outside_unit_interval(self):
        branches = pf.sweep_locus(Z3M3Z, -3.0, 3.0, 129)
        arcs = branches_of(pf.BranchKind.OFF_AXIS, branches)
        assert len(arcs) == 2
        for arc in arcs:
            assert arc.mirror
            for x, y in arc.points:
                assert abs(x) >= 1.0 - 1e-9
                assert y >= 0.0
        # endpoints refined onto the axis at +-1
        endpoint_xs = sorted(
            arc.points[-1][0] if arc.points[0][0] < 0 else arc.points[0][0]
            for arc in arcs
        )
        assert endpoint_xs == pytest.approx([-1.0, 1.0], abs=1e-9)

    def test_quartic_diagonal_and_vertical(self):
        branches = pf.sweep_locus(Z4, -3.0, 3.0, 129)
        arcs = branches_of(pf.BranchKind.OFF_AXIS, branches)
        assert arcs
        for arc in arcs:
            for x, y in arc.points:
                assert y == pytest.approx(abs(x), abs=1e-9)
        verts = branches_of(pf.BranchKind.VERTICAL_LINE, branches)
        assert len(verts) == 1
        assert verts[0].points[0][0] == pytest.approx(0.0, abs=1e-12)

    def test_all_points_satisfy_residual(self):
        rng = np.random.default_rng(31)
        for _ in range(25):
            f = rand_poly(rng, range(2, 8))
            for b in pf.sweep_locus(f, -3.0, 3.0, 65):
                for x, y in b.points:
                    assert q_residual_ok(f, x, y)
                    if b.mirror:
                        assert q_residual_ok(f, x, -y)

    def test_mirror_symmetry_by_resolving(self):
        rng = np.random.default_rng(32)
        for _ in range(10):
            f = rand_poly(rng, (3, 4, 5))
            r = pf.reduce_imag(f)
            for b in pf.sweep_locus(f, -2.0, 2.0, 65):
                if b.kind != pf.BranchKind.OFF_AXIS:
                    continue
                for x, y in b.points[:: max(1, len(b.points) // 7)]:
                    if y == 0.0:
                        continue
                    ys = pf.solve_offaxis_at(r, x)
                    assert ys is not FULL_LINE
                    assert min(abs(v - y) for v in ys) <= 1e-9 * (1.0 + y)

    def test_constant_shift_same_locus(self):
        rng = np.random.default_rng(33)
        for _ in range(10):
            f = rand_poly(rng, (2, 3, 4))
            g = f.shift_constant(float(rng.uniform(-20, 20)))
            assert pf.sweep_locus(f, -3.0, 3.0, 65) == pf.sweep_locus(g, -3.0, 3.0, 65)

    def test_quadratic_center_is_derivative_root(self):
        rng = np.random.default_rng(34)
        for _ in range(40):
            f = rand_poly(rng, (2,))
            d = pf.derivative(f, 1)
            center = -d.coeffs[0] / d.coeffs[1]
            span = max(3.0, abs(center) + 1.0)
            branches = pf.sweep_locus(f, -span, span, 64)
            verts = branches_of(pf.BranchKind.VERTICAL_LINE, branches)
            assert len(verts) == 1
            assert abs(verts[0].points[0][0] - center) <= 1e-12 * (1.0 + abs(center))

    def test_cubic_offaxis_symmetric_about_inflection(self):
        rng = np.random.default_rng(35)
        for _ in range(25):
            f = rand_poly(rng, (3,))
            r = pf.reduce_imag(f)
            x0 = pf.classify_cubic(f).inflection_x
            for _ in range(5):
                delta = float(rng.uniform(0.0, 2.0))
                left = pf.solve_offaxis_at(r, x0 - delta)
                right = pf.solve_offaxis_at(r, x0 + delta)
                assert len(left) == len(right)
                for lv, rv in zip(left, right):
                    assert abs(lv - rv) <= 1e-9 * (1.0 + abs(lv))

    def test_degree_one_real_axis_only(self):
        branches = pf.sweep_locus(pf.RealPolynomial((1.0, 2.0)), -3.0, 3.0, 33)
        assert len(branches) == 1
        assert branches[0].kind == pf.BranchKind.REAL_AXIS

    def test_bad_arguments(self):
        with pytest.raises(ValueError):
            pf.sweep_locus(Z2P4, 3.0, -3.0, 65)
        with pytest.raises(ValueError):
            pf.sweep_locus(Z2P4, -3.0, 3.0, 8)


class TestClosedForm:
    def test_quadratic_vertical_line(self):
        branches = pf.closed_form_locus(Z2P4Z8, -6.0, 2.0, 65)
        verts = branches_of(pf.BranchKind.VERTICAL_LINE, branches)
        assert len(verts) == 1
        assert verts[0].points[0][0] == -2.0

    def test_cubic_matches_formula(self):
        branches = pf.closed_form_locus(Z3M3Z, -3.0, 3.0, 65)
        for b in branches_of(pf.BranchKind.OFF_AXIS, branches):
            for x, y in b.points:
                assert y * y == pytest.approx(3.0 * x * x - 3.0, abs=1e-9)

    def test_quartic_diagonal_plus_vertical(self):
        branches = pf.closed_form_locus(Z4, -3.0, 3.0, 65)
        arcs = branches_of(pf.BranchKind.OFF_AXIS, branches)
        assert arcs
        for b in arcs:
            for x, y in b.points:
                assert y == pytest.approx(abs(x), abs=1e-12)
        assert branches_of(pf.BranchKind.VERTICAL_LINE, branches)

    def test_agrees_with_sweep(self):
        rng = np.random.default_rng(41)
        for _ in range(20):
            f = rand_poly(rng, (2, 3, 4))
            sweep = pf.sweep_locus(f, -3.0, 3.0, 65)
            closed = pf.closed_form_locus(f, -3.0, 3.0, 65)
            r = pf.reduce_imag(f)
            for b in branches_of(pf.BranchKind.OFF_AXIS, closed):
                for x, y in b.points[:: max(1, len(b.points) // 9)]:
                    assert q_residual_ok(f, x, y, tol=1e-7)
            sweep_verts = sorted(
                b.points[0][0] for b in branches_of(pf.BranchKind.VERTICAL_LINE, sweep)
            )
            # closed form reports the quadratic/quartic center line even when it
            # falls outside the window; compare only in-window lines
            closed_verts = sorted(
                b.points[0][0]
                for b in branches_of(pf.BranchKind.VERTICAL_LINE, closed)
                if -3.0 <= b.points[0][0] <= 3.0
            )
            assert len(sweep_verts) == len(closed_verts)
            for a, b2 in zip(sweep_verts, closed_verts):
                assert abs(a - b2) <= 1e-9 * (1.0 + abs(a))

    def test_unsupported_degree(self):
        with pytest.raises(pf.DegreeError):
            pf.closed_form_locus(pf.RealPolynomial((1.0, 1.0)), -3.0, 3.0)
        with pytest.raises(pf.DegreeError):
            pf.closed_form_locus(pf.RealPolynomial((0.0,) * 5 + (1.0,)), -3.0, 3.0)


class TestClassify:
    def test_three_categories(self):
        assert pf.classify_cubic(Z3).category == pf.SlopeCategory.ZERO_SLOPE
        assert pf.classify_cubic(Z3M3Z).category == pf.SlopeCategory.NEGATIVE_SLOPE
        assert pf.classify_cubic(Z3P3Z).category == pf.SlopeCategory.POSITIVE_SLOPE

    def test_inflection_values(self):
        c = pf.classify_cubic(Z3M3Z)
        assert c.inflection_x == 0.0
        assert c.inflection_slope == -3.0

    def test_slope_formula(self):
        rng = np.random.default_rng(51)
        for _ in range(30):
            f = rand_poly(rng, (3,))
            a, b, cc = f.coeffs[3], f.coeffs[2], f.coeffs[1]
            result = pf.classify_cubic(f)
            assert result.inflection_x == pytest.approx(-b / (3 * a))
            d1 = pf.derivative(f, 1)
            assert result.inflection_slope == pytest.approx(
                float(d1(result.inflection_x)), rel=1e-9, abs=1e-9
            )

    def test_wrong_degree(self):
        with pytest.raises(pf.DegreeError):
            pf.classify_cubic(Z2P4)


class TestHyperbolaCheck:
    def test_point_on_branch(self):
        assert pf.cubic_hyperbola_check(Z3M3Z, (2.0, 3.0)) == pytest.approx(0.0, abs=1e-9)

    def test_center_not_on_locus(self):
        assert abs(pf.cubic_hyperbola_check(Z3M3Z, (0.0, 0.0))) > 1.0

    def test_degenerate_lines(self):
        assert pf.cubic_conic_is_degenerate(Z3)
        for x in (-1.3, 0.4, 2.0):
            y = math.sqrt(3.0) * x
            assert pf.cubic_hyperbola_check(Z3, (x, y)) == pytest.approx(0.0, abs=1e-12)
        assert not pf.cubic_conic_is_degenerate(Z3M3Z)

    def test_zero_on_sweep_points(self):
        rng = np.random.default_rng(52)
        for _ in range(15):
            f = rand_poly(rng, (3,))
            for b in pf.sweep_locus(f, -3.0, 3.0, 65):
                if b.kind != pf.BranchKind.OFF_AXIS:
                    continue
                for x, y in b.points[:: max(1, len(b.points) // 5)]:
                    resid = pf.cubic_hyperbola_check(f, (x, y))
                    scale = 1.0 + abs(3 * f.coeffs[3] ** 2 * x * x) + abs(
                        f.coeffs[3] ** 2 * y * y
                    )
                    assert abs(resid) <= 1e-6 * scale

    def test_wrong_degree(self):
        with pytest.raises(pf.DegreeError):
            pf.cubic_hyperbola_check(Z2P4, (0.0, 0.0))


class TestLift:
    def test_real_axis_parabola(self):
        branches = pf.sweep_locus(Z2P4, -3.0, 3.0, 65)
        p, _ = pf.expand_real_imag(Z2P4)
        axis = branches_of(pf.BranchKind.REAL_AXIS, branches)[0]
        curve = pf.lift_to_space(axis, p)
        for x, y, z in curve.points:
            assert y == 0.0
            assert z == pytest.approx(x * x + 4.0, rel=1e-12, abs=1e-12)

    def test_vertical_line_downward_parabola(self):
        branches = pf.sweep_locus(Z2P4, -3.0, 3.0, 65)
        p, _ = pf.expand_real_imag(Z2P4)
        vert = branches_of(pf.BranchKind.VERTICAL_LINE, branches)[0]
        curve = pf.lift_to_space(vert, p)
        for x, y, z in curve.points:
            assert x == pytest.approx(0.0, abs=1e-12)
            assert z == pytest.approx(-y * y + 4.0, rel=1e-12, abs=1e-12)

    def test_quartic_diagonal_height(self):
        branches = pf.closed_form_locus(Z4, -3.0, 3.0, 65)
        p, _ = pf.expand_real_imag(Z4)
        for b in branches_of(pf.BranchKind.OFF_AXIS, branches):
            curve = pf.lift_to_space(b, p)
            for x, y, z in curve.points:
                assert z == pytest.approx(-4.0 * x**4, rel=1e-12, abs=1e-12)

    def test_mirror_same_height(self):
        branches = pf.sweep_locus(Z3M3Z, -3.0, 3.0, 65)
        p, _ = pf.expand_real_imag(Z3M3Z)
        arc = branches_of(pf.BranchKind.OFF_AXIS, branches)[0]
        up = pf.lift_to_space(arc, p)
        down = pf.lift_to_space(arc, p, mirrored=True)
        for (x1, y1, z1), (x2, y2, z2) in zip(up.points, down.points):
            assert x1 == x2
            assert y2 == -y1
            assert z1 == z2

    def test_mirror_requires_flag(self):
        branches = pf.sweep_locus(Z2P4, -3.0, 3.0, 65)
        p, _ = pf.expand_real_imag(Z2P4)
        with pytest.raises(ValueError):
            pf.lift_to_space(branches[0], p, mirrored=True)

    def test_lift_branches_materializes_mirrors(self):
        branches = pf.sweep_locus(Z3M3Z, -3.0, 3.0, 65)
        p, _ = pf.expand_real_imag(Z3M3Z)
        curves = pf.lift_branches(branches, p)
        n_mirror = sum(1 for b in branches if b.mirror)
        assert len(curves) == len(branches) + n_mirror
