"""Unit tests for the piecewise-linear convex envelope type."""

import numpy as np
import pytest

from ordeal_lab import ConvexityError, PWLConvex, ValidationError
from ordeal_lab.pwl import line_hull, merged_breaks, response_curve


def test_constructor_validates_span():
    with pytest.raises(Exception):
        PWLConvex([0.0, 0.9], [0.0, 0.5])
    with pytest.raises(ValidationError):
        PWLConvex([0.1, 1.0], [0.0, 0.5])


def test_constructor_rejects_concave_knots():
    with pytest.raises(ConvexityError):
        PWLConvex([0.0, 0.5, 1.0], [0.0, 0.6, 0.8])


def test_constructor_requires_zero_at_origin():
    with pytest.raises(ValidationError):
        PWLConvex([0.0, 1.0], [0.2, 0.5])


def test_from_slopes_matches_cumsum():
    f = PWLConvex.from_slopes([0.0, 0.4, 1.0], [0.0, 0.5])
    assert f.value(0.4) == 0.0
    assert f.value(1.0) == pytest.approx(0.3, abs=1e-15)
    assert list(f.slopes()) == [0.0, 0.5]
    with pytest.raises(ValidationError):
        PWLConvex.from_slopes([0.0, 1.0], [0.5, 1.0])


def test_from_lines_two_line_envelope():
    # lines 0.5 v and v - 0.4 cross at v = 0.8
    f = PWLConvex.from_lines([(0.5, 0.0), (1.0, 0.4)])
    assert np.allclose(f.slopes(), [0.5, 1.0])
    assert f.value(0.8) == pytest.approx(0.4, abs=1e-12)
    assert f.value(1.0) == pytest.approx(0.6, abs=1e-12)


def test_from_lines_posted_ordeal():
    f = PWLConvex.from_lines([(1.0, 0.5)])
    assert f.value(0.3) == 0.0
    assert f.value(0.7) == pytest.approx(0.2, abs=1e-12)
    assert f.first_positive() == pytest.approx(0.5, abs=1e-12)


def test_from_lines_identity():
    f = PWLConvex.from_lines([(1.0, 0.0)])
    grid = np.linspace(0.0, 1.0, 11)
    assert np.allclose(f.value(grid), grid)
    assert f.first_positive() == 0.0


def test_first_positive_of_flat_curve_is_one():
    f = PWLConvex.from_slopes([0.0, 1.0], [0.0])
    assert f.first_positive() == 1.0
    assert f.inverse_sup(0.0) == 1.0


def test_inverse_sup_clamps_and_inverts():
    f = PWLConvex.from_lines([(1.0, 0.5)])
    assert f.inverse_sup(0.2) == pytest.approx(0.7, abs=1e-12)
    assert f.inverse_sup(0.0) == pytest.approx(0.5, abs=1e-12)
    assert f.inverse_sup(2.0) == 1.0


def test_to_menu_round_trip():
    f = PWLConvex.from_slopes([0.0, 0.3, 0.7, 1.0], [0.0, 0.4, 1.0])
    menu = f.to_menu()
    assert len(menu) == 2  # the flat initial segment carries no option
    g = PWLConvex.from_lines(menu)
    assert f.max_abs_diff(g) <= 1e-12


def test_line_hull_drops_dominated_line():
    hull = line_hull([(0.5, 0.6), (1.0, 0.5)])
    # (0.5, 0.6) is below (1.0, 0.5) everywhere on [0, 1]
    assert [s for s, _, _ in hull if s > 0] == [1.0]


def test_merged_breaks_dedupes_and_clips():
    out = merged_breaks(np.array([0.0, 0.5, 1.0]), np.array([0.25, 1.0]))
    assert np.allclose(out, [0.0, 0.25, 0.5, 1.0])
    out = merged_breaks(np.array([0.2, 0.8]), lo=0.4, hi=0.9)
    assert out[0] == 0.4 and out[-1] == 0.9


def test_response_curve_symmetric_menus():
    ua = PWLConvex.from_lines([(1.0, 0.5)])
    xs, ys = response_curve(ua, ua)
    assert np.allclose(xs, ys)
    assert xs[0] == pytest.approx(0.5, abs=1e-12)
    assert xs[-1] == 1.0


def test_response_curve_zero_utility_degenerates():
    flat = PWLConvex.from_slopes([0.0, 1.0], [0.0])
    ub = PWLConvex.from_lines([(1.0, 0.3)])
    xs, ys = response_curve(flat, ub)
    assert len(xs) == 1


def test_max_abs_diff_sees_interior_kinks():
    f = PWLConvex.from_slopes([0.0, 0.5, 1.0], [0.0, 1.0])
    g = PWLConvex.from_slopes([0.0, 1.0], [0.25])
    assert f.max_abs_diff(g) == pytest.approx(0.25, abs=1e-12)
