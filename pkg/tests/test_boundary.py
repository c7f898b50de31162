"""Tests for boundary geometry, supply masses, and pair feasibility."""

import numpy as np
import pytest

from ordeal_lab import (
    Boundary,
    BoundaryError,
    DensityModel,
    PWLConvex,
    check_feasible_pair,
    supply_masses,
)
from ordeal_lab.boundary import pair_slope_grid

UNIFORM = DensityModel.uniform()
ROOT_HALF = np.sqrt(0.5)


def diag_boundary():
    return Boundary([[0.0, 0.0], [1.0, 1.0]])


def clearing_boundary():
    return Boundary([[ROOT_HALF, ROOT_HALF], [1.0, 1.0]])


# -- construction ---------------------------------------------------------


def test_boundary_requires_two_knots():
    with pytest.raises(BoundaryError):
        Boundary([[0.5, 0.5]])


def test_boundary_rejects_outside_square():
    with pytest.raises(BoundaryError):
        Boundary([[0.0, -0.2], [1.0, 1.0]])
    with pytest.raises(BoundaryError):
        Boundary([[0.5, 0.5], [1.1, 1.0]])


def test_boundary_rejects_non_increasing():
    with pytest.raises(BoundaryError):
        Boundary([[0.0, 0.5], [0.5, 0.5], [1.0, 1.0]])
    with pytest.raises(BoundaryError):
        Boundary([[0.5, 0.0], [0.5, 1.0]])


def test_boundary_must_reach_a_wall():
    with pytest.raises(BoundaryError):
        Boundary([[0.1, 0.1], [0.9, 0.9]])


def test_boundary_interior_knot_off_walls():
    with pytest.raises(BoundaryError):
        Boundary([[0.2, 1.0], [1.0, 1.0]])


def test_boundary_metadata():
    z = Boundary([[0.4, 0.3], [0.7, 0.6], [0.9, 1.0]])
    assert (z.a_low, z.b_low) == (0.4, 0.3)
    assert (z.a_bar, z.b_bar) == (0.9, 1.0)
    assert z.orientation == "b"
    assert np.allclose(z.slopes(), [1.0, 2.0])
    assert z.knots == [(0.4, 0.3), (0.7, 0.6), (0.9, 1.0)]


def test_boundary_orientation_right_wall():
    z = Boundary([[0.2, 0.1], [1.0, 0.5]])
    assert z.orientation == "a"
    assert z.b_bar == 0.5


def test_boundary_eq_and_hash():
    z1 = Boundary([[0.4, 0.3], [0.9, 1.0]])
    z2 = Boundary([[0.4, 0.3], [0.9, 1.0]])
    z3 = Boundary([[0.4, 0.3], [0.8, 1.0]])
    assert z1 == z2
    assert hash(z1) == hash(z2)
    assert z1 != z3


# -- evaluation -----------------------------------------------------------


def test_extended_clamps_to_zero_and_one():
    z = clearing_boundary()
    assert z.extended(0.5) == 0.0
    assert z.extended(0.9) == pytest.approx(0.9)
    assert z.extended(1.0) == 1.0
    arr = z.extended(np.array([0.0, ROOT_HALF, 0.8, 1.0]))
    assert np.allclose(arr, [0.0, ROOT_HALF, 0.8, 1.0])


def test_extended_shelf_above_top_wall_knot():
    z = Boundary([[0.1, 0.2], [0.5, 1.0]])
    assert z.extended(0.75) == 1.0
    assert z.value(0.75) == 1.0  # clamped interpolation, no jump to revisit


def test_extended_jump_at_a_low():
    z = Boundary([[0.4, 0.3], [1.0, 0.9]])
    assert z.extended(0.4 - 1e-12) == 0.0
    assert z.extended(0.4) == pytest.approx(0.3)


def test_inverse_swaps_knots_and_is_cached():
    z = Boundary([[0.4, 0.3], [0.7, 0.6], [0.9, 1.0]])
    inv = z.inverse()
    assert inv.knots == [(0.3, 0.4), (0.6, 0.7), (1.0, 0.9)]
    assert inv.orientation == "a"
    assert inv.inverse() is z


def test_extended_inverse_matches_reflection():
    z = Boundary([[0.2, 0.1], [1.0, 0.5]])
    # b = 0.3 maps back through slope 1/2: a = 0.2 + (0.3 - 0.1) * 2
    assert z.extended_inverse(0.3) == pytest.approx(0.6)
    assert z.extended_inverse(0.05) == 0.0
    assert z.extended_inverse(0.7) == 1.0


# -- integral-ready curves ---------------------------------------------------


def test_supply_curve_appends_shelf():
    z = Boundary([[0.2, 0.3], [0.6, 1.0]])
    xs, ys = z.supply_curve()
    assert np.allclose(xs, [0.2, 0.6, 1.0])
    assert np.allclose(ys, [0.3, 1.0, 1.0])


def test_supply_curve_no_shelf_on_right_wall():
    z = Boundary([[0.2, 0.3], [1.0, 0.8]])
    xs, ys = z.supply_curve()
    assert np.allclose(xs, [0.2, 1.0])
    assert np.allclose(ys, [0.3, 0.8])


def test_extended_pieces_prepends_flat_zero():
    z = Boundary([[0.4, 0.3], [0.9, 1.0]])
    x0s, x1s, y0s, y1s = z.extended_pieces()
    assert x0s[0] == 0.0 and x1s[0] == pytest.approx(0.4)
    assert y0s[0] == 0.0 and y1s[0] == 0.0
    assert x1s[-1] == 1.0
    # pieces tile [0, 1]
    assert np.allclose(x0s[1:], x1s[:-1])


def test_extended_pieces_respects_extra_breaks():
    z = Boundary([[0.4, 0.3], [0.9, 1.0]])
    x0s, x1s, y0s, y1s = z.extended_pieces(extra_breaks=[0.5, 0.7])
    assert 0.5 in x0s and 0.7 in x0s
    # the refined pieces trace the same curve
    mids = 0.5 * (x0s + x1s)
    vals = y0s + (y1s - y0s) * 0.5
    assert np.allclose(vals[x0s >= 0.4], z.extended(mids[x0s >= 0.4]))


# -- supply masses ------------------------------------------------------------


def test_supply_masses_clearing_boundary():
    below, above = supply_masses(clearing_boundary(), UNIFORM)
    assert below == pytest.approx(0.25, abs=1e-12)
    assert above == pytest.approx(0.25, abs=1e-12)


def test_supply_masses_diagonal_splits_in_half():
    below, above = supply_masses(diag_boundary(), UNIFORM)
    assert below == pytest.approx(0.5, abs=1e-12)
    assert above == pytest.approx(0.5, abs=1e-12)


def test_supply_masses_offset_line():
    # below = integral of (a - 0.499) over [0.5, 1] = 0.1255
    z = Boundary([[0.5, 0.001], [1.0, 0.501]])
    below, above = supply_masses(z, UNIFORM)
    assert below == pytest.approx(0.1255, abs=1e-12)
    assert above == pytest.approx(0.874, abs=1e-12)
    assert below + above + UNIFORM.cdf(0.5, 0.001) == pytest.approx(1.0, abs=1e-12)


def test_supply_masses_partition_on_grid_model():
    rng = np.random.default_rng(7)
    model = DensityModel.grid(rng.uniform(0.5, 1.5, size=(12, 12)))
    z = Boundary([[0.3, 0.2], [0.6, 0.5], [0.8, 1.0]])
    below, above = supply_masses(z, model)
    assert below + above + model.cdf(z.a_low, z.b_low) == pytest.approx(
        1.0, abs=1e-9
    )


def test_supply_masses_inverse_swaps_roles():
    rng = np.random.default_rng(11)
    model = DensityModel.grid(rng.uniform(0.5, 1.5, size=(10, 10)))
    z = Boundary([[0.3, 0.2], [0.6, 0.5], [0.8, 1.0]])
    below, above = supply_masses(z, model)
    below_t, above_t = supply_masses(z.inverse(), model.transpose())
    assert below_t == pytest.approx(above, abs=1e-12)
    assert above_t == pytest.approx(below, abs=1e-12)


# -- feasibility of (boundary, utility) pairs ----------------------------------


def test_feasible_clearing_pair():
    z = clearing_boundary()
    ua = PWLConvex.from_slopes([0.0, ROOT_HALF, 1.0], [0.0, 1.0])
    rep = check_feasible_pair(z, ua, UNIFORM, 0.25, 0.25)
    assert rep.feasible
    assert rep.ua_monotone and rep.ratio_monotone and rep.slopes_ok and rep.supply_ok
    assert rep.slack[0] == pytest.approx(0.0, abs=1e-9)
    assert rep.slack[1] == pytest.approx(0.0, abs=1e-9)


def test_ratio_condition_fails_on_steepening_boundary():
    # z' rises from 1 to 2 while ua' stays at 1, so ua'/z' falls
    z = Boundary([[0.4, 0.3], [0.7, 0.6], [0.9, 1.0]])
    ua = PWLConvex.from_slopes([0.0, 0.4, 1.0], [0.0, 1.0])
    rep = check_feasible_pair(z, ua, UNIFORM, 0.5, 0.5)
    assert not rep.feasible
    assert rep.ua_monotone
    assert not rep.ratio_monotone


def test_ratio_condition_checked_only_on_boundary_domain():
    # ua' doubles after a_bar = 0.9; the ratio scan must not see that
    z = Boundary([[0.4, 0.3], [0.9, 0.8], [0.95, 1.0]])
    ua = PWLConvex.from_slopes([0.0, 0.4, 0.95, 1.0], [0.0, 0.5, 1.0])
    grid, u_s, z_s = pair_slope_grid(z, ua)
    assert grid[0] == pytest.approx(z.a_low)
    assert grid[-1] == pytest.approx(z.a_bar)
    assert np.all(u_s <= 0.5 + 1e-12)


def test_ample_supply_is_always_ok():
    z = diag_boundary()
    ua = PWLConvex.from_slopes([0.0, 1.0], [1.0])
    rep = check_feasible_pair(z, ua, UNIFORM, 1.0, 1.0)
    assert rep.feasible
    assert rep.slack == (pytest.approx(0.5), pytest.approx(0.5))


def test_supply_violation_reports_negative_slack():
    z = diag_boundary()
    ua = PWLConvex.from_slopes([0.0, 1.0], [1.0])
    rep = check_feasible_pair(z, ua, UNIFORM, 0.25, 0.25)
    assert not rep.feasible
    assert not rep.supply_ok
    assert rep.slack[0] == pytest.approx(-0.25)
    assert rep.slack[1] == pytest.approx(-0.25)
    # the shape conditions still pass
    assert rep.ua_monotone and rep.ratio_monotone


def test_pair_slope_grid_merges_knots():
    z = Boundary([[0.2, 0.1], [0.6, 0.5], [1.0, 0.9]])
    ua = PWLConvex.from_slopes([0.0, 0.45, 1.0], [0.2, 0.8])
    grid, u_s, z_s = pair_slope_grid(z, ua)
    assert 0.45 in grid and 0.6 in grid
    assert len(u_s) == len(grid) - 1
    assert len(z_s) == len(grid) - 1
