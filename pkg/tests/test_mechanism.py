"""Unit tests for menus, best responses, demand, and the objectives."""

import numpy as np
import pytest

from ordeal_lab import (
    DensityModel,
    DomainError,
    Mechanism,
    ValidationError,
    best_option,
    choose_good,
    demand,
    direct_welfare,
    efficiency,
    indirect_utility,
    objective_wr,
    option_masses,
    revenue,
)

UNIFORM = DensityModel.uniform()
ROOT_HALF = np.sqrt(0.5)


def posted(c_a, c_b):
    return Mechanism([(1.0, c_a)], [(1.0, c_b)])


# -- best responses -----------------------------------------------------------


def test_best_option_simple():
    assert best_option([(1.0, 0.5)], 0.7) == (pytest.approx(0.2), 0)


def test_best_option_outside_wins():
    utility, idx = best_option([(1.0, 0.5)], 0.4)
    assert utility == 0.0
    assert idx is None


def test_best_option_tie_takes_lower_ordeal():
    # both options give utility 0.2 at value 0.5
    utility, idx = best_option([(0.4, 0.0), (1.0, 0.3)], 0.5)
    assert utility == pytest.approx(0.2)
    assert idx == 0


def test_best_option_validates():
    with pytest.raises(ValidationError):
        best_option([], 0.5)
    with pytest.raises(DomainError):
        best_option([(1.0, 0.0)], 1.5)


def test_indirect_utility_two_options():
    u = indirect_utility([(0.5, 0.0), (1.0, 0.4)])
    assert np.allclose(u.slopes(), [0.5, 1.0])
    assert 0.8 in u.x
    assert u.value(0.8) == pytest.approx(0.4, abs=1e-12)


def test_indirect_utility_free_good_is_identity():
    u = indirect_utility([(1.0, 0.0)])
    assert u.value(0.37) == pytest.approx(0.37)


def test_choose_good_symmetric_menus():
    mech = posted(0.5, 0.5)
    assert choose_good(mech, 0.9, 0.6) == "A"
    assert choose_good(mech, 0.3, 0.4) == "none"


def test_choose_good_damaged_b():
    mech = Mechanism([(1.0, 0.0)], [(0.5, 0.0)])
    assert choose_good(mech, 0.4, 0.9) == "B"


def test_choose_good_positive_tie_goes_to_a():
    mech = Mechanism([(1.0, 0.0)], [(1.0, 0.0)])
    assert choose_good(mech, 0.6, 0.6) == "A"


def test_choose_good_domain_error():
    with pytest.raises(DomainError):
        choose_good(posted(0.1, 0.1), -0.2, 0.5)


# -- canonicalization ----------------------------------------------------------


def test_canonical_menu_drops_dominated_option():
    mech = Mechanism([(0.5, 0.6), (1.0, 0.5)], [(1.0, 0.0)])
    assert mech.menu_a == ((1.0, 0.5),)


def test_canonical_menu_sorts_by_quality():
    mech = Mechanism([(1.0, 0.4), (0.5, 0.0)], [(1.0, 0.0)])
    assert [q for q, _ in mech.menu_a] == [0.5, 1.0]


def test_canonical_menu_keeps_one_option_when_nothing_attracts():
    mech = Mechanism([(1.0, 2.0), (0.5, 3.0)], [(1.0, 0.0)])
    assert mech.menu_a == ((1.0, 2.0),)


def test_menu_validation():
    with pytest.raises(ValidationError):
        Mechanism([], [(1.0, 0.0)])
    with pytest.raises(DomainError):
        Mechanism([(1.2, 0.0)], [(1.0, 0.0)])
    with pytest.raises(DomainError):
        Mechanism([(1.0, -0.1)], [(1.0, 0.0)])


def test_mechanism_equality_and_hash():
    m1 = posted(0.3, 0.4)
    m2 = Mechanism([(1.0, 0.3), (0.9, 0.35)], [(1.0, 0.4)])  # dominated extra
    assert m1 == m2
    assert hash(m1) == hash(m2)


# -- region integrals ----------------------------------------------------------


def test_demand_symmetric_posted():
    d = demand(posted(0.5, 0.5), UNIFORM)
    assert d[0] == pytest.approx(0.375, abs=1e-12)  # (1 - c^2) / 2
    assert d[1] == pytest.approx(0.375, abs=1e-12)


def test_demand_unattractive_menu_gets_nothing():
    d = demand(Mechanism([(1.0, 0.0)], [(1.0, 2.0)]), UNIFORM)
    assert d == (pytest.approx(1.0, abs=1e-12), 0.0)


def test_demand_clearing_ordeals():
    d = demand(posted(ROOT_HALF, ROOT_HALF), UNIFORM)
    assert d[0] == pytest.approx(0.25, abs=1e-12)
    assert d[1] == pytest.approx(0.25, abs=1e-12)


def test_welfare_zero_when_ordeals_prohibitive():
    assert direct_welfare(Mechanism([(1.0, 1.0)], [(1.0, 1.5)]), UNIFORM) == 0.0


def test_welfare_single_free_good():
    assert direct_welfare(
        Mechanism([(1.0, 0.0)], [(1.0, 2.0)]), UNIFORM
    ) == pytest.approx(0.5, abs=1e-12)


def test_welfare_clearing_value():
    # frozen oracle: closed form 2*(1/3 - c/2 + c^3/6) at c = sqrt(1/2)
    # (scripts/gen_oracle_values.py)
    w = direct_welfare(posted(ROOT_HALF, ROOT_HALF), UNIFORM)
    assert w == pytest.approx(0.0774110156779, abs=1e-12)


def test_revenue_free_menus_is_zero():
    assert revenue(Mechanism([(1.0, 0.0)], [(0.5, 0.0)]), UNIFORM) == 0.0


def test_objective_wr_interpolates():
    mech = posted(ROOT_HALF, ROOT_HALF)
    w = direct_welfare(mech, UNIFORM)
    r = revenue(mech, UNIFORM)
    assert objective_wr(mech, UNIFORM, 0.0) == pytest.approx(w, abs=1e-15)
    assert objective_wr(mech, UNIFORM, 0.5) == pytest.approx(w + 0.5 * r, abs=1e-12)
    # frozen oracle: w + c_star * total supply, closed form
    # (scripts/gen_oracle_values.py)
    assert objective_wr(mech, UNIFORM, 1.0) == pytest.approx(
        0.430964406271, abs=1e-9
    )
    with pytest.raises(DomainError):
        objective_wr(mech, UNIFORM, 1.5)


def test_efficiency_undamaged_equals_welfare_plus_revenue():
    for mech in (posted(0.3, 0.6), posted(ROOT_HALF, ROOT_HALF)):
        e = efficiency(mech, UNIFORM)
        w = direct_welfare(mech, UNIFORM)
        r = revenue(mech, UNIFORM)
        assert e == pytest.approx(w + r, abs=1e-9)


def test_efficiency_closed_forms():
    assert efficiency(
        Mechanism([(1.0, 0.0)], [(1.0, 2.0)]), UNIFORM
    ) == pytest.approx(0.5, abs=1e-12)
    assert efficiency(
        Mechanism([(0.5, 0.0)], [(1.0, 2.0)]), UNIFORM
    ) == pytest.approx(0.25, abs=1e-12)


def test_option_masses_sum_to_demand():
    mech = Mechanism([(0.5, 0.0), (1.0, 0.4)], [(1.0, 0.3)])
    ma, mb = option_masses(mech, UNIFORM)
    d = demand(mech, UNIFORM)
    assert len(ma) == len(mech.menu_a)
    assert ma.sum() == pytest.approx(d[0], abs=1e-12)
    assert mb.sum() == pytest.approx(d[1], abs=1e-12)
    assert np.all(ma >= 0) and np.all(mb >= 0)


def test_demand_on_grid_model_matches_uniform():
    grid = DensityModel.grid(np.ones((20, 20)))
    mech = Mechanism([(0.8, 0.1)], [(1.0, 0.4)])
    d_grid = demand(mech, grid)
    d_uni = demand(mech, UNIFORM)
    assert d_grid[0] == pytest.approx(d_uni[0], abs=1e-12)
    assert d_grid[1] == pytest.approx(d_uni[1], abs=1e-12)
