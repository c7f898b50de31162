"""Tests for market clearing via nested bisection."""

import numpy as np
import pytest

from ordeal_lab import (
    DensityModel,
    Mechanism,
    ValidationError,
    demand,
    market_clearing_ordeals,
    theorem1_mechanism,
)

UNIFORM = DensityModel.uniform()
ROOT_HALF = np.sqrt(0.5)


def test_clearing_symmetric_quarter_supplies():
    res = market_clearing_ordeals(UNIFORM, 0.25, 0.25, tol=1e-9)
    # frozen oracle: closed form sqrt(1 - 2 mu) (scripts/gen_oracle_values.py)
    assert res.c_a == pytest.approx(ROOT_HALF, abs=1e-8)
    assert res.c_b == pytest.approx(ROOT_HALF, abs=1e-8)
    assert res.demand[0] == pytest.approx(0.25, abs=1e-9)
    assert res.demand[1] == pytest.approx(0.25, abs=1e-9)
    assert res.residual <= 1e-9


def test_clearing_slack_supplies_posts_free_goods():
    res = market_clearing_ordeals(UNIFORM, 0.5, 0.5, tol=1e-9)
    assert res.c_a == 0.0
    assert res.c_b == 0.0
    assert res.iterations == 0
    assert res.residual <= 1e-12


def test_clearing_three_eighths_supplies():
    res = market_clearing_ordeals(UNIFORM, 0.375, 0.375, tol=1e-9)
    assert res.c_a == pytest.approx(0.5, abs=1e-8)
    assert res.c_b == pytest.approx(0.5, abs=1e-8)


def test_clearing_asymmetric_supplies():
    res = market_clearing_ordeals(UNIFORM, 0.1, 0.4, tol=1e-9)
    # frozen oracle: scipy.optimize.brentq on the exact uniform demand
    # system (scripts/gen_oracle_values.py)
    assert res.c_a == pytest.approx(0.849389322749, abs=1e-7)
    assert res.c_b == pytest.approx(0.588658211803, abs=1e-7)
    assert res.c_a > res.c_b  # scarcer good carries the larger ordeal
    assert res.demand[0] == pytest.approx(0.1, abs=1e-9)
    assert res.demand[1] == pytest.approx(0.4, abs=1e-9)


def test_clearing_on_asymmetric_grid_model():
    rng = np.random.default_rng(19)
    model = DensityModel.grid(rng.uniform(0.5, 1.5, size=(12, 12)))
    res = market_clearing_ordeals(model, 0.2, 0.3, tol=1e-8)
    assert res.residual <= 1e-8
    assert res.demand[0] == pytest.approx(0.2, abs=1e-8)
    assert res.demand[1] == pytest.approx(0.3, abs=1e-8)


def test_clearing_on_band_model():
    # supplies sum to the whole population: every type is served, good A is
    # free and good B's ordeal screens off exactly the bottom value band
    model = DensityModel.example1(0.05, 0.3)
    res = market_clearing_ordeals(model, 0.65, 0.35, tol=1e-8)
    assert res.residual <= 1e-8
    assert res.c_a == 0.0
    assert res.c_b == pytest.approx(0.5, abs=1e-8)
    assert res.demand[0] == pytest.approx(0.65, abs=1e-8)
    assert res.demand[1] == pytest.approx(0.35, abs=1e-8)


def test_clearing_validates_inputs():
    with pytest.raises(ValidationError, match="mu_a"):
        market_clearing_ordeals(UNIFORM, 0.0, 0.25)
    with pytest.raises(ValidationError, match="mu_b"):
        market_clearing_ordeals(UNIFORM, 0.25, -0.1)
    with pytest.raises(ValidationError, match="mu_b"):
        market_clearing_ordeals(UNIFORM, 0.7, 0.5)
    with pytest.raises(ValidationError, match="tol"):
        market_clearing_ordeals(UNIFORM, 0.25, 0.25, tol=0.0)


def test_gross_substitutes_at_solution():
    res = market_clearing_ordeals(UNIFORM, 0.1, 0.4, tol=1e-9)
    delta = 0.05

    def posted_demand(ca, cb):
        return demand(Mechanism([(1.0, ca)], [(1.0, cb)]), UNIFORM)

    base = posted_demand(res.c_a, res.c_b)
    bumped_a = posted_demand(res.c_a + delta, res.c_b)
    assert bumped_a[0] < base[0]  # own ordeal suppresses own demand
    assert bumped_a[1] > base[1]  # and diverts buyers to the other good
    bumped_b = posted_demand(res.c_a, res.c_b + delta)
    assert bumped_b[1] < base[1]
    assert bumped_b[0] > base[0]


def test_theorem1_mechanism_posts_clearing_ordeals():
    mech = theorem1_mechanism(UNIFORM, 0.25, 0.25)
    ((qa, ca),) = mech.menu_a
    ((qb, cb),) = mech.menu_b
    assert qa == 1.0 and qb == 1.0
    assert ca == pytest.approx(ROOT_HALF, abs=1e-5)
    assert cb == pytest.approx(ROOT_HALF, abs=1e-5)
    d = demand(mech, UNIFORM)
    assert d[0] == pytest.approx(0.25, abs=1e-6)
    assert d[1] == pytest.approx(0.25, abs=1e-6)
