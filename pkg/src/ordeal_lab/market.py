"""Market-clearing ordeals and the two-option clearing mechanism.

Posting undamaged goods at ordeals (c_A, c_B) induces demands that are
continuous, decreasing in the own ordeal, and increasing in the other
(gross substitutes), so a nested bisection clears both markets: the inner
loop finds the B-ordeal clearing good B at a trial c_A, the outer loop
bisects c_A on good A's excess demand.

When a supply exceeds what even a free good attracts, that ordeal is 0 and
the constraint holds with slack; the residual field then reports the gap.
"""

from dataclasses import dataclass

import numpy as np

from .errors import NonConvergenceError, SolverError, ValidationError
from .mechanism import Mechanism, demand

_INNER_ITERS = 60


@dataclass(frozen=True)
class ClearingResult:
    """Clearing ordeals, demands there, outer iterations used, and
    residual = max |demand - supply| over the two goods."""

    c_a: float
    c_b: float
    demand: tuple
    iterations: int
    residual: float


def _validate_supplies(mu_a, mu_b):
    if not (mu_a > 0 and np.isfinite(mu_a)):
        raise ValidationError("supply must be positive", field="mu_a")
    if not (mu_b > 0 and np.isfinite(mu_b)):
        raise ValidationError("supply must be positive", field="mu_b")
    if mu_a + mu_b > 1.0 + 1e-12:
        raise ValidationError(
            "supplies sum to %g > 1; no allocation can use both fully"
            % (mu_a + mu_b),
            field="mu_b",
        )


def _posted_demand(model, c_a, c_b):
    return demand(Mechanism([(1.0, c_a)], [(1.0, c_b)]), model)


def market_clearing_ordeals(model, mu_a, mu_b, tol=1e-6, max_iter=200):
    """Ordeals clearing both goods, via nested bisection.

    The inner solve clears good B given c_A (c_B = 0 when B has slack);
    the outer loop bisects c_A against good A's excess demand.  Raises on
    non-convergence; a supply too large to bind is not an error (the ordeal
    is 0 and the residual reports the slack).
    """
    _validate_supplies(mu_a, mu_b)
    tol = float(tol)
    if tol <= 0:
        raise ValidationError("tolerance must be positive", field="tol")

    def clear_b(c_a):
        d_b = _posted_demand(model, c_a, 0.0)[1]
        if d_b <= mu_b + 0.1 * tol:
            return 0.0
        lo, hi = 0.0, 1.0
        for _ in range(_INNER_ITERS):
            mid = 0.5 * (lo + hi)
            d_b = _posted_demand(model, c_a, mid)[1]
            if abs(d_b - mu_b) <= 0.1 * tol:
                return mid
            if d_b > mu_b:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    iterations = 0
    c_b0 = clear_b(0.0)
    d_a = _posted_demand(model, 0.0, c_b0)[0]
    if d_a <= mu_a + tol:
        c_a = 0.0
        c_b = c_b0
    else:
        lo, hi = 0.0, 1.0
        c_a = 0.5
        while iterations < max_iter:
            iterations += 1
            c_a = 0.5 * (lo + hi)
            d_a = _posted_demand(model, c_a, clear_b(c_a))[0]
            if abs(d_a - mu_a) <= tol:
                break
            if d_a > mu_a:
                lo = c_a
            else:
                hi = c_a
        c_b = clear_b(c_a)
    d = _posted_demand(model, c_a, c_b)
    residual = max(abs(d[0] - mu_a), abs(d[1] - mu_b))
    ok_a = abs(d[0] - mu_a) <= tol or (c_a == 0.0 and d[0] <= mu_a + tol)
    ok_b = abs(d[1] - mu_b) <= tol or (c_b == 0.0 and d[1] <= mu_b + tol)
    if not (ok_a and ok_b):
        raise NonConvergenceError(
            "clearing stalled after %d iterations: demand (%g, %g) vs supply (%g, %g)"
            % (iterations, d[0], d[1], mu_a, mu_b)
        )
    return ClearingResult(
        c_a=float(c_a),
        c_b=float(c_b),
        demand=(float(d[0]), float(d[1])),
        iterations=iterations,
        residual=float(residual),
    )


def theorem1_mechanism(model, mu_a, mu_b, tol=1e-6):
    """The two-option clearing mechanism [(1, c_A)], [(1, c_B)].

    Verifies full allocation: both demands within 1e-4 of the supplies.
    """
    res = market_clearing_ordeals(model, mu_a, mu_b, tol=tol)
    if res.residual > 1e-4:
        raise SolverError(
            "clearing ordeals leave residual %g > 1e-4; full allocation fails"
            % res.residual
        )
    return Mechanism([(1.0, res.c_a)], [(1.0, res.c_b)])
