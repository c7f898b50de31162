"""Optimal implementation of a fixed boundary and the welfare functional.

Given a boundary z, the best implementable A-utility has slope profile

    U_A'(a) = 0 below a_low,  m(a) * c on (a_low, a_bar),  1 above a_bar,

where m starts at 1 and multiplies by the slope ratio at each upward kink
of z (curvature contributes nothing on linear pieces), and the constant
c = 1 / max(m(a_bar), m(a_bar) / z'(a_bar-)) normalizes the larger of the
two final slopes (A's own, and B's through the coupling) to exactly 1.
The companion B-utility follows from the differentiated indifference
condition U_B'(z(a)) = U_A'(a) / z'(a).

Welfare of any implementable pair evaluates in boundary form:

    W* = U_A(1) - int_0^1 U_A'(a) F(a, z-hat(a)) da

which this module integrates exactly (the same value as integrating
realized utilities against the density over both menu regions).
"""

from dataclasses import dataclass

import numpy as np

from .boundary import Boundary, pair_slope_grid
from .errors import DegenerateMechanismError, InfeasiblePairError, ValidationError
from .mechanism import Mechanism
from .pwl import PWLConvex

_TINY = 1e-15


@dataclass(frozen=True)
class StepProfile:
    """Right-continuous step function: values[i] on [breaks[i], breaks[i+1])."""

    breaks: np.ndarray
    values: np.ndarray

    def __call__(self, a):
        i = int(np.searchsorted(self.breaks, a, side="right")) - 1
        i = min(max(i, 0), len(self.values) - 1)
        return float(self.values[i])


def m_profile(z):
    """Cumulative upward-kink slope-ratio products along the boundary.

    Starts at 1; multiplies by z'+/z'- at each knot where the slope jumps
    up; downward kinks and the (zero) curvature of linear pieces contribute
    nothing.  Non-decreasing by construction.
    """
    slopes = z.slopes()
    values = np.empty(len(slopes))
    values[0] = 1.0
    for i in range(1, len(slopes)):
        factor = slopes[i] / slopes[i - 1]
        values[i] = values[i - 1] * (factor if factor > 1.0 else 1.0)
    return StepProfile(breaks=z.ax.copy(), values=values)


def _profile_to_ua(z, interior_slopes):
    """PWLConvex from per-segment slopes on the boundary domain.

    Adds the flat-zero stretch below a_low and the slope-1 tail above a_bar
    (when each exists).
    """
    breaks = [0.0]
    slopes = []
    if z.a_low > _TINY:
        breaks.append(z.a_low)
        slopes.append(0.0)
    for i in range(len(interior_slopes)):
        breaks.append(float(z.ax[i + 1]))
        slopes.append(float(interior_slopes[i]))
    if z.a_bar < 1.0 - _TINY:
        breaks.append(1.0)
        slopes.append(1.0)
    return PWLConvex.from_slopes(np.array(breaks), np.array(slopes))


def optimal_UA(z):
    """The welfare-maximizing implementable A-utility for boundary z."""
    prof = m_profile(z)
    z_last = float(z.slopes()[-1])
    m_bar = float(prof.values[-1])
    c = 1.0 / max(m_bar, m_bar / z_last)
    return _profile_to_ua(z, prof.values * c)


def c_scale(z):
    """The normalizing constant c of the optimal profile."""
    prof = m_profile(z)
    z_last = float(z.slopes()[-1])
    m_bar = float(prof.values[-1])
    return 1.0 / max(m_bar, m_bar / z_last)


def ub_from(z, ua):
    """The B-utility coupled to (z, ua): U_B'(z(a)) = U_A'(a) / z'(a).

    Vanishes at b_low; above b_bar (when b_bar < 1) it extends at the last
    interior slope capped at 1.  The slope ratio must be non-decreasing and
    at most 1, otherwise no valid B-menu exists.
    """
    grid, u_s, z_s = pair_slope_grid(z, ua)
    ratios = u_s / z_s
    if np.any(np.diff(ratios) < -1e-9):
        raise InfeasiblePairError(
            "ua'/z' decreases along the boundary; U_B would be non-convex"
        )
    if ratios.max() > 1.0 + 1e-9:
        raise InfeasiblePairError(
            "ua'/z' exceeds 1; the B-menu would need quality above 1"
        )
    b_grid = np.interp(grid, z.ax, z.bx)
    breaks = [0.0]
    slopes = []
    if z.b_low > _TINY:
        breaks.append(z.b_low)
        slopes.append(0.0)
    for i in range(len(ratios)):
        breaks.append(float(b_grid[i + 1]))
        slopes.append(float(min(1.0, ratios[i])))
    if z.b_bar < 1.0 - _TINY:
        breaks.append(1.0)
        slopes.append(float(min(1.0, ratios[-1])))
    return PWLConvex.from_slopes(np.array(breaks), np.array(slopes))


def mechanism_from(z, ua):
    """Menus whose indirect utilities are exactly (ua, ub_from(z, ua))."""
    ub = ub_from(z, ua)
    menu_a = ua.to_menu()
    menu_b = ub.to_menu()
    if not menu_a or not menu_b:
        raise InfeasiblePairError(
            "pair implies an identically-zero indirect utility; no menu exists"
        )
    return Mechanism(menu_a, menu_b)


def extract_boundary(mech):
    """Indifference curve of a mechanism's two indirect utilities.

    Solves U_A(a) = U_B(z(a)) exactly (both are piecewise linear), starting
    at the lowest participating values.  Orientation follows whichever
    utility tops out first.
    """
    ua = mech.indirect_a()
    ub = mech.indirect_b()
    if ua.y[-1] <= _TINY:
        raise DegenerateMechanismError("menu A is never chosen by any type")
    if ub.y[-1] <= _TINY:
        raise DegenerateMechanismError("menu B is never chosen by any type")
    a_low = ua.first_positive()
    if ua.y[-1] >= ub.y[-1]:
        a_bar = ua.inverse_sup(ub.y[-1])
        u_top = ub.y[-1]
    else:
        a_bar = 1.0
        u_top = ua.y[-1]
    cand = [a_low, a_bar]
    cand.extend(float(xk) for xk in ua.x if a_low < xk < a_bar)
    for u in ub.y:
        if _TINY < u < u_top:
            av = ua.inverse_sup(float(u))
            if a_low < av < a_bar:
                cand.append(av)
    cand = np.array(sorted(cand))
    keep = np.concatenate(([True], np.diff(cand) > 1e-9))
    cand = cand[keep]
    knots = []
    for a in cand:
        knots.append((float(a), float(ub.inverse_sup(float(ua.value(a))))))
    return Boundary(knots)


def wstar_welfare(z, ua, model):
    """Boundary-form welfare: ua(1) - int ua'(a) F(a, z-hat(a)) da, exact.

    The A-side identity accounts for all welfare only when the boundary
    reaches the ceiling; a right-wall boundary leaves the B-utility's
    stretch above b_bar outside the integrand's reach.  The two goods are
    symmetric, so that case is evaluated on the transposed problem, whose
    boundary is canonical, and the value is total welfare for every valid
    pair.
    """
    if z.orientation == "a":
        return wstar_welfare(z.inverse(), ub_from(z, ua), model.transpose())
    x0s, x1s, y0s, y1s = z.extended_pieces(extra_breaks=ua.x)
    mids = 0.5 * (x0s + x1s)
    seg = np.clip(np.searchsorted(ua.x, mids, side="right") - 1, 0, len(ua.x) - 2)
    w = ua.slopes()[seg]
    integral = model.pieces_integral(x0s, x1s, y0s, y1s, w, w, use_cdf=True)
    return float(ua.y[-1]) - integral


def brute_force_best_UA(z, model, grid=64):
    """Test oracle: point-wise-greedy slope profile on a refined domain grid.

    Maximizes int ua'(a) (1 - F(a, z-hat(a))) da over step profiles subject
    to ua' non-decreasing, ua'/z' non-decreasing, and both capped at 1.
    The objective's coefficients are non-negative, so taking each cell's
    slope as large as the downstream constraints allow (a backward sweep)
    is optimal.  Also requires ua = 0 below a_low and slope 1 above a_bar,
    the values forced on any implementation of z.  For piecewise-linear
    boundaries the refinement never changes the answer (slopes are constant
    within segments); ``model`` is accepted for signature parity but cannot
    influence the maximizer while the coefficients stay non-negative.
    """
    grid = int(grid)
    if grid < 16:
        raise ValidationError("grid must be >= 16", field="grid")
    seg_slopes = z.slopes()
    da = np.diff(z.ax)
    total = z.a_bar - z.a_low
    cells = []
    for i, s in enumerate(seg_slopes):
        n_i = max(1, int(np.ceil(grid * da[i] / total)))
        for j in range(n_i):
            cells.append((z.ax[i] + da[i] * (j + 1) / n_i, s))
    s_arr = np.array([s for _, s in cells])
    u = np.empty(len(cells))
    u[-1] = min(1.0, s_arr[-1])
    for i in range(len(cells) - 2, -1, -1):
        u[i] = min(1.0, s_arr[i], u[i + 1], s_arr[i] * u[i + 1] / s_arr[i + 1])
    breaks = [0.0]
    slopes = []
    if z.a_low > _TINY:
        breaks.append(z.a_low)
        slopes.append(0.0)
    for (right, _), ui in zip(cells, u):
        breaks.append(float(right))
        slopes.append(float(ui))
    if z.a_bar < 1.0 - _TINY:
        breaks.append(1.0)
        slopes.append(1.0)
    return PWLConvex.from_slopes(np.array(breaks), np.array(slopes))


@dataclass(frozen=True)
class ImplementationBundle:
    """Everything the optimal implementation of one boundary produces."""

    boundary: Boundary
    ua: PWLConvex
    ub: PWLConvex
    mech: Mechanism
    m_profile: StepProfile
    c_scale: float


def implementation_bundle(z):
    """Assemble boundary, utilities, menus, and profile data for z."""
    ua = optimal_UA(z)
    ub = ub_from(z, ua)
    mech = mechanism_from(z, ua)
    return ImplementationBundle(
        boundary=z,
        ua=ua,
        ub=ub,
        mech=mech,
        m_profile=m_profile(z),
        c_scale=c_scale(z),
    )
