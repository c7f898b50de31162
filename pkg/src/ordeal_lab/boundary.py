"""Sorting-boundary geometry and the feasibility test for (boundary, U_A) pairs.

A boundary is the strictly increasing piecewise-linear curve of types
indifferent between their best A- and B-options.  It starts at the lowest
participating values (a_low, b_low) and runs to one of the square's far
walls; types below it (large a relative to b) take good A, types above take
B, and the rectangle [0, a_low] x [0, b_low] is excluded.

The extension z-hat clamps the curve to 0 below its domain and 1 above it,
which is the form entering the welfare functional and the supply integrals.
"""

import numpy as np

from .errors import BoundaryError
from .pwl import merged_breaks

_MIN_SPACING = 1e-6
_MIN_SLOPE = 1e-6
_MAX_SLOPE = 1e6
_WALL_TOL = 1e-9


class Boundary:
    """Strictly increasing piecewise-linear curve from (a_low, b_low) to a wall.

    ``orientation`` records which wall the last knot sits on: 'b' when it
    reaches b = 1 (possibly at the corner), 'a' when it reaches a = 1 with
    b < 1.
    """

    __slots__ = ("ax", "bx", "orientation", "_T")

    def __init__(self, knots):
        knots = np.asarray(knots, dtype=float)
        if knots.ndim != 2 or knots.shape[1] != 2 or knots.shape[0] < 2:
            raise BoundaryError("need at least two (a, b) knots", field="knots")
        if not np.all(np.isfinite(knots)):
            raise BoundaryError("knots must be finite", field="knots")
        ax = knots[:, 0].copy()
        bx = knots[:, 1].copy()
        if ax.min() < -_WALL_TOL or bx.min() < -_WALL_TOL:
            raise BoundaryError("knots must lie in the unit square", field="knots")
        if ax.max() > 1.0 + _WALL_TOL or bx.max() > 1.0 + _WALL_TOL:
            raise BoundaryError("knots must lie in the unit square", field="knots")
        np.clip(ax, 0.0, 1.0, out=ax)
        np.clip(bx, 0.0, 1.0, out=bx)
        da = np.diff(ax)
        db = np.diff(bx)
        if np.any(da < _MIN_SPACING * (1 - 1e-9)) or np.any(
            db < _MIN_SPACING * (1 - 1e-9)
        ):
            raise BoundaryError(
                "knots must increase by at least %g in both coordinates"
                % _MIN_SPACING,
                field="knots",
            )
        slopes = db / da
        if np.any(slopes < _MIN_SLOPE * (1 - 1e-9)) or np.any(
            slopes > _MAX_SLOPE * (1 + 1e-9)
        ):
            raise BoundaryError(
                "segment slopes must lie in [%g, %g]" % (_MIN_SLOPE, _MAX_SLOPE),
                field="knots",
            )
        on_top = abs(bx[-1] - 1.0) <= _WALL_TOL
        on_right = abs(ax[-1] - 1.0) <= _WALL_TOL
        if not on_top and not on_right:
            raise BoundaryError(
                "last knot must reach a wall (a = 1 or b = 1), got (%g, %g)"
                % (ax[-1], bx[-1]),
                field="knots",
            )
        if on_top:
            bx[-1] = 1.0
            self.orientation = "b"
        else:
            self.orientation = "a"
        if on_right:
            ax[-1] = 1.0
        if np.any(bx[:-1] >= 1.0) or np.any(ax[:-1] >= 1.0):
            raise BoundaryError(
                "only the last knot may touch a wall", field="knots"
            )
        self.ax = ax
        self.bx = bx
        self._T = None

    # -- metadata -------------------------------------------------------

    @property
    def a_low(self):
        return float(self.ax[0])

    @property
    def b_low(self):
        return float(self.bx[0])

    @property
    def a_bar(self):
        return float(self.ax[-1])

    @property
    def b_bar(self):
        return float(self.bx[-1])

    @property
    def knots(self):
        return [(float(a), float(b)) for a, b in zip(self.ax, self.bx)]

    def slopes(self):
        return np.diff(self.bx) / np.diff(self.ax)

    def __eq__(self, other):
        if not isinstance(other, Boundary):
            return NotImplemented
        return (
            self.ax.shape == other.ax.shape
            and np.array_equal(self.ax, other.ax)
            and np.array_equal(self.bx, other.bx)
        )

    def __hash__(self):
        return hash((self.ax.tobytes(), self.bx.tobytes()))

    def __repr__(self):
        return "Boundary(%s)" % (self.knots,)

    # -- evaluation -----------------------------------------------------

    def extended(self, a):
        """z-hat: 0 strictly below a_low, the curve on its domain, 1 above a_bar."""
        a_arr = np.asarray(a, dtype=float)
        out = np.interp(a_arr, self.ax, self.bx)
        out = np.where(a_arr < self.ax[0], 0.0, out)
        out = np.where(a_arr > self.ax[-1], 1.0, out)
        if np.isscalar(a):
            return float(out)
        return out

    def value(self, a):
        """The curve itself on [a_low, a_bar] (clamped interpolation)."""
        return float(np.interp(a, self.ax, self.bx))

    def inverse(self):
        """Knot-swapped boundary of the transposed problem; an involution."""
        if self._T is None:
            inv = Boundary(np.column_stack([self.bx, self.ax]))
            inv._T = self
            self._T = inv
        return self._T

    def extended_inverse(self, b):
        return self.inverse().extended(b)

    # -- integral-ready curves -------------------------------------------

    def supply_curve(self):
        """Knots of z-hat over [a_low, 1]: the curve plus the height-1 shelf."""
        xs = self.ax
        ys = self.bx
        if self.orientation == "b" and self.a_bar < 1.0 - 1e-15:
            xs = np.append(xs, 1.0)
            ys = np.append(ys, 1.0)
        return xs, ys

    def extended_pieces(self, extra_breaks=None):
        """Linear pieces (x0s, x1s, y0s, y1s) of z-hat over all of [0, 1].

        The flat-zero stretch below a_low is its own piece, preserving the
        jump at a_low.  ``extra_breaks`` forces additional piece boundaries
        (used to align with utility-curve knots).
        """
        xs, ys = self.supply_curve()
        if extra_breaks is not None:
            grid = merged_breaks(xs, np.asarray(extra_breaks), lo=xs[0], hi=xs[-1])
            ys = self.extended(grid)
            xs = grid
        x0s = list(xs[:-1])
        x1s = list(xs[1:])
        y0s = list(ys[:-1])
        y1s = list(ys[1:])
        if xs[0] > 1e-15:
            x0s.insert(0, 0.0)
            x1s.insert(0, xs[0])
            y0s.insert(0, 0.0)
            y1s.insert(0, 0.0)
        return (np.array(x0s), np.array(x1s), np.array(y0s), np.array(y1s))


def supply_masses(z, model):
    """(below, above): masses of the A-region and the B-region.

    below = mass{a > a_low, b < z-hat(a)}; above = mass{b > b_low,
    a < z-hat^{-1}(b)}.  They partition the square with the excluded
    rectangle.
    """
    xs, ys = z.supply_curve()
    below = model.mass_below_curve(xs, ys)
    xi, yi = z.inverse().supply_curve()
    above = model.mass_below_curve(xi, yi, transposed=True)
    return below, above


class FeasibilityReport:
    """Outcome of the four-condition feasibility test for a (z, U_A) pair."""

    __slots__ = ("feasible", "ua_monotone", "ratio_monotone", "slopes_ok", "supply_ok", "slack")

    def __init__(self, ua_monotone, ratio_monotone, slopes_ok, supply_ok, slack):
        self.ua_monotone = bool(ua_monotone)
        self.ratio_monotone = bool(ratio_monotone)
        self.slopes_ok = bool(slopes_ok)
        self.supply_ok = bool(supply_ok)
        self.slack = (float(slack[0]), float(slack[1]))
        self.feasible = (
            self.ua_monotone and self.ratio_monotone and self.slopes_ok and self.supply_ok
        )

    def __repr__(self):
        return (
            "FeasibilityReport(feasible=%s, ua_monotone=%s, ratio_monotone=%s, "
            "slopes_ok=%s, supply_ok=%s, slack=(%g, %g))"
            % (
                self.feasible,
                self.ua_monotone,
                self.ratio_monotone,
                self.slopes_ok,
                self.supply_ok,
                *self.slack,
            )
        )


def pair_slope_grid(z, ua):
    """Merged break grid on [a_low, a_bar] with per-interval (ua', z') slopes."""
    grid = merged_breaks(z.ax, ua.x, lo=z.a_low, hi=z.a_bar)
    mids = 0.5 * (grid[:-1] + grid[1:])
    u_slopes = np.array([ua.slope_right(m) for m in mids])
    iz = np.clip(np.searchsorted(z.ax, mids, side="right") - 1, 0, len(z.ax) - 2)
    z_slopes = z.slopes()[iz]
    return grid, u_slopes, z_slopes


def check_feasible_pair(z, ua, model, mu_a, mu_b, tol=1e-6):
    """Test the four feasibility conditions for implementing z with utility ua.

    (1) ua slopes non-decreasing over [0, 1]; (2) ua'/z' non-decreasing over
    the boundary domain; (3) boundary slopes within bounds (guaranteed by
    the Boundary type, re-verified); (4) supply masses within the supplies
    plus ``tol``.  ``slack`` records supplies minus masses.
    """
    slack_tol = 1e-9
    ua_slopes = ua.slopes()
    ua_monotone = bool(np.all(np.diff(ua_slopes) >= -slack_tol))
    _, u_s, z_s = pair_slope_grid(z, ua)
    ratios = u_s / z_s
    ratio_monotone = bool(np.all(np.diff(ratios) >= -slack_tol))
    zs = z.slopes()
    slopes_ok = bool(
        np.all(zs >= _MIN_SLOPE * (1 - 1e-9)) and np.all(zs <= _MAX_SLOPE * (1 + 1e-9))
    )
    below, above = supply_masses(z, model)
    supply_ok = below <= mu_a + tol and above <= mu_b + tol
    return FeasibilityReport(
        ua_monotone=ua_monotone,
        ratio_monotone=ratio_monotone,
        slopes_ok=slopes_ok,
        supply_ok=supply_ok,
        slack=(mu_a - below, mu_b - above),
    )
