"""Piecewise-linear convex indirect-utility curves on [0, 1].

A menu of (quality, ordeal) options induces the indirect utility
``U(v) = max(0, max_i quality_i * v - ordeal_i)``: the upper envelope of
finitely many lines together with the zero line.  Such envelopes are
exactly the non-negative, non-decreasing, convex piecewise-linear
functions with U(0) = 0, which is what :class:`PWLConvex` stores.

The inverse map ``inverse_sup(u) = sup{v : U(v) <= u}`` picks the *largest*
preimage, which matters on the initial flat segment where U is 0.
"""

import numpy as np

from .errors import ConvexityError, DomainError, ValidationError

_TOL = 1e-12


def _dedupe_sorted(xs, tol=1e-13):
    """Drop near-duplicate entries from a sorted 1-D array."""
    if len(xs) == 0:
        return xs
    keep = np.empty(len(xs), dtype=bool)
    keep[0] = True
    keep[1:] = np.diff(xs) > tol
    return xs[keep]


class PWLConvex:
    """Non-negative convex piecewise-linear function on [0, 1] with f(0) = 0.

    ``x`` and ``y`` are the knot coordinates; x is strictly increasing with
    x[0] = 0 and x[-1] = 1, and the segment slopes are non-negative and
    non-decreasing.
    """

    __slots__ = ("x", "y")

    def __init__(self, x, y):
        x = np.asarray(x, dtype=float).copy()
        y = np.asarray(y, dtype=float).copy()
        if x.ndim != 1 or x.shape != y.shape or len(x) < 2:
            raise ValidationError("knot arrays must be 1-D, equal length >= 2")
        if abs(x[0]) > 1e-9 or abs(x[-1] - 1.0) > 1e-9:
            raise DomainError("curve must span [0, 1], got [%g, %g]" % (x[0], x[-1]))
        x[0] = 0.0
        x[-1] = 1.0
        if np.any(np.diff(x) <= 0):
            raise ValidationError("knot x-values must be strictly increasing")
        if abs(y[0]) > 1e-9:
            raise ValidationError("curve must vanish at 0, got f(0) = %g" % y[0])
        y[0] = 0.0
        np.clip(y, 0.0, None, out=y)
        slopes = np.diff(y) / np.diff(x)
        if np.any(np.diff(slopes) < -1e-9):
            raise ConvexityError("segment slopes decrease by more than 1e-9")
        if np.any(slopes < -1e-9):
            raise ConvexityError("curve must be non-decreasing")
        self.x = x
        self.y = y

    # -- construction -------------------------------------------------

    @classmethod
    def from_lines(cls, lines):
        """Upper envelope of ``max(0, s*v - c)`` over (s, c) pairs.

        Standard incremental hull over lines sorted by slope; the implicit
        zero line keeps the result non-negative.
        """
        hull = line_hull(lines)
        xk = [seg[2] for seg in hull] + [1.0]
        yk = []
        for i, (s, b, x0) in enumerate(hull):
            yk.append(max(0.0, s * xk[i] + b))
        yk.append(max(0.0, hull[-1][0] + hull[-1][1]))
        return cls(np.array(xk), np.array(yk))

    @classmethod
    def from_slopes(cls, breaks, slopes):
        """Curve with f(0) = 0 and the given slope on each break interval."""
        breaks = np.asarray(breaks, dtype=float)
        slopes = np.asarray(slopes, dtype=float)
        if len(breaks) != len(slopes) + 1:
            raise ValidationError("need one more break than slopes")
        y = np.concatenate(([0.0], np.cumsum(slopes * np.diff(breaks))))
        return cls(breaks, y)

    # -- evaluation ---------------------------------------------------

    def value(self, v):
        return np.interp(v, self.x, self.y)

    __call__ = value

    def slopes(self):
        return np.diff(self.y) / np.diff(self.x)

    def slope_right(self, v):
        """Slope of the segment to the right of v (left of 1 at v = 1)."""
        i = np.searchsorted(self.x, v, side="right") - 1
        i = min(max(i, 0), len(self.x) - 2)
        return (self.y[i + 1] - self.y[i]) / (self.x[i + 1] - self.x[i])

    def slope_left(self, v):
        """Slope of the segment to the left of v (right of 0 at v = 0)."""
        i = np.searchsorted(self.x, v, side="left") - 1
        i = min(max(i, 0), len(self.x) - 2)
        return (self.y[i + 1] - self.y[i]) / (self.x[i + 1] - self.x[i])

    def first_positive(self):
        """sup{v : f(v) <= 0}; equals 1 when f is identically zero."""
        if self.y[-1] <= _TOL:
            return 1.0
        i = int(np.searchsorted(self.y, _TOL, side="right")) - 1
        if i < 0:
            return 0.0
        s = (self.y[i + 1] - self.y[i]) / (self.x[i + 1] - self.x[i])
        return max(0.0, min(self.x[i], self.x[i] - self.y[i] / s))

    def inverse_sup(self, u):
        """sup{v in [0, 1] : f(v) <= u}, clamped to 1 above the range."""
        if u <= _TOL:
            return self.first_positive()
        if u >= self.y[-1]:
            return 1.0
        i = int(np.searchsorted(self.y, u, side="right")) - 1
        s = (self.y[i + 1] - self.y[i]) / (self.x[i + 1] - self.x[i])
        return self.x[i] + (u - self.y[i]) / s

    # -- conversion ---------------------------------------------------

    def to_menu(self):
        """(quality, ordeal) pairs reproducing this curve as an envelope.

        One option per segment of positive slope; flat segments carry no
        option (they are where the outside option binds).
        """
        options = []
        ss = self.slopes()
        for i, s in enumerate(ss):
            if s <= _TOL:
                continue
            c = s * self.x[i] - self.y[i]
            options.append((float(s), float(max(0.0, c))))
        return options

    def max_abs_diff(self, other):
        grid = _dedupe_sorted(np.sort(np.concatenate((self.x, other.x))))
        return float(np.max(np.abs(self.value(grid) - other.value(grid))))

    def __repr__(self):
        return "PWLConvex(%s, %s)" % (self.x.tolist(), self.y.tolist())


def line_hull(lines):
    """Segments of the upper envelope of ``s*v - c`` lines and the zero line.

    ``lines`` holds (slope, ordeal) pairs with slope >= 0.  Returns
    [(slope, intercept, x_start)] in slope order, restricted to [0, 1);
    intercept is -ordeal.  Lines never on top within [0, 1) are absent, so
    the surviving non-zero slopes are exactly the envelope-active options.
    """
    pool = {0.0: 0.0}  # slope -> best (largest) intercept
    for s, c in lines:
        b = -float(c)
        s = float(s)
        if s not in pool or b > pool[s]:
            pool[s] = b
    ordered = sorted(pool.items())
    hull = []  # entries (slope, intercept, x_start)
    for s, b in ordered:
        xs = 0.0
        while hull:
            s0, b0, x0 = hull[-1]
            xs = (b0 - b) / (s - s0)
            if xs <= x0 + 1e-15:
                hull.pop()
            else:
                break
        if not hull:
            hull.append((s, b, 0.0))
        elif xs < 1.0 - 1e-15:
            hull.append((s, b, xs))
    return hull


def merged_breaks(*arrays, lo=0.0, hi=1.0, tol=1e-13):
    """Sorted union of break points restricted to [lo, hi], endpoints included."""
    vals = [np.asarray(a, dtype=float).ravel() for a in arrays]
    allv = np.concatenate([np.array([lo, hi])] + vals)
    allv = allv[(allv >= lo - tol) & (allv <= hi + tol)]
    allv = np.clip(allv, lo, hi)
    return _dedupe_sorted(np.sort(allv), tol)


def response_curve(ua, ub):
    """Knots of a -> ub.inverse_sup(ua(a)) on [first positive of ua, 1].

    The map is piecewise linear; kinks can only sit at knots of ua or at
    preimages under ua of knot heights of ub.  Returns (a_values, b_values);
    fewer than two points means ua is identically zero.
    """
    a0 = ua.first_positive()
    if a0 >= 1.0 - 1e-15:
        return np.array([1.0]), np.array([ub.inverse_sup(0.0)])
    top = ua.y[-1]
    cand = [a0, 1.0]
    cand.extend(float(xk) for xk in ua.x if a0 < xk < 1.0)
    for u in ub.y:
        if _TOL < u < top:
            av = ua.inverse_sup(float(u))
            if a0 < av < 1.0:
                cand.append(av)
    xs = _dedupe_sorted(np.sort(np.array(cand)))
    ys = np.array([ub.inverse_sup(float(ua.value(a))) for a in xs])
    return xs, ys
