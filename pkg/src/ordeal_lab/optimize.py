"""Boundary optimization: supply-preserving lines, slope sweeps, a local
coordinate search over kinked boundaries, and the closed-form comparisons
between ordeal and damage screening.

A boundary splits the square into an A-region (below) and a B-region
(above); "supply-preserving" means those masses equal the supplies.  For a
line of given slope that pins down two scalars (the starting point), found
here by nested bisection.  The local search then perturbs knots of a
piecewise-linear boundary in supply-preserving pairs: one coordinate moves,
another is re-solved to restore the A-mass, and the excluded rectangle is
held fixed so the B-mass follows automatically.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ._backend import worker_count
from .boundary import Boundary, supply_masses
from .errors import (
    BoundaryError,
    InfeasibleSlopeError,
    SolverError,
    ValidationError,
)
from .implement import optimal_UA, wstar_welfare
from .mechanism import Mechanism, demand, direct_welfare

_MASS_TOL = 1e-9
_BISECT_ITERS = 60
_MIN_GAP = 1e-5
_SLOPE_LO = 1e-3
_SLOPE_HI = 1e3


class SweepRow(NamedTuple):
    slope: float
    a_low: float
    b_low: float
    welfare: float
    feasible: bool


@dataclass(frozen=True)
class SweepResult:
    rows: list

    def best_row(self):
        feas = [r for r in self.rows if r.feasible]
        if not feas:
            raise SolverError("no feasible slope in the sweep")
        return max(feas, key=lambda r: r.welfare)


@dataclass(frozen=True)
class SearchResult:
    best_boundary: Boundary
    best_welfare: float
    trace: list
    converged: bool


def _check_supplies(mu_a, mu_b):
    if not (0 < mu_a and np.isfinite(mu_a)):
        raise ValidationError("supply must be positive", field="mu_a")
    if not (0 < mu_b and np.isfinite(mu_b)):
        raise ValidationError("supply must be positive", field="mu_b")
    if mu_a + mu_b > 1.0 + 1e-12:
        raise ValidationError("supplies exceed total mass 1", field="mu_b")


def _line_arrays(a0, b0, slope):
    """Knot arrays of the line from (a0, b0) at the given slope, cut at the
    first wall it reaches."""
    a_top = a0 + (1.0 - b0) / slope
    if a_top <= 1.0:
        return np.array([a0, a_top]), np.array([b0, 1.0])
    return np.array([a0, 1.0]), np.array([b0, b0 + slope * (1.0 - a0)])


def _below_line(model, a0, b0, slope):
    ax, bx = _line_arrays(a0, b0, slope)
    if bx[-1] >= 1.0 - 1e-15 and ax[-1] < 1.0 - 1e-15:
        ax = np.append(ax, 1.0)
        bx = np.append(bx, 1.0)
    return model.mass_below_curve(ax, bx)


def supply_preserving_linear(model, mu_a, mu_b, slope):
    """The linear boundary of the given slope whose regions carry exactly
    the supplies (mass tolerance 1e-6).

    Inner bisection lifts the intercept until the A-region mass matches
    mu_a; outer bisection slides the starting abscissa until the B-region
    mass matches mu_b.  Raises ``InfeasibleSlopeError`` when no such line
    exists within the boundary shape constraints.
    """
    _check_supplies(mu_a, mu_b)
    slope = float(slope)
    if not (slope > 0 and np.isfinite(slope)):
        raise ValidationError("slope must be positive", field="slope")

    a_cap = 1.0 - max(_MIN_GAP, _MIN_GAP / slope)
    b_cap = 1.0 - max(_MIN_GAP, _MIN_GAP * slope)

    def intercept_for(a0):
        """b0 making the below-mass equal mu_a, or None."""
        base = _below_line(model, a0, 0.0, slope)
        if abs(base - mu_a) <= _MASS_TOL:
            return 0.0
        if base > mu_a:
            return None
        # Raising b0 raises the line, so the below-mass grows toward the
        # whole column {a > a0}; check that limit before bisecting.
        if 1.0 - model.marginal_a(a0) < mu_a - _MASS_TOL:
            return None
        lo, hi = 0.0, b_cap
        if _below_line(model, a0, hi, slope) < mu_a - _MASS_TOL:
            return None
        for _ in range(_BISECT_ITERS):
            mid = 0.5 * (lo + hi)
            if _below_line(model, a0, mid, slope) > mu_a:
                hi = mid
            else:
                lo = mid
        return 0.5 * (lo + hi)

    def above_excess(a0, b0):
        ax, bx = _line_arrays(a0, b0, slope)
        inv_ax, inv_bx = bx.copy(), ax.copy()
        if inv_bx[-1] >= 1.0 - 1e-15 and inv_ax[-1] < 1.0 - 1e-15:
            inv_ax = np.append(inv_ax, 1.0)
            inv_bx = np.append(inv_bx, 1.0)
        above = model.mass_below_curve(inv_ax, inv_bx, transposed=True)
        return above - mu_b

    # Bracket the outer variable: a_lo is the smallest a0 whose zero-
    # intercept line already fits within mu_a; a_hi the largest a0 whose
    # column mass can still reach mu_a.
    if _below_line(model, 0.0, 0.0, slope) <= mu_a + _MASS_TOL:
        a_lo = 0.0
    else:
        lo, hi = 0.0, a_cap
        if _below_line(model, hi, 0.0, slope) > mu_a:
            raise InfeasibleSlopeError(
                "slope %g cannot fit the A-supply %g" % (slope, mu_a)
            )
        for _ in range(_BISECT_ITERS):
            mid = 0.5 * (lo + hi)
            if _below_line(model, mid, 0.0, slope) > mu_a:
                lo = mid
            else:
                hi = mid
        a_lo = hi
    lo, hi = a_lo, a_cap
    if 1.0 - model.marginal_a(a_cap) >= mu_a - _MASS_TOL:
        a_hi = a_cap
    else:
        for _ in range(_BISECT_ITERS):
            mid = 0.5 * (lo + hi)
            if 1.0 - model.marginal_a(mid) >= mu_a:
                lo = mid
            else:
                hi = mid
        a_hi = lo
    if a_hi < a_lo - 1e-12:
        raise InfeasibleSlopeError(
            "no starting point fits slope %g with supplies (%g, %g)"
            % (slope, mu_a, mu_b)
        )

    def solved(a0):
        b0 = intercept_for(a0)
        if b0 is None:
            raise InfeasibleSlopeError(
                "intercept solve failed at a0=%g for slope %g" % (a0, slope)
            )
        return b0

    lo, hi = a_lo, a_hi
    f_lo = above_excess(lo, solved(lo))
    if abs(f_lo) <= _MASS_TOL or lo >= hi - 1e-15:
        a0 = lo
    elif f_lo < -_MASS_TOL:
        raise InfeasibleSlopeError(
            "slope %g cannot reach the B-supply %g" % (slope, mu_b)
        )
    else:
        for _ in range(_BISECT_ITERS):
            a0 = 0.5 * (lo + hi)
            if above_excess(a0, solved(a0)) > 0:
                lo = a0
            else:
                hi = a0
        a0 = 0.5 * (lo + hi)
    b0 = solved(a0)
    ax, bx = _line_arrays(a0, b0, slope)
    try:
        z = Boundary(np.column_stack([ax, bx]))
    except BoundaryError as exc:
        raise InfeasibleSlopeError(
            "supply-preserving line at slope %g violates shape constraints: %s"
            % (slope, exc)
        ) from exc
    below, above = supply_masses(z, model)
    if max(abs(below - mu_a), abs(above - mu_b)) > 1e-6:
        raise InfeasibleSlopeError(
            "no supply-preserving line at slope %g: residual (%g, %g)"
            % (slope, below - mu_a, above - mu_b)
        )
    return z


def _sweep_one(model, mu_a, mu_b, slope):
    try:
        z = supply_preserving_linear(model, mu_a, mu_b, slope)
    except InfeasibleSlopeError:
        return SweepRow(float(slope), math.nan, math.nan, math.nan, False)
    w = wstar_welfare(z, optimal_UA(z), model)
    return SweepRow(float(slope), z.a_low, z.b_low, float(w), True)


def slope_sweep(model, mu_a, mu_b, slopes):
    """Welfare of the optimal implementation of each supply-preserving
    line; infeasible slopes are marked, not raised."""
    slopes = [float(s) for s in slopes]
    for s in slopes:
        if not (s > 0 and np.isfinite(s)):
            raise ValidationError("slopes must be positive", field="slopes")
    workers = worker_count()
    if workers > 1 and len(slopes) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(
                pool.map(lambda s: _sweep_one(model, mu_a, mu_b, s), slopes)
            )
    else:
        rows = [_sweep_one(model, mu_a, mu_b, s) for s in slopes]
    return SweepResult(rows=rows)


class _SearchSpace:
    """Coordinate view of a kinked boundary for the local search.

    Knots sit at fixed abscissas except the wall knot; movable coordinates
    are the interior knot heights, the wall knot's position along its wall,
    and the starting knot, which slides along the fixed-rectangle contour
    cdf(a0, b0) = R0 so the B-mass is preserved whenever the A-mass is.
    """

    def __init__(self, model, mu_a, rect_mass, orientation):
        self.model = model
        self.mu_a = mu_a
        self.r0 = rect_mass
        self.orientation = orientation

    def coords(self, ax):
        names = [("start",)] + [("height", i) for i in range(1, len(ax) - 1)]
        names.append(("wall",))
        return names

    def below(self, ax, bx):
        if bx[-1] >= 1.0 - 1e-12 and ax[-1] < 1.0 - 1e-12:
            ax = np.append(ax, 1.0)
            bx = np.append(bx, 1.0)
        return self.model.mass_below_curve(ax, bx)

    def get(self, ax, bx, coord):
        if coord[0] == "height":
            return bx[coord[1]]
        if coord[0] == "wall":
            return ax[-1] if self.orientation == "b" else bx[-1]
        return ax[0]

    def bounds(self, ax, bx, coord):
        if coord[0] == "height":
            i = coord[1]
            ga_l = ax[i] - ax[i - 1]
            ga_r = ax[i + 1] - ax[i]
            lo = bx[i - 1] + max(_MIN_GAP, _SLOPE_LO * ga_l)
            hi = bx[i + 1] - max(_MIN_GAP, _SLOPE_LO * ga_r)
            lo = max(lo, bx[i + 1] - _SLOPE_HI * ga_r)
            hi = min(hi, bx[i - 1] + _SLOPE_HI * ga_l)
            return lo, hi
        if coord[0] == "wall":
            if self.orientation == "b":
                rise = 1.0 - bx[-2]
                lo = ax[-2] + max(_MIN_GAP, rise / _SLOPE_HI)
                hi = min(1.0, ax[-2] + rise / _SLOPE_LO)
            else:
                run = 1.0 - ax[-2]
                lo = bx[-2] + max(_MIN_GAP, _SLOPE_LO * run)
                hi = min(1.0, bx[-2] + _SLOPE_HI * run)
            return lo, hi
        # start knot: abscissa range; the ordinate follows the contour
        return 0.0, ax[1] - _MIN_GAP

    def iso_b(self, a0):
        """Ordinate keeping cdf(a0, b0) = R0, or None."""
        if self.r0 <= 1e-14:
            return 0.0
        if a0 <= 1e-14:
            return None
        if self.model.cdf(a0, 1.0) < self.r0 - 1e-12:
            return None
        lo, hi = 0.0, 1.0
        for _ in range(_BISECT_ITERS):
            mid = 0.5 * (lo + hi)
            if self.model.cdf(a0, mid) > self.r0:
                hi = mid
            else:
                lo = mid
        return 0.5 * (lo + hi)

    def set(self, ax, bx, coord, value):
        """Arrays with the coordinate set, or None when invalid."""
        ax = ax.copy()
        bx = bx.copy()
        if coord[0] == "height":
            bx[coord[1]] = value
        elif coord[0] == "wall":
            if self.orientation == "b":
                ax[-1] = value
            else:
                bx[-1] = value
        else:
            b0 = self.iso_b(value)
            if b0 is None or b0 >= bx[1] - _MIN_GAP:
                return None
            ax[0] = value
            bx[0] = b0
        return ax, bx

    def restore(self, ax, bx, moved):
        """Re-solve one other coordinate so the below-mass matches mu_a."""
        err = self.below(ax, bx) - self.mu_a
        if abs(err) <= _MASS_TOL:
            return ax, bx
        candidates = [
            c for c in self.coords(ax) if c != moved and c[0] != "start"
        ]

        def sensitivity(coord):
            v = self.get(ax, bx, coord)
            lo, hi = self.bounds(ax, bx, coord)
            eps = min(1e-4, 0.25 * (hi - lo))
            if eps <= 0:
                return 0.0
            v2 = v + eps if v + eps <= hi else v - eps
            trial = self.set(ax, bx, coord, v2)
            if trial is None:
                return 0.0
            return abs(self.below(*trial) - self.mu_a - err) / eps

        for coord in sorted(candidates, key=sensitivity, reverse=True):
            lo, hi = self.bounds(ax, bx, coord)
            if hi <= lo:
                continue
            t_lo = self.set(ax, bx, coord, lo)
            t_hi = self.set(ax, bx, coord, hi)
            if t_lo is None or t_hi is None:
                continue
            f_lo = self.below(*t_lo) - self.mu_a
            f_hi = self.below(*t_hi) - self.mu_a
            if f_lo * f_hi > 0:
                continue
            if f_hi < f_lo:
                lo, hi = hi, lo
            for _ in range(_BISECT_ITERS):
                mid = 0.5 * (lo + hi)
                trial = self.set(ax, bx, coord, mid)
                f_mid = self.below(*trial) - self.mu_a
                if abs(f_mid) <= 0.1 * _MASS_TOL:
                    break
                if f_mid < 0:
                    lo = mid
                else:
                    hi = mid
            trial = self.set(ax, bx, coord, 0.5 * (lo + hi))
            if trial is None:
                continue
            if abs(self.below(*trial) - self.mu_a) <= 100 * _MASS_TOL:
                return trial
        return None


def _search_eval(model, ax, bx):
    try:
        z = Boundary(np.column_stack([ax, bx]))
    except BoundaryError:
        return None, -math.inf
    try:
        w = wstar_welfare(z, optimal_UA(z), model)
    except (ValidationError, SolverError):
        return None, -math.inf
    return z, w


def _densify_line(z, n_knots):
    """Replace a two-knot line with n_knots collinear knots."""
    while n_knots >= 2:
        ax = np.linspace(z.ax[0], z.ax[-1], n_knots)
        bx = np.linspace(z.bx[0], z.bx[-1], n_knots)
        try:
            Boundary(np.column_stack([ax, bx]))
            return ax, bx
        except BoundaryError:
            n_knots -= 1
    raise SolverError("cannot densify the initial line")


def _search_from(model, mu_a, mu_b, z0, n_knots, max_candidates):
    ax, bx = _densify_line(z0, n_knots)
    space = _SearchSpace(
        model, mu_a, model.cdf(ax[0], bx[0]), z0.orientation
    )
    z, w = _search_eval(model, ax, bx)
    trace = [(0, w)]
    tried = 0
    steps = [0.04, 0.016, 0.0064, 0.00256, 0.001, 4e-4, 1.6e-4, 1e-4]
    capped = False
    for step in steps:
        improving = True
        while improving and not capped:
            improving = False
            for coord in space.coords(ax):
                for sign in (1.0, -1.0):
                    if tried >= max_candidates:
                        capped = True
                        break
                    tried += 1
                    v = space.get(ax, bx, coord)
                    lo, hi = space.bounds(ax, bx, coord)
                    v2 = min(max(v + sign * step, lo), hi)
                    if abs(v2 - v) < 0.25 * step:
                        continue
                    moved = space.set(ax, bx, coord, v2)
                    if moved is None:
                        continue
                    restored = space.restore(moved[0], moved[1], coord)
                    if restored is None:
                        continue
                    z2, w2 = _search_eval(model, *restored)
                    if z2 is not None and w2 >= w + 1e-7:
                        ax, bx = restored
                        z, w = z2, w2
                        trace.append((len(trace), w))
                        improving = True
                if capped:
                    break
    return z, w, trace, not capped


def local_boundary_search(
    model, mu_a, mu_b, n_knots, seed=0, restarts=5, max_candidates=1500
):
    """Coordinate-ascent over supply-preserving boundary perturbations.

    Each move shifts one coordinate by the current step and re-solves the
    most mass-sensitive other coordinate to restore the A-region supply;
    the excluded rectangle is held fixed so the B-region follows.  Steps
    shrink from 0.04 to 1e-4; a move is kept when welfare gains at least
    1e-7.  Restarts begin from supply-preserving lines: slope 1 plus
    ``restarts - 1`` random slopes in [0.5, 2].
    """
    n_knots = int(n_knots)
    if not 2 <= n_knots <= 16:
        raise ValidationError("n_knots must lie in [2, 16]", field="n_knots")
    _check_supplies(mu_a, mu_b)
    rng = np.random.default_rng(seed)
    slopes = [1.0] + list(rng.uniform(0.5, 2.0, size=max(0, restarts - 1)))
    starts = []
    for s in slopes:
        try:
            starts.append(supply_preserving_linear(model, mu_a, mu_b, s))
        except InfeasibleSlopeError:
            continue
    if not starts:
        raise SolverError("no feasible starting line for any restart slope")
    best = None
    for z0 in starts:
        z, w, trace, finished = _search_from(
            model, mu_a, mu_b, z0, n_knots, max_candidates
        )
        if z is None:
            continue
        if best is None or w > best[1]:
            best = (z, w, trace, finished)
    if best is None:
        raise SolverError("search failed from every starting line")
    return SearchResult(
        best_boundary=best[0],
        best_welfare=float(best[1]),
        trace=best[2],
        converged=bool(best[3]),
    )


def single_good_compare(f_a, b_out, cutoff):
    """Welfare of ordeal vs damage screening in the one-good reduction.

    Agents hold an outside option worth ``b_out``.  The ordeal mechanism
    offers the good undamaged at ordeal cutoff - b_out (the cutoff type is
    exactly indifferent); the damage mechanism offers quality
    b_out / cutoff free.  Both serve {a > cutoff}; welfare integrates the
    chosen payoff against the density ``f_a`` (a cell-array on [0, 1], or
    None for uniform).
    """
    b_out = float(b_out)
    cutoff = float(cutoff)
    if not 0.0 < b_out < 1.0:
        raise ValidationError("must lie in (0, 1)", field="b_out")
    if not 0.0 < cutoff < 1.0:
        raise ValidationError("must lie in (0, 1)", field="cutoff")
    if cutoff <= b_out:
        raise ValidationError(
            "cutoff %g <= b_out %g: the good cannot deter" % (cutoff, b_out),
            field="cutoff",
        )
    if f_a is None:
        cells = np.ones(1)
    else:
        cells = np.asarray(f_a, dtype=float)
        if cells.ndim != 1 or cells.size == 0:
            raise ValidationError("need a one-dimensional cell array", field="f_a")
        if not np.all(np.isfinite(cells)) or np.any(cells < 0):
            raise ValidationError("cells must be finite and >= 0", field="f_a")
        if cells.sum() <= 0:
            raise ValidationError("density must have positive mass", field="f_a")
    cells = cells / cells.mean()
    n = cells.size
    h = 1.0 / n
    left = np.arange(n) * h
    right = left + h
    lo = np.clip(cutoff, left, right)
    mass_above = float(np.sum(cells * (right - lo)))
    moment_above = float(np.sum(cells * 0.5 * (right**2 - lo**2)))
    keep = b_out * (1.0 - mass_above)
    w_ordeal = keep + moment_above - (cutoff - b_out) * mass_above
    w_damage = keep + (b_out / cutoff) * moment_above
    return w_ordeal, w_damage


def example1_compare(epsilon, k):
    """Welfare of the ordeal-only clearing mechanism vs the damage ray on
    the band density, at supplies (1 - k - epsilon, k + epsilon).

    The ordeal mechanism gives A free and B at ordeal 1/2; its demands are
    verified against the supplies within 1e-3.  The damage mechanism gives
    A free and B at quality q, no ordeal, with q bisected so good B clears.
    """
    from .dist import DensityModel

    epsilon = float(epsilon)
    k = float(k)
    if not 0.0 < epsilon <= 0.1:
        raise ValidationError("must lie in (0, 0.1]", field="epsilon")
    model = DensityModel.example1(epsilon, k)
    mu_a = 1.0 - k - epsilon
    mu_b = k + epsilon
    ordeal = Mechanism([(1.0, 0.0)], [(1.0, 0.5)])
    d = demand(ordeal, model)
    if max(abs(d[0] - mu_a), abs(d[1] - mu_b)) > 1e-3:
        raise SolverError(
            "ordeal benchmark demands (%g, %g) do not match supplies (%g, %g)"
            % (d[0], d[1], mu_a, mu_b)
        )
    w_ordeal = direct_welfare(ordeal, model)

    def excess(q):
        mech = Mechanism([(1.0, 0.0)], [(q, 0.0)])
        return demand(mech, model)[1] - mu_b

    lo, hi = 1e-9, 1.0 - 1e-12
    if excess(hi) < -1e-6:
        raise SolverError("good B cannot clear at any damage level")
    q = hi
    for _ in range(80):
        q = 0.5 * (lo + hi)
        e = excess(q)
        if abs(e) <= 1e-12:
            break
        if e < 0:
            lo = q
        else:
            hi = q
    if abs(excess(q)) > 1e-6:
        raise SolverError("damage level solve failed: residual %g" % excess(q))
    w_damage = direct_welfare(Mechanism([(1.0, 0.0)], [(q, 0.0)]), model)
    return w_ordeal, w_damage


def stationarity_diagnostic(z, model, n_samples=129):
    """Profile of partial_mass_a / density along the boundary.

    A strictly monotone profile certifies the interior stationarity
    condition of the optimal-control argument fails on every subinterval.
    Points where the density sits at the floor get a NaN rate.
    """
    from .pwl import merged_breaks

    grid = merged_breaks(
        z.ax, np.linspace(z.a_low, z.a_bar, int(n_samples)),
        lo=z.a_low, hi=z.a_bar,
    )
    out = []
    for a in grid:
        b = z.value(a)
        den = model.density(a, b)
        if den < 1e-12:
            out.append((float(a), math.nan))
        else:
            out.append((float(a), model.partial_mass_a(a, b) / den))
    return out
