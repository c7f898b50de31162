"""Value distributions on the unit square and the anti-hazard condition checks.

Four families are supported, all immutable after construction:

``uniform``
    density 1 everywhere; every integral closed-form.
``grid``
    piecewise-constant on an N x N uniform grid of cells (first index is the
    a-cell, second the b-cell); normalized at construction.  Exact per-cell
    integration, no quadrature error.
``example1``
    the banded counterexample density: mass ``epsilon`` on the far side of
    the diagonal band {b - a >= 1/2 + epsilon}, mass ``k`` inside the band
    {1/2 <= b - a < 1/2 + epsilon}, and the rest spread below, each region
    uniform.  Discontinuous by construction.
``affine``
    density c0 + ca*a + cb*b, normalized; the simplest smooth non-uniform
    family.

The module also hosts the monotone-anti-hazard condition checker (the
market-clearing optimality condition) and the heterogeneous-cost
transformation that folds per-agent ordeal-cost rates into a weighted grid
model.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .errors import DomainError, ValidationError

_FLOOR = 1e-12
_SLACK = 1e-9

_CLOSED = (
    np.zeros((1, 1)),
    np.zeros((1, 2)),
    np.zeros((1, 2)),
    np.zeros((2, 2)),
)


def _grid_pack_parts(cells):
    """colcum / rowcum / corner prefix tables for a normalized cell array."""
    n = cells.shape[0]
    h = 1.0 / n
    zero_col = np.zeros((n, 1))
    colcum = np.hstack([zero_col, np.cumsum(cells, axis=1)]) * h
    cellsT = np.ascontiguousarray(cells.T)
    rowcum = np.hstack([zero_col, np.cumsum(cellsT, axis=1)]) * h
    corner = np.zeros((n + 1, n + 1))
    corner[1:, 1:] = np.cumsum(np.cumsum(cells, axis=0), axis=1) * (h * h)
    return colcum, rowcum, corner


class DensityModel:
    """Probability density on [0, 1]^2 with exact mass and cdf queries."""

    __slots__ = ("kind", "cells", "epsilon", "k", "coeffs", "_args", "_argsT", "_T")

    def __init__(self):
        raise TypeError(
            "use DensityModel.uniform/grid/example1/affine or load_grid_csv"
        )

    @classmethod
    def _raw(cls):
        obj = object.__new__(cls)
        obj.cells = None
        obj.epsilon = None
        obj.k = None
        obj.coeffs = None
        obj._T = None
        return obj

    @classmethod
    def uniform(cls):
        obj = cls._raw()
        obj.kind = "uniform"
        obj._args = (K.KIND_UNIFORM, *_CLOSED, 1, 0.0, 0.0, 0.0)
        obj._argsT = obj._args
        return obj

    @classmethod
    def grid(cls, cells):
        cells = np.asarray(cells, dtype=float)
        if cells.ndim != 2 or cells.shape[0] != cells.shape[1]:
            raise ValidationError("grid must be a square 2-D array", field="grid")
        if cells.shape[0] < 1:
            raise ValidationError("grid must be at least 1x1", field="grid")
        if np.any(cells < 0) or not np.all(np.isfinite(cells)):
            raise ValidationError(
                "cell densities must be finite and non-negative", field="grid"
            )
        n = cells.shape[0]
        total = cells.sum() / (n * n)
        if total <= 0:
            raise ValidationError("grid carries no mass", field="grid")
        cells = cells / total
        obj = cls._raw()
        obj.kind = "grid"
        obj.cells = cells
        colcum, rowcum, corner = _grid_pack_parts(cells)
        cellsT = np.ascontiguousarray(cells.T)
        obj._args = (K.KIND_GRID, cells, colcum, rowcum, corner, n, 0.0, 0.0, 0.0)
        obj._argsT = (K.KIND_GRID, cellsT, rowcum, colcum, corner.T.copy(), n, 0.0, 0.0, 0.0)
        return obj

    @classmethod
    def example1(cls, epsilon, k):
        epsilon = float(epsilon)
        k = float(k)
        if not 0.0 < epsilon < 0.5:
            raise DomainError("epsilon must lie in (0, 1/2)", field="epsilon")
        if not 0.0 < k < 1.0:
            raise DomainError("k must lie in (0, 1)", field="k")
        if epsilon + k >= 1.0:
            raise DomainError("epsilon + k must be < 1", field="k")
        obj = cls._raw()
        obj.kind = "example1"
        obj.epsilon = epsilon
        obj.k = k
        obj._args = (K.KIND_BANDS, *_CLOSED, 1, epsilon, k, 1.0)
        obj._argsT = (K.KIND_BANDS, *_CLOSED, 1, epsilon, k, -1.0)
        return obj

    @classmethod
    def affine(cls, c0, ca, cb):
        c0, ca, cb = float(c0), float(ca), float(cb)
        total = c0 + 0.5 * (ca + cb)
        if total <= 0:
            raise ValidationError("density integrates to a non-positive total")
        c0, ca, cb = c0 / total, ca / total, cb / total
        corners = [c0, c0 + ca, c0 + cb, c0 + ca + cb]
        if min(corners) < 0:
            raise DomainError("affine density is negative somewhere on the square")
        obj = cls._raw()
        obj.kind = "affine"
        obj.coeffs = (c0, ca, cb)
        obj._args = (K.KIND_AFFINE, *_CLOSED, 1, c0, ca, cb)
        obj._argsT = (K.KIND_AFFINE, *_CLOSED, 1, c0, cb, ca)
        return obj

    # -- point queries --------------------------------------------------

    @staticmethod
    def _check_point(a, b):
        if not (0.0 <= a <= 1.0 and 0.0 <= b <= 1.0):
            raise DomainError("point (%g, %g) outside the unit square" % (a, b))

    def density(self, a, b):
        self._check_point(a, b)
        return float(K.density_kernel(*self._args, float(a), float(b)))

    def cdf(self, a, b):
        self._check_point(a, b)
        return float(K.cdf_kernel(*self._args, float(a), float(b)))

    def partial_mass_b(self, a, b):
        """int_0^b f(a, w) dw."""
        self._check_point(a, b)
        return float(K.colmass_kernel(*self._args, float(a), float(b)))

    def partial_mass_a(self, a, b):
        """int_0^a f(v, b) dv."""
        self._check_point(a, b)
        return float(K.colmass_kernel(*self._argsT, float(b), float(a)))

    def inv_anti_hazard_a(self, a, b):
        """partial_mass_a / density; errors where the density sits at the floor."""
        den = self.density(a, b)
        if den < _FLOOR:
            raise DomainError(
                "density %g below floor %g at (%g, %g); ratio undefined"
                % (den, _FLOOR, a, b)
            )
        return self.partial_mass_a(a, b) / den

    def inv_anti_hazard_b(self, a, b):
        den = self.density(a, b)
        if den < _FLOOR:
            raise DomainError(
                "density %g below floor %g at (%g, %g); ratio undefined"
                % (den, _FLOOR, a, b)
            )
        return self.partial_mass_b(a, b) / den

    def marginal_a(self, a):
        return self.cdf(a, 1.0)

    def marginal_b(self, b):
        return self.cdf(1.0, b)

    # -- curve integrals -------------------------------------------------

    def transpose(self):
        """Model of the swapped pair (b, a); an involution."""
        if self._T is None:
            obj = DensityModel._raw()
            obj.kind = self.kind
            obj.epsilon = self.epsilon
            obj.k = self.k
            if self.cells is not None:
                obj.cells = self._argsT[1]
            if self.coeffs is not None:
                c0, ca, cb = self.coeffs
                obj.coeffs = (c0, cb, ca)
            obj._args = self._argsT
            obj._argsT = self._args
            obj._T = self
            self._T = obj
        return self._T

    def pieces_integral(
        self, x0s, x1s, y0s, y1s, w0s=None, w1s=None, use_cdf=False, transposed=False
    ):
        """Sum over pieces of int w(a) G(a, y(a)) da; see the kernel module.

        ``transposed`` integrates against the swapped-coordinate model, i.e.
        the sweep variable is b and the curve heights are a-values.
        """
        x0s = np.ascontiguousarray(x0s, dtype=float)
        x1s = np.ascontiguousarray(x1s, dtype=float)
        y0s = np.ascontiguousarray(y0s, dtype=float)
        y1s = np.ascontiguousarray(y1s, dtype=float)
        if w0s is None:
            w0s = np.ones_like(x0s)
            w1s = w0s
        else:
            w0s = np.ascontiguousarray(w0s, dtype=float)
            w1s = np.ascontiguousarray(w1s, dtype=float)
        args = self._argsT if transposed else self._args
        return float(
            K.sweep_kernel(*args, x0s, x1s, y0s, y1s, w0s, w1s, bool(use_cdf))
        )

    def curve_integral(self, xs, ys, weights=None, use_cdf=False, transposed=False):
        """Integral along a piecewise-linear curve given by knot arrays.

        ``weights`` are per-knot values of a weight function linear between
        knots (default 1).
        """
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        if len(xs) < 2:
            return 0.0
        w0s = w1s = None
        if weights is not None:
            weights = np.asarray(weights, dtype=float)
            w0s, w1s = weights[:-1], weights[1:]
        return self.pieces_integral(
            xs[:-1], xs[1:], ys[:-1], ys[1:], w0s, w1s, use_cdf, transposed
        )

    def mass_below_curve(self, xs, ys, transposed=False):
        """Mass of {(a, b) : b < y(a)} over the curve's a-range."""
        return self.curve_integral(xs, ys, None, False, transposed)

    def __repr__(self):
        extra = ""
        if self.kind == "example1":
            extra = "(epsilon=%g, k=%g)" % (self.epsilon, self.k)
        elif self.kind == "grid":
            extra = "(n=%d)" % self.cells.shape[0]
        elif self.kind == "affine":
            extra = "(%g, %g, %g)" % self.coeffs
        return "DensityModel.%s%s" % (self.kind, extra)


# -- grid CSV interchange ------------------------------------------------


def load_grid_csv(path):
    """Read a grid density: header line ``density,N`` then N rows of N cells.

    Row i holds the cells with a in [i/N, (i+1)/N); column j the matching
    b-interval.
    """
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        parts = [p.strip() for p in header.split(",")]
        if len(parts) != 2 or parts[0] != "density":
            raise ValidationError(
                "expected header 'density,N', got %r" % header, field="density_csv"
            )
        try:
            n = int(parts[1])
        except ValueError:
            raise ValidationError(
                "grid size %r is not an integer" % parts[1], field="density_csv"
            ) from None
        rows = []
        for line in fh:
            line = line.strip()
            if not line:
                continue
            rows.append([float(tok) for tok in line.split(",")])
    cells = np.array(rows, dtype=float)
    if cells.shape != (n, n):
        raise ValidationError(
            "expected %dx%d cells, got %s" % (n, n, cells.shape), field="density_csv"
        )
    return DensityModel.grid(cells)


def save_grid_csv(model, path):
    if model.kind != "grid":
        raise ValidationError("only grid models serialize to density CSV")
    cells = model.cells
    n = cells.shape[0]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("density,%d\n" % n)
        for row in cells:
            fh.write(",".join("%.17g" % v for v in row) + "\n")


# -- condition checking ----------------------------------------------------


@dataclass(frozen=True)
class ConditionReport:
    """Outcome of the monotone-anti-hazard scan.

    ``strict_direction`` names the coordinate in which the A-rate is
    strictly increasing ('a', 'b', or 'neither').  ``violations`` holds
    ((a, b), detail) records; point (-1, -1) marks global findings that
    have no single location (strictness failures, self-declared
    discontinuity).
    """

    passes: bool
    strict_direction: str
    continuity_ok: bool
    violations: tuple


def _monotone_scan(rate, pts, axis, label, direction, violations):
    """Check increments of ``rate`` along ``axis``; append violations.

    Returns (all_non_decreasing, mean_increment).  NaN entries (density
    floor) are skipped pair-wise.
    """
    diffs = np.diff(rate, axis=axis)
    valid = ~np.isnan(diffs)
    ok = True
    mean_inc = 0.0
    if valid.any():
        mean_inc = float(np.mean(diffs[valid]))
    bad = np.argwhere(valid & (diffs < -_SLACK))
    for idx in bad:
        i, j = int(idx[0]), int(idx[1])
        if axis == 0:
            pt = (float(pts[i + 1]), float(pts[j]))
        else:
            pt = (float(pts[i]), float(pts[j + 1]))
        step = diffs[i, j]
        violations.append(
            (pt, "%s decreases in %s by %g" % (label, direction, -step))
        )
        ok = False
    return ok, mean_inc


def _rate_direction(rate, pts, label, violations):
    """Strict direction of one rate array; appends monotonicity violations."""
    ok_a, mean_a = _monotone_scan(rate, pts, 0, label, "a", violations)
    ok_b, mean_b = _monotone_scan(rate, pts, 1, label, "b", violations)
    strict_a = ok_a and ok_b and mean_a > _SLACK
    strict_b = ok_a and ok_b and mean_b > _SLACK
    if strict_a:
        return "a", True
    if strict_b:
        return "b", True
    if ok_a and ok_b:
        violations.append(
            (
                (-1.0, -1.0),
                "%s has no strictly increasing direction (mean increments %g in a, %g in b)"
                % (label, mean_a, mean_b),
            )
        )
    return "neither", False


def _grid_continuity(cells, violations):
    """Jump-size heuristic: continuous when the largest adjacent-cell jump
    stays within 5x the bulk Lipschitz estimate times the cell width."""
    n = cells.shape[0]
    if n < 2:
        return True
    h = 1.0 / n
    ja = np.abs(np.diff(cells, axis=0))
    jb = np.abs(np.diff(cells, axis=1))
    jumps = np.concatenate([ja.ravel(), jb.ravel()])
    if jumps.size == 0 or jumps.max() == 0.0:
        return True
    lipschitz = np.quantile(jumps / h, 0.9)
    threshold = 5.0 * lipschitz * h + 1e-12
    worst = float(jumps.max())
    if worst <= threshold:
        return True
    if ja.max() >= jb.max():
        i, j = np.unravel_index(np.argmax(ja), ja.shape)
        pt = ((i + 1) * h, (j + 0.5) * h)
    else:
        i, j = np.unravel_index(np.argmax(jb), jb.shape)
        pt = ((i + 0.5) * h, (j + 1) * h)
    violations.append(
        (
            (float(pt[0]), float(pt[1])),
            "density jump %g exceeds continuity threshold %g" % (worst, threshold),
        )
    )
    return False


def _grid_rates(cells, weights, pts):
    """Sampled anti-hazard rates of a grid density, optionally weighted.

    With ``weights`` None the numerators are plain partial masses; otherwise
    they integrate weight*density.  The unweighted call is arithmetic-
    identical to the weighted call with unit weights, which the weighted
    condition check relies on.
    """
    n = cells.shape[0]
    h = 1.0 / n
    wcells = cells if weights is None else weights * cells
    zero_row = np.zeros((1, n))
    prefix_a = np.vstack([zero_row, np.cumsum(wcells, axis=0)]) * h
    prefix_b = np.hstack([zero_row.T, np.cumsum(wcells, axis=1)]) * h
    idx = np.minimum((pts * n).astype(int), n - 1)
    da = pts - idx * h
    den = cells[np.ix_(idx, idx)]
    num_a = prefix_a[np.ix_(idx, idx)] + wcells[np.ix_(idx, idx)] * da[:, None]
    num_b = prefix_b[np.ix_(idx, idx)] + wcells[np.ix_(idx, idx)] * da[None, :]
    with np.errstate(invalid="ignore", divide="ignore"):
        rate_a = np.where(den >= _FLOOR, num_a / den, np.nan)
        rate_b = np.where(den >= _FLOOR, num_b / den, np.nan)
    return rate_a, rate_b, den


def _closed_form_rates(model, pts):
    res = len(pts)
    rate_a = np.empty((res, res))
    rate_b = np.empty((res, res))
    den = np.empty((res, res))
    for i, a in enumerate(pts):
        for j, b in enumerate(pts):
            d = model.density(a, b)
            den[i, j] = d
            if d < _FLOOR:
                rate_a[i, j] = np.nan
                rate_b[i, j] = np.nan
            else:
                rate_a[i, j] = model.partial_mass_a(a, b) / d
                rate_b[i, j] = model.partial_mass_b(a, b) / d
    return rate_a, rate_b, den


def _floor_violations(den, pts, violations):
    bad = np.argwhere(den < _FLOOR)
    for idx in bad:
        i, j = int(idx[0]), int(idx[1])
        violations.append(
            (
                (float(pts[i]), float(pts[j])),
                "density %g below floor %g; rate undefined" % (den[i, j], _FLOOR),
            )
        )
    return len(bad) == 0


def _build_report(rate_a, rate_b, den, pts, continuity_ok, violations):
    floor_ok = _floor_violations(den, pts, violations)
    dir_a, ok_a = _rate_direction(rate_a, pts, "A-rate", violations)
    _, ok_b = _rate_direction(rate_b, pts, "B-rate", violations)
    if not continuity_ok and not any(v[1].startswith("density jump") for v in violations):
        violations.append(((-1.0, -1.0), "density is discontinuous by construction"))
    passes = bool(continuity_ok and floor_ok and ok_a and ok_b)
    return ConditionReport(
        passes=passes,
        strict_direction=dir_a,
        continuity_ok=bool(continuity_ok),
        violations=tuple(violations),
    )


def check_assumption1(model, resolution=48):
    """Scan both inverse anti-hazard rates for the monotone condition.

    Samples on a resolution x resolution interior grid.  ``passes`` needs a
    continuous density, no floor hits, and each rate strictly increasing in
    one coordinate and non-decreasing in the other.
    """
    resolution = int(resolution)
    if resolution < 8:
        raise ValidationError("resolution must be >= 8", field="resolution")
    pts = (np.arange(resolution) + 0.5) / resolution
    violations = []
    if model.kind == "grid":
        rate_a, rate_b, den = _grid_rates(model.cells, None, pts)
        continuity_ok = _grid_continuity(model.cells, violations)
    else:
        rate_a, rate_b, den = _closed_form_rates(model, pts)
        continuity_ok = model.kind != "example1"
    return _build_report(rate_a, rate_b, den, pts, continuity_ok, violations)


# -- heterogeneous ordeal costs -------------------------------------------


@dataclass(frozen=True)
class WeightedModel:
    """Transformed-type distribution with per-cell mean cost rates.

    ``gdensity`` is the grid model of the rescaled transformed types,
    ``weights`` the per-cell mean of the cost rate r (1 in empty cells),
    and ``scale`` the rescaling factor 1/r_min.
    """

    gdensity: DensityModel
    weights: np.ndarray
    scale: float


def hetero_transform(samples, resolution):
    """Histogram the cost-rate transformation (a/r, b/r) * r_min.

    Each sample is (a, b, r) with r > 0.  Transformed points land in the
    unit square by construction; weights record per-cell mean r.
    """
    resolution = int(resolution)
    if resolution < 1:
        raise ValidationError("resolution must be positive", field="resolution")
    arr = np.asarray(list(samples), dtype=float)
    if arr.size == 0:
        raise ValidationError("sample list is empty", field="samples")
    if arr.ndim != 2 or arr.shape[1] != 3:
        raise ValidationError("samples must be (a, b, r) triples", field="samples")
    if arr.shape[0] < resolution * resolution:
        raise ValidationError(
            "need at least resolution^2 = %d samples, got %d"
            % (resolution * resolution, arr.shape[0]),
            field="samples",
        )
    a, b, r = arr[:, 0], arr[:, 1], arr[:, 2]
    if np.any(r <= 0):
        raise ValidationError("cost rates must be positive", field="samples")
    if np.any((a < 0) | (a > 1) | (b < 0) | (b > 1)):
        raise DomainError("sample values outside the unit square", field="samples")
    r_min = float(r.min())
    factor = r_min / r
    ta = a * factor
    tb = b * factor
    ia = np.minimum((ta * resolution).astype(int), resolution - 1)
    ib = np.minimum((tb * resolution).astype(int), resolution - 1)
    flat = ia * resolution + ib
    counts = np.bincount(flat, minlength=resolution * resolution).astype(float)
    rsums = np.bincount(flat, weights=r, minlength=resolution * resolution)
    counts = counts.reshape(resolution, resolution)
    rsums = rsums.reshape(resolution, resolution)
    weights = np.ones_like(counts)
    filled = counts > 0
    weights[filled] = rsums[filled] / counts[filled]
    gdensity = DensityModel.grid(counts)
    return WeightedModel(gdensity=gdensity, weights=weights, scale=1.0 / r_min)


def check_weighted_condition(model, resolution=48):
    """Weighted-rate variant of :func:`check_assumption1`.

    Numerators integrate weight*density along each coordinate; with unit
    weights the report is identical to the plain check on ``gdensity``.
    """
    resolution = int(resolution)
    if resolution < 8:
        raise ValidationError("resolution must be >= 8", field="resolution")
    gd = model.gdensity
    if gd.kind != "grid":
        raise ValidationError("weighted models carry grid densities")
    if gd.cells.shape != model.weights.shape:
        raise ValidationError("weights shape must match the density grid")
    if np.any(model.weights[gd.cells > 0] <= 0):
        raise ValidationError("weights must be positive where density is positive")
    pts = (np.arange(resolution) + 0.5) / resolution
    violations = []
    rate_a, rate_b, den = _grid_rates(gd.cells, model.weights, pts)
    continuity_ok = _grid_continuity(gd.cells, violations)
    return _build_report(rate_a, rate_b, den, pts, continuity_ok, violations)


def weighted_rates(model, resolution):
    """Sampled weighted rates (numerator int_0^x weight*density / density).

    Returns (points, rate_a, rate_b) with NaN where the density floors out.
    Exposed so tests can compare rate surfaces directly.
    """
    pts = (np.arange(resolution) + 0.5) / resolution
    if isinstance(model, WeightedModel):
        rate_a, rate_b, _ = _grid_rates(model.gdensity.cells, model.weights, pts)
    elif model.kind == "grid":
        rate_a, rate_b, _ = _grid_rates(model.cells, None, pts)
    else:
        rate_a, rate_b, _ = _closed_form_rates(model, pts)
    return pts, rate_a, rate_b
