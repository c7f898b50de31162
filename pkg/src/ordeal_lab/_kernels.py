"""Exact line-integral kernels over the supported density families.

Every mass, welfare, and revenue computation in the package reduces to
integrals of the form

    integral over [x0, x1] of  w(a) * G(a, y(a)) da

where y and w are linear on the piece and G is either the column mass
``colmass(a, y) = int_0^y f(a, t) dt`` or the joint cdf ``F(a, y)``.  For all
supported density families G restricted to such a line is piecewise
quadratic in a, with breakpoints only where the line crosses one of the
family's "break lines" (cell edges for histogram grids, the two diagonals
and their axis-aligned counterparts for the banded family).  The kernel
splits each piece at those crossings and applies 3-point Gauss-Legendre per
sub-piece, which integrates cubics exactly -- so the result carries no
quadrature error beyond float round-off.

Density families are passed as a flat "pack" of scalars and arrays rather
than objects so the hot loop compiles under numba:

    kind    0 grid, 1 uniform, 2 bands, 3 affine
    g       (n, n) cell densities, first index = a-cell, second = b-cell
    colcum  (n, n+1) colcum[i, j] = int_0^{j*h} f(a in cell i, t) dt
    rowcum  (n, n+1) rowcum[j, i] = int_0^{i*h} f(s, b in cell j) ds
    corner  (n+1, n+1) cdf at cell corners
    n       grid resolution (1 for closed-form kinds)
    p0,p1,p2  family parameters:
        bands: p0 = epsilon, p1 = k, p2 = direction (+1 regions cut by b-a,
               -1 by a-b; -1 is the transpose of +1)
        affine: density p0 + p1*a + p2*b (already normalized)

Closed-form kinds carry dummy 1x1 arrays so one compiled signature serves
all families.
"""

import math

import numpy as np

from ._backend import jit

KIND_GRID = 0
KIND_UNIFORM = 1
KIND_BANDS = 2
KIND_AFFINE = 3

# 3-point Gauss-Legendre on [-1, 1]: nodes +-sqrt(3/5) and 0.
_GL_OFF = 0.7745966692414834
_GL_W_EDGE = 5.0 / 9.0
_GL_W_MID = 8.0 / 9.0


@jit
def cell_index(x, n):
    """Cell containing x, lower edge closed; x == 1 maps into the last cell."""
    i = int(x * n)
    if i < 0:
        i = 0
    if i >= n:
        i = n - 1
    return i


@jit
def _band_densities(eps, k):
    d_far = 2.0 * eps / ((0.5 - eps) * (0.5 - eps))
    d_band = 2.0 * k / (eps - eps * eps)
    d_near = 8.0 / 7.0 * (1.0 - k - eps)
    return d_far, d_band, d_near


@jit
def _band_area_above(side_a, side_b, t):
    """Area of {(u, v) in [0,side_a]x[0,side_b] : v - u >= t} for t >= 0."""
    u = side_b - t
    if u <= 0.0:
        return 0.0
    if u > side_a:
        u = side_a
    return u * (side_b - t) - 0.5 * u * u


@jit
def density_kernel(kind, g, colcum, rowcum, corner, n, p0, p1, p2, a, b):
    if kind == KIND_UNIFORM:
        return 1.0
    if kind == KIND_AFFINE:
        return p0 + p1 * a + p2 * b
    if kind == KIND_BANDS:
        d_far, d_band, d_near = _band_densities(p0, p1)
        diff = b - a if p2 > 0.0 else a - b
        if diff >= 0.5 + p0:
            return d_far
        if diff >= 0.5:
            return d_band
        return d_near
    i = cell_index(a, n)
    j = cell_index(b, n)
    return g[i, j]


@jit
def colmass_kernel(kind, g, colcum, rowcum, corner, n, p0, p1, p2, a, y):
    """int_0^y f(a, t) dt."""
    if y <= 0.0:
        return 0.0
    if kind == KIND_UNIFORM:
        return y
    if kind == KIND_AFFINE:
        return (p0 + p1 * a) * y + 0.5 * p2 * y * y
    if kind == KIND_BANDS:
        d_far, d_band, d_near = _band_densities(p0, p1)
        if p2 > 0.0:
            # region thresholds along b at fixed a
            t1 = a + 0.5
            t2 = a + 0.5 + p0
            m_near = y if y < t1 else t1
            if m_near < 0.0:
                m_near = 0.0
            m_band = (y if y < t2 else t2) - t1
            if m_band < 0.0:
                m_band = 0.0
            m_far = y - t2
            if m_far < 0.0:
                m_far = 0.0
            return d_near * m_near + d_band * m_band + d_far * m_far
        # transpose: thresholds at b = a - 0.5 - eps and a - 0.5
        s1 = a - 0.5 - p0
        s2 = a - 0.5
        c1 = y if y < s1 else s1
        if c1 < 0.0:
            c1 = 0.0
        c2 = y if y < s2 else s2
        if c2 < 0.0:
            c2 = 0.0
        return d_far * c1 + d_band * (c2 - c1) + d_near * (y - c2)
    # grid
    i = cell_index(a, n)
    j = cell_index(y, n)
    h = 1.0 / n
    return colcum[i, j] + g[i, j] * (y - j * h)


@jit
def cdf_kernel(kind, g, colcum, rowcum, corner, n, p0, p1, p2, a, b):
    """F(a, b) = mass of [0, a] x [0, b]."""
    if a <= 0.0 or b <= 0.0:
        return 0.0
    if kind == KIND_UNIFORM:
        return a * b
    if kind == KIND_AFFINE:
        return p0 * a * b + 0.5 * p1 * a * a * b + 0.5 * p2 * a * b * b
    if kind == KIND_BANDS:
        d_far, d_band, d_near = _band_densities(p0, p1)
        if p2 > 0.0:
            far = _band_area_above(a, b, 0.5 + p0)
            mid = _band_area_above(a, b, 0.5)
        else:
            far = _band_area_above(b, a, 0.5 + p0)
            mid = _band_area_above(b, a, 0.5)
        return d_far * far + d_band * (mid - far) + d_near * (a * b - mid)
    i = cell_index(a, n)
    j = cell_index(b, n)
    h = 1.0 / n
    da = a - i * h
    db = b - j * h
    return corner[i, j] + da * colcum[i, j] + db * rowcum[j, i] + g[i, j] * da * db


@jit
def _piece_splits(kind, n, p0, p2, x0, x1, y0, y1, buf):
    """Fill buf with interior a-values where (a, y(a)) crosses a break line.

    Returns the number of entries written (unsorted, all strictly inside
    (x0, x1)).  Uniform and affine densities have no break lines.
    """
    cnt = 0
    if kind == KIND_GRID:
        h = 1.0 / n
        k0 = int(math.floor(x0 / h)) + 1
        k1 = int(math.ceil(x1 / h)) - 1
        for k in range(k0, k1 + 1):
            v = k * h
            if x0 < v < x1:
                buf[cnt] = v
                cnt += 1
        if y1 != y0:
            q = (y1 - y0) / (x1 - x0)
            lo = y0 if y0 < y1 else y1
            hi = y1 if y0 < y1 else y0
            j0 = int(math.floor(lo / h)) + 1
            j1 = int(math.ceil(hi / h)) - 1
            for j in range(j0, j1 + 1):
                w = j * h
                if lo < w < hi:
                    v = x0 + (w - y0) / q
                    if x0 < v < x1:
                        buf[cnt] = v
                        cnt += 1
    elif kind == KIND_BANDS:
        q = (y1 - y0) / (x1 - x0)
        p = y0 - q * x0
        for t in (0.5, 0.5 + p0):
            # diagonals y - a = t and a - y = t
            if abs(q - 1.0) > 1e-14:
                v = (t - p) / (q - 1.0)
                if x0 < v < x1:
                    buf[cnt] = v
                    cnt += 1
                v = (t + p) / (1.0 - q)
                if x0 < v < x1:
                    buf[cnt] = v
                    cnt += 1
            # horizontal y = t (cdf region corners travel along it)
            if abs(q) > 1e-14:
                v = (t - p) / q
                if x0 < v < x1:
                    buf[cnt] = v
                    cnt += 1
            # vertical a = t
            if x0 < t < x1:
                buf[cnt] = t
                cnt += 1
    return cnt


@jit
def sweep_kernel(
    kind,
    g,
    colcum,
    rowcum,
    corner,
    n,
    p0,
    p1,
    p2,
    x0s,
    x1s,
    y0s,
    y1s,
    w0s,
    w1s,
    use_cdf,
):
    """Sum of int_{x0}^{x1} w(a) G(a, y(a)) da over the given linear pieces.

    y and w interpolate linearly from (x0, y0, w0) to (x1, y1, w1).  With
    ``use_cdf`` true G is the joint cdf, otherwise the column mass.
    """
    buf = np.empty(2 * n + 16)
    total = 0.0
    for m in range(x0s.shape[0]):
        x0 = x0s[m]
        x1 = x1s[m]
        width = x1 - x0
        if width <= 1e-15:
            continue
        y0 = y0s[m]
        y1 = y1s[m]
        w0 = w0s[m]
        w1 = w1s[m]
        cnt = _piece_splits(kind, n, p0, p2, x0, x1, y0, y1, buf)
        pts = np.empty(cnt + 2)
        pts[0] = x0
        for i in range(cnt):
            pts[i + 1] = buf[i]
        pts[cnt + 1] = x1
        pts = np.sort(pts)
        qy = (y1 - y0) / width
        qw = (w1 - w0) / width
        for i in range(pts.shape[0] - 1):
            u0 = pts[i]
            u1 = pts[i + 1]
            half = 0.5 * (u1 - u0)
            if half <= 1e-16:
                continue
            mid = 0.5 * (u0 + u1)
            off = half * _GL_OFF
            acc = 0.0
            for jnode in range(3):
                if jnode == 0:
                    node = mid - off
                    gw = _GL_W_EDGE
                elif jnode == 1:
                    node = mid
                    gw = _GL_W_MID
                else:
                    node = mid + off
                    gw = _GL_W_EDGE
                ya = y0 + qy * (node - x0)
                if ya < 0.0:
                    ya = 0.0
                if ya > 1.0:
                    ya = 1.0
                wa = w0 + qw * (node - x0)
                if use_cdf:
                    val = cdf_kernel(
                        kind, g, colcum, rowcum, corner, n, p0, p1, p2, node, ya
                    )
                else:
                    val = colmass_kernel(
                        kind, g, colcum, rowcum, corner, n, p0, p1, p2, node, ya
                    )
                acc += gw * wa * val
            total += acc * half
    return total
