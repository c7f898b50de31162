"""Shared fixtures and random-case generators for the test suite."""

import numpy as np
import pytest

import ordeal_lab as ol


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    """Touch every kernel once so compile time stays out of timed tests."""
    models = [
        ol.DensityModel.uniform(),
        ol.DensityModel.grid(np.ones((4, 4))),
        ol.DensityModel.example1(0.05, 0.3),
        ol.DensityModel.affine(0.5, 1.0, 1.0),
    ]
    for m in models:
        m.cdf(0.5, 0.5)
        m.partial_mass_b(0.5, 0.5)
        m.curve_integral([0.1, 0.9], [0.2, 0.8])
        m.curve_integral([0.1, 0.9], [0.2, 0.8], use_cdf=True, transposed=True)


def random_boundary(rng, max_knots=6):
    """A random valid boundary with up to max_knots knots.

    Knots walk up-right from a random start; the walk is rescaled so the
    last knot lands exactly on a wall.
    """
    n = int(rng.integers(2, max_knots + 1))
    a0 = float(rng.uniform(0.0, 0.55))
    b0 = float(rng.uniform(0.0, 0.55))
    da = rng.uniform(0.05, 0.4, n - 1)
    db = rng.uniform(0.05, 0.4, n - 1)
    ax = a0 + np.concatenate([[0.0], np.cumsum(da)])
    bx = b0 + np.concatenate([[0.0], np.cumsum(db)])
    t = min((1.0 - a0) / (ax[-1] - a0), (1.0 - b0) / (bx[-1] - b0))
    ax = a0 + (ax - a0) * t
    bx = b0 + (bx - b0) * t
    # snap the wall coordinate exactly
    if 1.0 - ax[-1] <= 1.0 - bx[-1]:
        ax[-1] = 1.0
    else:
        bx[-1] = 1.0
    return ol.Boundary(np.column_stack([ax, bx]))


def random_feasible_ua(rng, z):
    """A random utility profile implementable on z.

    Builds per-interval slopes by the same backward recursion that makes
    the optimum feasible, but against random caps instead of 1, so both
    monotonicity conditions and the quality bounds hold by construction.
    """
    grid = [z.ax[0]]
    for x0, x1 in zip(z.ax[:-1], z.ax[1:]):
        for p in np.sort(rng.uniform(x0, x1, int(rng.integers(0, 3)))):
            if p - grid[-1] > 1e-4 and x1 - p > 1e-4:
                grid.append(float(p))
        grid.append(float(x1))
    grid = np.asarray(grid)
    mids = 0.5 * (grid[:-1] + grid[1:])
    iz = np.clip(np.searchsorted(z.ax, mids, side="right") - 1, 0, len(z.ax) - 2)
    s = z.slopes()[iz]
    caps = rng.uniform(0.15, 1.0, len(mids))
    u = np.empty(len(mids))
    for i in range(len(mids) - 1, -1, -1):
        u[i] = min(caps[i], 1.0, s[i])
        if i + 1 < len(mids):
            u[i] = min(u[i], u[i + 1], s[i] * u[i + 1] / s[i + 1])
    breaks = list(grid)
    slopes = list(u)
    if z.a_low > 1e-12:
        breaks = [0.0] + breaks
        slopes = [0.0] + slopes
    if z.a_bar < 1.0 - 1e-12:
        breaks = breaks + [1.0]
        slopes = slopes + [float(rng.uniform(u[-1], 1.0))]
    return ol.PWLConvex.from_slopes(np.asarray(breaks), np.asarray(slopes))


def random_grid_model(rng, n=200, coarse=6):
    """A smooth strictly positive grid density via bilinear upsampling."""
    c = rng.uniform(0.4, 1.6, (coarse, coarse))
    xi = np.linspace(0.0, coarse - 1.0, n)
    along_b = np.array([np.interp(xi, np.arange(coarse), c[i]) for i in range(coarse)])
    cells = np.array(
        [np.interp(xi, np.arange(coarse), along_b[:, j]) for j in range(n)]
    ).T
    return ol.DensityModel.grid(cells)
