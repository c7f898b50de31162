"""Menu mechanisms: best responses, demand, and the designer objectives.

A mechanism posts one menu of (quality, ordeal) options per good.  Agents
pick the option and good maximizing ``quality * value - ordeal`` (outside
option 0), so a menu acts through its indirect utility envelope alone.

Menus are canonicalized at construction: options never strictly on top of
the envelope within [0, 1) are dropped and the rest sorted by quality.
Weakly dominated options (lower quality, higher ordeal) are always
envelope-inactive, so this subsumes pairwise dominance dropping.  When no
option beats the outside anywhere, the single least-dominated option is
kept so menus stay non-empty.

Tie conventions (ties are measure-zero for the distributions used):
within a menu, lower ordeal then higher quality; between goods, A wins
positive-utility ties; a type with no positive option stays out.

All region integrals (demand, welfare, revenue, efficiency) are exact: the
A/B indifference locus of two piecewise-linear envelopes is itself
piecewise linear, and the density families integrate exactly along linear
pieces (see :mod:`ordeal_lab._kernels`).
"""

from typing import NamedTuple

import numpy as np

from .errors import DomainError, ValidationError
from .pwl import PWLConvex, line_hull, response_curve

_TIE_TOL = 1e-12


class MenuOption(NamedTuple):
    quality: float
    ordeal: float


_EDGE_TOL = 1e-9  # representation dust allowance, as in the boundary type


def _validate_options(options, side):
    if options is None:
        raise ValidationError("menu must not be empty", field=side)
    opts = [MenuOption(float(q), float(c)) for q, c in options]
    if not opts:
        raise ValidationError("menu must not be empty", field=side)
    clean = []
    for q, c in opts:
        if not np.isfinite(q) or q < -_EDGE_TOL or q > 1.0 + _EDGE_TOL:
            raise DomainError("quality %g outside [0, 1]" % q, field=side)
        if not np.isfinite(c) or c < -_EDGE_TOL:
            raise DomainError("ordeal %g must be >= 0" % c, field=side)
        clean.append(MenuOption(min(max(q, 0.0), 1.0), max(c, 0.0)))
    return clean


def _canonical_menu(options, side):
    opts = _validate_options(options, side)
    hull = line_hull(opts)
    menu = [MenuOption(s, -b) for s, b, _ in hull if s > _TIE_TOL]
    if not menu:
        # envelope identically zero: keep the least-dominated option so the
        # menu stays non-empty (it still attracts nobody)
        menu = [min(opts, key=lambda o: (o.ordeal, -o.quality))]
    return tuple(menu)


class Mechanism:
    """Immutable two-good menu mechanism in canonical form."""

    __slots__ = ("menu_a", "menu_b", "_ua", "_ub")

    def __init__(self, menu_a, menu_b):
        self.menu_a = _canonical_menu(menu_a, "menu_a")
        self.menu_b = _canonical_menu(menu_b, "menu_b")
        self._ua = None
        self._ub = None

    def indirect_a(self):
        if self._ua is None:
            self._ua = PWLConvex.from_lines(self.menu_a)
        return self._ua

    def indirect_b(self):
        if self._ub is None:
            self._ub = PWLConvex.from_lines(self.menu_b)
        return self._ub

    def __eq__(self, other):
        if not isinstance(other, Mechanism):
            return NotImplemented
        return self.menu_a == other.menu_a and self.menu_b == other.menu_b

    def __hash__(self):
        return hash((self.menu_a, self.menu_b))

    def __repr__(self):
        return "Mechanism(menu_a=%s, menu_b=%s)" % (
            [tuple(o) for o in self.menu_a],
            [tuple(o) for o in self.menu_b],
        )


def best_option(menu, value):
    """Highest utility in the menu and the index attaining it.

    Returns (utility, index); index is None when no option beats the
    outside option.  Ties go to the lower ordeal, then higher quality.
    """
    if not menu:
        raise ValidationError("menu must not be empty", field="menu")
    if not (0.0 <= value <= 1.0):
        raise DomainError("value %g outside [0, 1]" % value)
    menu = [MenuOption(float(q), float(c)) for q, c in menu]
    utils = [q * value - c for q, c in menu]
    top = max(utils)
    if top <= 0.0:
        return (0.0, None)
    candidates = [i for i, u in enumerate(utils) if u >= top - _TIE_TOL]
    idx = min(candidates, key=lambda i: (menu[i].ordeal, -menu[i].quality))
    return (top, idx)


def indirect_utility(menu):
    """Upper envelope of the menu's lines and the zero line, on [0, 1]."""
    if not menu:
        raise ValidationError("menu must not be empty", field="menu")
    return PWLConvex.from_lines(
        [(float(q), float(c)) for q, c in menu]
    )


def choose_good(mech, a, b):
    """'A', 'B', or 'none'; positive-utility ties resolve to A."""
    if not (0.0 <= a <= 1.0 and 0.0 <= b <= 1.0):
        raise DomainError("type (%g, %g) outside the unit square" % (a, b))
    ua = mech.indirect_a().value(a)
    ub = mech.indirect_b().value(b)
    if ua <= 0.0 and ub <= 0.0:
        return "none"
    return "A" if ua >= ub else "B"


# -- region integrals ------------------------------------------------------


def _segment_data(ua, x0s, x1s):
    """Owning envelope segment of each piece: slope, ordeal, segment index."""
    mids = 0.5 * (x0s + x1s)
    seg = np.searchsorted(ua.x, mids, side="right") - 1
    seg = np.clip(seg, 0, len(ua.x) - 2)
    slopes = ua.slopes()[seg]
    ordeals = slopes * ua.x[seg] - ua.y[seg]
    return slopes, ordeals, seg

def _side_integral(model, ua, ub, mode, transposed):
    """Integral over the region where this side's good is chosen.

    ``mode``: 'mass' (1), 'utility' (U), 'ordeal' (chosen option's c), or
    'surplus' (chosen quality times own value).
    """
    xs, ys = response_curve(ua, ub)
    if len(xs) < 2:
        return 0.0
    x0s, x1s = xs[:-1], xs[1:]
    y0s, y1s = ys[:-1], ys[1:]
    if mode == "mass":
        w0s = w1s = None
    elif mode == "utility":
        w = ua.value(xs)
        w0s, w1s = w[:-1], w[1:]
    elif mode == "ordeal":
        _, ordeals, _ = _segment_data(ua, x0s, x1s)
        w0s = w1s = ordeals
    elif mode == "surplus":
        slopes, _, _ = _segment_data(ua, x0s, x1s)
        w0s = slopes * x0s
        w1s = slopes * x1s
    else:  # pragma: no cover
        raise ValueError(mode)
    return model.pieces_integral(x0s, x1s, y0s, y1s, w0s, w1s, False, transposed)


def _both_sides(mech, model, mode):
    va = _side_integral(model, mech.indirect_a(), mech.indirect_b(), mode, False)
    vb = _side_integral(model, mech.indirect_b(), mech.indirect_a(), mode, True)
    return va, vb


def demand(mech, model):
    """Masses of types choosing each good, integrated exactly."""
    return _both_sides(mech, model, "mass")


def direct_welfare(mech, model):
    """Expected realized utility: int max(U_A(a), U_B(b), 0) dF."""
    va, vb = _both_sides(mech, model, "utility")
    return va + vb


def revenue(mech, model):
    """Expected ordeal paid: int c(chosen option) dF."""
    va, vb = _both_sides(mech, model, "ordeal")
    return va + vb


def objective_wr(mech, model, gamma):
    """Welfare plus gamma times revenue, gamma in [0, 1]."""
    gamma = float(gamma)
    if not 0.0 <= gamma <= 1.0:
        raise DomainError("gamma %g outside [0, 1]" % gamma, field="gamma")
    return direct_welfare(mech, model) + gamma * revenue(mech, model)


def efficiency(mech, model):
    """Allocative surplus: int quality(chosen) * own-value dF."""
    va, vb = _both_sides(mech, model, "surplus")
    return va + vb


def option_masses(mech, model):
    """Mass served by each canonical option, per good, in menu order."""

    def side(ua, ub, menu, transposed):
        masses = np.zeros(len(menu))
        xs, ys = response_curve(ua, ub)
        if len(xs) < 2:
            return masses
        x0s, x1s = xs[:-1], xs[1:]
        y0s, y1s = ys[:-1], ys[1:]
        slopes, _, seg = _segment_data(ua, x0s, x1s)
        # canonical options are the positive-slope segments in order
        seg_slopes = ua.slopes()
        opt_of_seg = -np.ones(len(seg_slopes), dtype=int)
        nxt = 0
        for i, s in enumerate(seg_slopes):
            if s > _TIE_TOL:
                opt_of_seg[i] = nxt
                nxt += 1
        for k in range(len(x0s)):
            opt = opt_of_seg[seg[k]]
            if opt >= 0:
                masses[opt] += model.pieces_integral(
                    x0s[k : k + 1],
                    x1s[k : k + 1],
                    y0s[k : k + 1],
                    y1s[k : k + 1],
                    None,
                    None,
                    False,
                    transposed,
                )
        return masses

    ma = side(mech.indirect_a(), mech.indirect_b(), mech.menu_a, False)
    mb = side(mech.indirect_b(), mech.indirect_a(), mech.menu_b, True)
    return ma, mb
