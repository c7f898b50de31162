"""Wait-time menus, their static reduction, and a mass-flow simulator.

A wait option (c, t, p) asks for ordeal c, a wait of t time units, then
serves with probability p; failures re-enter the same option.  With common
discount rate rho, an agent values the option like a static menu entry of
quality p * exp(-rho * t) at the same ordeal, so choice behavior reduces to
the static mechanism and a steady state exists exactly when the induced
choice masses fit the per-unit-time supplies.

The simulator propagates real-valued masses, not sampled agents: each
option keeps a ring of in-flight cohorts plus a ready pool; each tick
admits arrival mass, matures cohorts, runs the service lottery, rations
claims against the perishable supply mu * dt, and re-enters all failures
at the same option (lottery losers re-wait, rationing losers retry).
Determinism makes the steady-state and growth checks sharp.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .mechanism import Mechanism, demand, option_masses

_MATCH_TOL = 1e-9


@dataclass(frozen=True)
class WaitOption:
    ordeal: float
    wait: float
    prob: float

    def __post_init__(self):
        for name in ("ordeal", "wait", "prob"):
            v = getattr(self, name)
            if not np.isfinite(v):
                raise ValidationError("must be finite", field=name)
            object.__setattr__(self, name, float(v))
        if self.ordeal < 0:
            raise ValidationError("must be >= 0", field="ordeal")
        if self.wait < 0:
            raise ValidationError("must be >= 0", field="wait")
        if not 0.0 <= self.prob <= 1.0:
            raise ValidationError("must lie in [0, 1]", field="prob")


def _coerce_menu(menu, field):
    opts = []
    for item in menu:
        if isinstance(item, WaitOption):
            opts.append(item)
        else:
            opts.append(WaitOption(*item))
    if not opts:
        raise ValidationError("menu must be non-empty", field=field)
    return tuple(opts)


@dataclass(frozen=True)
class WaitMechanism:
    menu_a: tuple
    menu_b: tuple

    def __post_init__(self):
        object.__setattr__(self, "menu_a", _coerce_menu(self.menu_a, "menu_a"))
        object.__setattr__(self, "menu_b", _coerce_menu(self.menu_b, "menu_b"))


@dataclass(frozen=True)
class SimConfig:
    rho: float
    dt: float
    horizon: float
    mu_a: float
    mu_b: float
    model: object

    def __post_init__(self):
        if not (np.isfinite(self.rho) and self.rho > 0):
            raise ValidationError("must be > 0", field="rho")
        if not (np.isfinite(self.dt) and self.dt > 0):
            raise ValidationError("must be > 0", field="dt")
        if not (np.isfinite(self.horizon) and self.horizon >= self.dt):
            raise ValidationError("must cover at least one step", field="horizon")
        for name in ("mu_a", "mu_b"):
            if not (np.isfinite(getattr(self, name)) and getattr(self, name) >= 0):
                raise ValidationError("must be >= 0", field=name)
        if self.mu_a + self.mu_b > 1.0 + 1e-12:
            raise ValidationError("supplies exceed total mass 1", field="mu_b")


def expected_discount(opt, rho):
    """p * exp(-rho * t): the quality-equivalent of waiting."""
    if not (np.isfinite(rho) and rho > 0):
        raise ValidationError("must be > 0", field="rho")
    return opt.prob * math.exp(-rho * opt.wait)


def static_equivalent(wm, rho):
    """The ordinary mechanism an agent with discount rate rho perceives."""
    menu_a = [(expected_discount(o, rho), o.ordeal) for o in wm.menu_a]
    menu_b = [(expected_discount(o, rho), o.ordeal) for o in wm.menu_b]
    return Mechanism(menu_a, menu_b)


def steady_state_check(wm, model, mu_a, mu_b, rho):
    """(ok, (mass_a, mass_b)): whether per-unit-time choice masses fit the
    supplies.  Independent of the probabilities p beyond their effect on
    choices, since failed agents re-enter rather than leave."""
    d = demand(static_equivalent(wm, rho), model)
    ok = d[0] <= mu_a + 1e-6 and d[1] <= mu_b + 1e-6
    return bool(ok), (float(d[0]), float(d[1]))


def _wait_flows(wm, model, rho):
    """Arrival mass per unit time into each wait option.

    Canonical options of the static equivalent inherit the exact floats of
    the wait options they came from, so matching on (quality, ordeal)
    attributes each served mass back; duplicates resolve to the first
    matching wait option in menu order.
    """
    mech = static_equivalent(wm, rho)
    ma, mb = option_masses(mech, model)

    def attribute(wait_menu, canon_menu, masses):
        flows = [0.0] * len(wait_menu)
        for opt, m in zip(canon_menu, masses):
            for j, w in enumerate(wait_menu):
                if (
                    abs(expected_discount(w, rho) - opt.quality) <= _MATCH_TOL
                    and abs(w.ordeal - opt.ordeal) <= _MATCH_TOL
                ):
                    flows[j] += m
                    break
        return flows

    return (
        attribute(wm.menu_a, mech.menu_a, ma),
        attribute(wm.menu_b, mech.menu_b, mb),
    )


@dataclass(frozen=True)
class SimTrajectory:
    time: np.ndarray
    queue_a: np.ndarray
    queue_b: np.ndarray
    served_a: np.ndarray
    served_b: np.ndarray

    def mean_served_flows(self, t_from):
        """Average served mass per unit time on each side after t_from."""
        keep = self.time >= t_from
        if not np.any(keep):
            raise ValidationError("no samples at or after t_from", field="t_from")
        dt = self.time[0] if len(self.time) == 1 else self.time[1] - self.time[0]
        return (
            float(self.served_a[keep].mean() / dt),
            float(self.served_b[keep].mean() / dt),
        )


class _GoodState:
    """Queues of one good: a cohort ring and a ready pool per option."""

    def __init__(self, options, flows, dt):
        self.options = options
        self.inflows = [f * dt for f in flows]
        self.ticks = [int(round(o.wait / dt)) if o.wait > 0 else 0 for o in options]
        self.rings = [[0.0] * t for t in self.ticks]
        self.ready = [0.0] * len(options)

    def step(self, supply):
        claims = []
        for i, opt in enumerate(self.options):
            if self.ticks[i]:
                matured = self.rings[i].pop()
                pre = self.ready[i] + matured
            else:
                pre = self.ready[i] + self.inflows[i]
            claim = opt.prob * pre
            lost = pre - claim
            claims.append(claim)
            # lottery losers re-enter: re-wait when there is a wait,
            # otherwise retry from the ready pool next tick
            if self.ticks[i]:
                self.rings[i].insert(0, self.inflows[i] + lost)
                self.ready[i] = 0.0
            else:
                self.ready[i] = lost
        total = sum(claims)
        ratio = 1.0 if total <= supply or total <= 1e-15 else supply / total
        served = ratio * total
        for i, claim in enumerate(claims):
            unlucky = (1.0 - ratio) * claim
            if self.ticks[i]:
                self.rings[i][0] += unlucky
            else:
                self.ready[i] += unlucky
        return served

    def queue(self):
        return sum(sum(r) for r in self.rings) + sum(self.ready)


def simulate(wm, cfg, seed=0):
    """Run the mass-flow simulation and return the trajectory.

    Rows record end-of-tick state: time, queue masses (in-flight plus
    ready, both goods), and the mass served during the tick.  Flows are
    deterministic; ``seed`` is accepted for interface stability but the
    mass propagation does not sample.  Waits are rounded to whole ticks,
    so choose dt dividing the wait times for exact queue identities.

    The steady-state condition is deliberately not a precondition: running
    an infeasible configuration shows the queues growing without bound.
    """
    if not isinstance(wm, WaitMechanism):
        wm = WaitMechanism(*wm)
    positive_waits = [
        o.wait for o in tuple(wm.menu_a) + tuple(wm.menu_b) if o.wait > 0
    ]
    if positive_waits and cfg.dt > min(positive_waits) / 4 + 1e-12:
        raise ValidationError(
            "dt %g exceeds a quarter of the shortest positive wait %g"
            % (cfg.dt, min(positive_waits)),
            field="dt",
        )
    flows_a, flows_b = _wait_flows(wm, cfg.model, cfg.rho)
    state_a = _GoodState(wm.menu_a, flows_a, cfg.dt)
    state_b = _GoodState(wm.menu_b, flows_b, cfg.dt)
    n = int(round(cfg.horizon / cfg.dt))
    time = np.zeros(n)
    qa = np.zeros(n)
    qb = np.zeros(n)
    sa = np.zeros(n)
    sb = np.zeros(n)
    for k in range(n):
        sa[k] = state_a.step(cfg.mu_a * cfg.dt)
        sb[k] = state_b.step(cfg.mu_b * cfg.dt)
        qa[k] = state_a.queue()
        qb[k] = state_b.queue()
        time[k] = (k + 1) * cfg.dt
    return SimTrajectory(time=time, queue_a=qa, queue_b=qb, served_a=sa, served_b=sb)
