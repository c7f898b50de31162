"""Command-line front end: scenario in, CSV/TOML artifacts out.

Exit codes: 0 success, 1 malformed input (message names the field),
2 solver failure (non-convergence, infeasibility, no steady state).
"""

import argparse
import os
import sys

import numpy as np

from .dist import check_assumption1
from .errors import SolverError, SteadyStateError, ValidationError
from .market import market_clearing_ordeals
from .mechanism import Mechanism, demand, direct_welfare, efficiency, objective_wr, revenue
from .optimize import (
    example1_compare,
    local_boundary_search,
    single_good_compare,
    slope_sweep,
)
from .scenario import (
    Scenario,
    boundary_to_dict,
    mechanism_from_dict,
    mechanism_to_dict,
    save_boundary,
    save_mechanism,
    write_csv,
    write_toml,
)
from .waitlist import SimConfig, WaitMechanism, WaitOption, simulate, steady_state_check

_DEFAULT_SLOPES = [0.5 + 0.1 * i for i in range(16)]
_DEFAULT_GAMMAS = [0.0, 0.25, 0.5, 0.75, 1.0]


class _Parser(argparse.ArgumentParser):
    """Argument errors are input errors: exit 1, keeping 2 for solvers."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, "%s: error: %s\n" % (self.prog, message))


def _out_path(args, name):
    os.makedirs(args.out, exist_ok=True)
    return os.path.join(args.out, name)


def _emit(path):
    print("wrote %s" % path)


def _cmd_solve(args, sc):
    model = sc.model()
    mu_a, mu_b = sc.supplies()
    res = market_clearing_ordeals(model, mu_a, mu_b, tol=args.tol)
    if res.residual > 1e-4:
        raise SolverError(
            "clearing residual %g > 1e-4; no full-allocation posted mechanism"
            % res.residual
        )
    mech = Mechanism([(1.0, res.c_a)], [(1.0, res.c_b)])
    report = {
        "c_a": res.c_a,
        "c_b": res.c_b,
        "demand_a": res.demand[0],
        "demand_b": res.demand[1],
        "residual": res.residual,
        "iterations": res.iterations,
        "welfare": direct_welfare(mech, model),
        "revenue": revenue(mech, model),
        "efficiency": efficiency(mech, model),
    }
    path = _out_path(args, "solve.toml")
    write_toml(path, report)
    _emit(path)
    mpath = _out_path(args, "mechanism.toml")
    save_mechanism(mpath, mech)
    _emit(mpath)
    return 0


def _cmd_sweep(args, sc):
    model = sc.model()
    mu_a, mu_b = sc.supplies()
    slopes = sc.value("sweep", "slopes", default=_DEFAULT_SLOPES, kind=list)
    result = slope_sweep(model, mu_a, mu_b, slopes)
    path = _out_path(args, "sweep.csv")
    write_csv(
        path,
        ["slope", "a_low", "b_low", "welfare"],
        [(r.slope, r.a_low, r.b_low, r.welfare) for r in result.rows],
    )
    _emit(path)
    return 0


def _cmd_search(args, sc):
    model = sc.model()
    mu_a, mu_b = sc.supplies()
    n_knots = sc.value("search", "n_knots", default=4, kind=int)
    restarts = sc.value("search", "restarts", default=5, kind=int)
    res = local_boundary_search(
        model, mu_a, mu_b, n_knots, seed=args.seed, restarts=restarts
    )
    bpath = _out_path(args, "boundary.toml")
    save_boundary(bpath, res.best_boundary)
    _emit(bpath)
    spath = _out_path(args, "search.toml")
    write_toml(
        spath,
        {
            "best_welfare": res.best_welfare,
            "converged": res.converged,
            **boundary_to_dict(res.best_boundary),
        },
    )
    _emit(spath)
    tpath = _out_path(args, "trace.csv")
    write_csv(tpath, ["iteration", "welfare"], res.trace)
    _emit(tpath)
    return 0


def _cmd_check_conditions(args, sc):
    model = sc.model()
    rep = check_assumption1(model, resolution=args.grid)
    path = _out_path(args, "conditions.toml")
    write_toml(
        path,
        {
            "passes": rep.passes,
            "strict_direction": rep.strict_direction,
            "continuity_ok": rep.continuity_ok,
            "violation_count": len(rep.violations),
            "violations": [
                "(%.6g, %.6g): %s" % (p[0], p[1], d) for p, d in rep.violations[:20]
            ],
        },
    )
    _emit(path)
    return 0


def _cmd_example1(args, sc):
    eps_list = sc.value("example1", "epsilons", default=[0.02, 0.05, 0.08], kind=list)
    k = sc.value("example1", "k", default=0.3, kind=float)
    rows = []
    for eps in eps_list:
        w_ordeal, w_damage = example1_compare(float(eps), k)
        rows.append((float(eps), k, w_ordeal, w_damage, w_damage - w_ordeal))
    path = _out_path(args, "example1.csv")
    write_csv(path, ["epsilon", "k", "w_ordeal", "w_damage", "gap"], rows)
    _emit(path)
    return 0


def _cmd_single_good(args, sc):
    b_out = sc.value("single_good", "b_out", required=True, kind=float)
    cutoffs = sc.value("single_good", "cutoffs", required=True, kind=list)
    cells = sc.value("single_good", "cells", default=None, kind=list)
    f_a = None if cells is None else np.asarray(cells, dtype=float)
    rows = []
    for cutoff in cutoffs:
        w_ordeal, w_damage = single_good_compare(f_a, b_out, float(cutoff))
        rows.append((b_out, float(cutoff), w_ordeal, w_damage))
    path = _out_path(args, "single_good.csv")
    write_csv(path, ["b_out", "cutoff", "w_ordeal", "w_damage"], rows)
    _emit(path)
    return 0


def _parse_wait_menu(sc, key):
    raw = sc.value("waitlist", key, required=True, kind=list)
    opts = []
    for item in raw:
        if not isinstance(item, list) or len(item) != 3:
            raise ValidationError(
                "entries must be [ordeal, wait, prob]", field="waitlist.%s" % key
            )
        opts.append(WaitOption(*[float(x) for x in item]))
    return opts


def _cmd_waitlist_sim(args, sc):
    model = sc.model()
    mu_a, mu_b = sc.supplies()
    rho = sc.value("waitlist", "rho", required=True, kind=float)
    wm = WaitMechanism(_parse_wait_menu(sc, "menu_a"), _parse_wait_menu(sc, "menu_b"))
    ok, masses = steady_state_check(wm, model, mu_a, mu_b, rho)
    spath = _out_path(args, "steady_state.toml")
    write_toml(spath, {"ok": ok, "mass_a": masses[0], "mass_b": masses[1]})
    _emit(spath)
    if not ok:
        raise SteadyStateError(
            "choice masses (%g, %g) exceed supplies (%g, %g); no steady state"
            % (masses[0], masses[1], mu_a, mu_b)
        )
    waits = [o.wait for o in wm.menu_a + wm.menu_b if o.wait > 0]
    default_dt = min(waits) / 8 if waits else 0.1
    dt = sc.value("waitlist", "dt", default=default_dt, kind=float)
    max_wait = max([o.wait for o in wm.menu_a + wm.menu_b], default=0.0)
    default_horizon = 10 * max_wait + 10 * dt
    horizon = sc.value("waitlist", "horizon", default=default_horizon, kind=float)
    cfg = SimConfig(rho=rho, dt=dt, horizon=horizon, mu_a=mu_a, mu_b=mu_b, model=model)
    traj = simulate(wm, cfg, seed=args.seed)
    path = _out_path(args, "trajectory.csv")
    write_csv(
        path,
        ["time", "queue_a", "queue_b", "served_a", "served_b"],
        zip(traj.time, traj.queue_a, traj.queue_b, traj.served_a, traj.served_b),
    )
    _emit(path)
    return 0


def _cmd_wr_sweep(args, sc):
    model = sc.model()
    gammas = sc.value("wr", "gammas", default=_DEFAULT_GAMMAS, kind=list)
    mech_table = sc.section("mechanism")
    if mech_table:
        mech = mechanism_from_dict(mech_table)
    else:
        mu_a, mu_b = sc.supplies()
        res = market_clearing_ordeals(model, mu_a, mu_b, tol=args.tol)
        mech = Mechanism([(1.0, res.c_a)], [(1.0, res.c_b)])
    w = direct_welfare(mech, model)
    r = revenue(mech, model)
    rows = [(float(g), w, r, objective_wr(mech, model, float(g))) for g in gammas]
    path = _out_path(args, "wr_sweep.csv")
    write_csv(path, ["gamma", "welfare", "revenue", "objective"], rows)
    _emit(path)
    mpath = _out_path(args, "mechanism.toml")
    save_mechanism(mpath, mech)
    _emit(mpath)
    return 0


_COMMANDS = {
    "solve": _cmd_solve,
    "sweep": _cmd_sweep,
    "search": _cmd_search,
    "check-conditions": _cmd_check_conditions,
    "example1": _cmd_example1,
    "single-good": _cmd_single_good,
    "waitlist-sim": _cmd_waitlist_sim,
    "wr-sweep": _cmd_wr_sweep,
}


def build_parser():
    parser = _Parser(prog="ordeal-lab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--scenario", required=True, help="TOML scenario file")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--grid", type=int, default=200, help="grid resolution")
        p.add_argument("--tol", type=float, default=1e-6, help="solver tolerance")
        p.add_argument("--seed", type=int, default=0, help="random seed")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        sc = Scenario.load(args.scenario)
        return _COMMANDS[args.command](args, sc)
    except ValidationError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1
    except SolverError as exc:
        print("solver error: %s" % exc, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
