"""Independent oracle computations for values frozen in the test suite.

Every number asserted with a tight tolerance in tests/ is derived here by a
route that does not touch the package: closed forms where available,
scipy quadrature + root finding otherwise. Run this script to regenerate
the numbers; tests quote them as literals with a comment naming the method.
"""

import numpy as np
from scipy import integrate, optimize


def show(label, value):
    if isinstance(value, tuple):
        print(f"{label}: " + ", ".join(f"{v:.12g}" for v in value))
    else:
        print(f"{label}: {value:.12g}")


# ---------------------------------------------------------------- uniform
# Market clearing with symmetric posted ordeals on the uniform square:
# demand per good is area{v > c, v > other} = (1 - c^2)/2, so clearing at
# mu = (1 - c^2)/2 gives c = sqrt(1 - 2 mu).
mu = 0.25
c_star = np.sqrt(1.0 - 2.0 * mu)
show("uniform clearing c (mu=0.25)", c_star)

# Welfare of the symmetric posted-ordeal mechanism: 2 * int_c^1 (a - c) a da.
w_star = 2.0 * (1.0 / 3.0 - c_star / 2.0 + c_star**3 / 6.0)
show("uniform clearing welfare", w_star)
show("uniform objective_wr gamma=1", w_star + c_star * 0.5)

# demand at c = 0.5 both menus: (1 - 0.25)/2
show("uniform demand at c=0.5", (1.0 - 0.25) / 2.0)

# Clearing for asymmetric supplies (0.1, 0.4) on the uniform square.
# A-region for menus [(1,cA)], [(1,cB)]: a > cA and b < a - cA + cB.
def uni_demand(ca, cb):
    da = integrate.quad(lambda a: min(1.0, a - ca + cb), ca, 1.0)[0] if ca < 1 else 0.0
    db = integrate.quad(lambda b: min(1.0, b - cb + ca), cb, 1.0)[0] if cb < 1 else 0.0
    return da, db

def clear(mu_a, mu_b):
    def inner(ca):
        d0 = uni_demand(ca, 0.0)[1]
        if d0 <= mu_b:
            return 0.0
        return optimize.brentq(lambda cb: uni_demand(ca, cb)[1] - mu_b, 0.0, 1.0, xtol=1e-14)
    def outer(ca):
        return uni_demand(ca, inner(ca))[0] - mu_a
    ca = optimize.brentq(outer, 0.0, 1.0 - 1e-12, xtol=1e-14)
    return ca, inner(ca)

ca14, cb14 = clear(0.1, 0.4)
show("uniform clearing (0.1,0.4) cA,cB", (ca14, cb14))
show("uniform clearing (0.1,0.4) demands", uni_demand(ca14, cb14))

# ------------------------------------------------------- single good (P1)
# Ordeal profile max(b_out, a - cutoff + b_out), damage profile
# max(b_out, (b_out/cutoff) a), both against the uniform marginal.
for b_out, cutoff in [(0.2, 0.5), (0.2, 0.9)]:
    wo = integrate.quad(lambda a: max(b_out, a - cutoff + b_out), 0, 1, points=[cutoff])[0]
    wd = integrate.quad(lambda a: max(b_out, b_out / cutoff * a), 0, 1, points=[cutoff])[0]
    show(f"single_good uniform b_out={b_out} cutoff={cutoff}", (wo, wd))

# ------------------------------------------------------------- example 1
# Density pieces by d = b - a:  d >= 1/2+eps -> d1, d in [1/2, 1/2+eps) -> d2,
# d < 1/2 -> d3.  Masses eps, k, 1-k-eps by construction.
def ex1_dens(eps, k):
    d1 = 2.0 * eps / (0.5 - eps) ** 2
    d2 = 2.0 * k / (eps - eps * eps)
    d3 = (8.0 / 7.0) * (1.0 - k - eps)
    return d1, d2, d3

def ex1_f(a, b, eps, k):
    d1, d2, d3 = ex1_dens(eps, k)
    d = b - a
    if d >= 0.5 + eps:
        return d1
    if d >= 0.5:
        return d2
    return d3

# partial mass along b = 0.25 for (0.05, 0.3): row integral of f(v, 0.25).
val = integrate.quad(lambda v: ex1_f(v, 0.25, 0.05, 0.3), 0, 1, limit=200)[0]
show("example1(0.05,0.3) partial_mass_a(1.0, 0.25)", val)

def ex1_rowpartial(x, b, eps, k):
    # int_0^x f(v, b) dv, pieces in v at b-1/2-eps and b-1/2
    d1, d2, d3 = ex1_dens(eps, k)
    s1, s2 = b - 0.5 - eps, b - 0.5
    t1 = max(0.0, min(x, s1))
    t2 = max(0.0, min(x, s2) - max(0.0, s1))
    t3 = max(0.0, x - max(0.0, s2))
    return d1 * t1 + d2 * t2 + d3 * t3

def ex1_rowmoment(x, b, eps, k):
    # int_0^x v f(v, b) dv
    d1, d2, d3 = ex1_dens(eps, k)
    s1, s2 = b - 0.5 - eps, b - 0.5
    lo1, hi1 = 0.0, max(0.0, min(x, s1))
    lo2, hi2 = max(0.0, min(s1, x)), max(0.0, min(x, s2))
    lo3, hi3 = max(0.0, min(s2, x)), x
    out = 0.0
    if hi1 > lo1:
        out += d1 * (hi1**2 - lo1**2) / 2
    if hi2 > lo2:
        out += d2 * (hi2**2 - lo2**2) / 2
    if hi3 > lo3:
        out += d3 * (hi3**2 - lo3**2) / 2
    return out

def ex1_ordeal_welfare(eps, k):
    # welfare of A free, B at ordeal 1/2: integrand max(a, b - 1/2)
    def inner(b):
        # below a = b - 1/2 the agent takes B (utility b - 1/2), above takes A
        cut = max(0.0, min(1.0, b - 0.5))
        take_b = (b - 0.5) * ex1_rowpartial(cut, b, eps, k) if b > 0.5 else 0.0
        take_a = ex1_rowmoment(1.0, b, eps, k) - ex1_rowmoment(cut, b, eps, k)
        return take_b + take_a
    return integrate.quad(inner, 0, 1, limit=400, epsabs=1e-12, points=[0.5, 1.0 - 0.5])[0]

def ex1_mass_above_ray(q, eps, k):
    # mass of {a < q b}
    return integrate.quad(lambda b: ex1_rowpartial(min(1.0, q * b), b, eps, k),
                          0, 1, limit=400, epsabs=1e-12)[0]

def ex1_damage_welfare(eps, k):
    mu_b = k + eps
    q = optimize.brentq(lambda q: ex1_mass_above_ray(q, eps, k) - mu_b,
                        1e-9, 1.0, xtol=1e-13)
    def inner(b):
        cut = min(1.0, q * b)
        take_b = q * b * ex1_rowpartial(cut, b, eps, k)
        take_a = ex1_rowmoment(1.0, b, eps, k) - ex1_rowmoment(cut, b, eps, k)
        return take_b + take_a
    w = integrate.quad(inner, 0, 1, limit=400, epsabs=1e-12)[0]
    return q, w

for eps in (0.02, 0.05, 0.08):
    k = 0.3
    wo = ex1_ordeal_welfare(eps, k)
    q, wd = ex1_damage_welfare(eps, k)
    show(f"example1 eps={eps} (w_ordeal, q, w_damage, gap)", (wo, q, wd, wd - wo))

# --------------------------------------------- supply-preserving lines
# Uniform, mu = (0.25, 0.25). Both constraints binding force the excluded
# rectangle a0*b0 = 1 - mu_a - mu_b = 1/2.  For slope 2 the above-mass
# equation reduces to b0^3 - 2 b0^2 - 2 b0 + 2 = 0 on (0,1).
roots = np.roots([1.0, -2.0, -2.0, 2.0])
b0 = float([r.real for r in roots if abs(r.imag) < 1e-12 and 0 < r.real < 1][0])
a0 = 0.5 / b0
show("uniform slope-2 supply line (a_low, b_low)", (a0, b0))
# cross-check masses by direct geometry
L = (1 - b0) / 2
below = L * b0 + L**2 + 1 - a0 - L
above = (1 - b0) * a0 + (1 - b0) ** 2 / 4
show("uniform slope-2 line masses", (below, above))

# ------------------------------------------- kinked boundary cross-check
# Uniform; boundary knots (0.4,0.3) -> (0.7,0.6) -> (0.9,1.0), slopes (1,2).
# Optimal profile: UA' = (0.5, 1.0) on the two pieces, 1 above 0.9, c = 0.5.
# UB' = 0.5 on [0.3, 1].  Menus: A [(0.5,0.2),(1,0.55)], B [(0.5,0.15)].
def ua_k(a):
    if a < 0.4:
        return 0.0
    if a < 0.7:
        return 0.5 * (a - 0.4)
    if a < 0.9:
        return 0.15 + 1.0 * (a - 0.7)
    return 0.35 + (a - 0.9)

def ub_k(b):
    return 0.5 * max(0.0, b - 0.3)

w_direct = integrate.dblquad(lambda b, a: max(ua_k(a), ub_k(b), 0.0),
                             0, 1, 0, 1, epsabs=1e-10)[0]
show("kinked boundary direct welfare (uniform)", w_direct)

def zhat_k(a):
    if a < 0.4:
        return 0.0
    if a < 0.7:
        return a - 0.1
    if a < 0.9:
        return 2 * a - 0.8
    return 1.0

wstar = ua_k(1.0) - integrate.quad(
    lambda a: (0.5 if a < 0.7 else 1.0) * a * zhat_k(a), 0.4, 1.0,
    points=[0.7, 0.9], limit=200, epsabs=1e-12)[0]
show("kinked boundary W* (uniform)", wstar)

below_k = integrate.quad(zhat_k, 0, 1, points=[0.4, 0.7, 0.9])[0]
show("kinked boundary supply below/above", (below_k, 1.0 - below_k - 0.4 * 0.3))

# ----------------------------------------------------------- waitlists
# Free menus, pure waits: A waits 1, B waits 2, rho = 0.1.
rho = 0.1
xa, xb = np.exp(-rho * 1.0), np.exp(-rho * 2.0)
astar = xb / xa  # A chosen iff xa*a >= xb*b, boundary b = a/astar... slope e^rho
d_a = integrate.quad(lambda a: min(1.0, a / astar), 0, 1, points=[astar])[0]
show("waitlist demo (xa, xb)", (xa, xb))
show("waitlist demo demands (A, B)", (d_a, 1.0 - d_a))
show("waitlist demo queue masses (Little)", (d_a * 1.0, (1.0 - d_a) * 2.0))

# --------------------------------------------------------------- affine
# f = (a + b + 1/2)/1.5; A-rate = int_0^a f / f, strictly increasing in a,
# non-decreasing in b (scan at a coarse grid as a sanity oracle).
def aff(a, b):
    return (a + b + 0.5) / 1.5

grid = np.linspace(0.01, 0.99, 25)
rate = np.array([[integrate.quad(lambda v: aff(v, b), 0, a)[0] / aff(a, b)
                  for b in grid] for a in grid])
da = np.diff(rate, axis=0)
db = np.diff(rate, axis=1)
show("affine rate min increment in a (expect >0)", da.min())
show("affine rate min increment in b (expect >= ~0)", db.min())
