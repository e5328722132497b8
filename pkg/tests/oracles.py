"""Independent scalar reference formulas, written with ``math`` only.

These never import the package under test. Frozen literals in the test
modules were produced by running these functions; the tests also check the
live oracle against the literal so a drifting oracle is caught too.
"""

import math

C = 299_792_458.0

REF_PROP = dict(v_tip=80.0, v0=5.0463, eps=1.225, S=0.1248, A=0.1256, Xi=0.5009, mu=0.012,
                   omega=400.0, R=0.2, iota=0.05, W=7.84, v_u=10.0)


def blade_power(v, p=REF_PROP):
    p0 = p["mu"] * p["eps"] * p["omega"] ** 3 * p["R"] ** 3 * p["A"] / 8.0
    return p0 * (1.0 + 3.0 * v * v / (p["v_tip"] * p["v_tip"]))


def induced_power(v, p=REF_PROP):
    p1 = (1.0 + p["iota"]) * p["W"] ** 1.5 / math.sqrt(2.0 * p["eps"] * p["A"])
    inner = math.sqrt(1.0 + v ** 4 / (4.0 * p["v0"] ** 4)) - v * v / (2.0 * p["v0"] ** 2)
    return p1 * math.sqrt(inner)


def parasite_power(v, p=REF_PROP):
    return 0.5 * p["eps"] * p["Xi"] * p["S"] * p["A"] * v ** 3


def flight_power(v, p=REF_PROP):
    return blade_power(v, p) + induced_power(v, p) + parasite_power(v, p)


def p_los(elev_rad, rho=9.61, beta=0.16):
    deg = elev_rad * 180.0 / math.pi
    return 1.0 / (1.0 + rho * math.exp(-beta * (deg - rho)))


def fspl(r, fc=2e9, g_tr_dbi=10.0, g_bd_dbi=0.0, eta=1.0, lam=None):
    lam = C / fc if lam is None else lam
    g = math.sqrt(10 ** (g_tr_dbi / 10) * 10 ** (g_bd_dbi / 10))
    return 20.0 * math.log10(4.0 * math.pi * r / (lam * g)) + eta


def mean_loss(r, elev, g_tr_dbi=10.0, g_bd_dbi=0.0, eta_los=1.0, eta_nlos=20.0):
    p = p_los(elev)
    return p * fspl(r, g_tr_dbi=g_tr_dbi, g_bd_dbi=g_bd_dbi, eta=eta_los) + \
        (1 - p) * fspl(r, g_tr_dbi=g_tr_dbi, g_bd_dbi=g_bd_dbi, eta=eta_nlos)


def xi(chi=0.5, m=0.5, theta_db=0.0):
    return chi * chi * m / (10 ** (theta_db / 10)) ** 2


def rx_powers(loss_db, xi_=0.125, pc_dbm=30.0):
    rx_bd = pc_dbm - loss_db
    return rx_bd, rx_bd + 10 * math.log10(xi_) - loss_db


def rate(loss_db, xi_=0.125, B=20e6, pc_w=1.0, n0_dbm=-100.0):
    snr = xi_ * pc_w * 1e3 * 10 ** (-2 * loss_db / 10) / 10 ** (n0_dbm / 10)
    return B * math.log2(1 + snr)


def budget_at(horiz, H=30.0, g_tr_dbi=10.0):
    """(rx_bd, rx_reader, rate) for a BD ``horiz`` metres from the nadir."""
    r = math.hypot(horiz, H)
    elev = math.atan2(H, horiz)
    loss = mean_loss(r, elev, g_tr_dbi=g_tr_dbi)
    bd, reader = rx_powers(loss)
    return bd, reader, rate(loss)


def ma_cost(dtheta, dphi, base=2.0, zeta=0.05, kappa=0.03, vt=math.pi, vp=math.pi):
    t = max(dtheta / vt, dphi / vp)
    pw = base + zeta * dtheta + kappa * dphi
    return t, pw, pw * t


def soft_target(r, gamma, done, q1, q2, alpha, logp):
    return r + (1 - done) * gamma * (min(q1, q2) - alpha * logp)


def reach_radius(g_tr_dbi=10.0, sens=-100.0, H=30.0):
    """Largest horizontal offset at which the reader-side constraint still holds (bisection)."""
    lo, hi = 0.0, 1000.0
    if budget_at(0.0, H, g_tr_dbi)[1] < sens:
        return None
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if budget_at(mid, H, g_tr_dbi)[1] >= sens:
            lo = mid
        else:
            hi = mid
    return lo


if __name__ == "__main__":
    for name, val in [
        ("P0", blade_power(0)), ("P1", induced_power(0)), ("hover", flight_power(0)),
        ("blade10", blade_power(10)), ("induced10", induced_power(10)), ("parasite10", parasite_power(10)),
        ("P10", flight_power(10)),
        ("los90", p_los(math.pi / 2)), ("los_at_rho", p_los(math.radians(9.61))),
        ("L50_los", fspl(50)), ("L50_nlos", fspl(50, eta=20)), ("L50_los_lam015", fspl(50, lam=0.15)),
        ("mean_loss_50_pi4", mean_loss(50, math.pi / 4)), ("p_los_pi4", p_los(math.pi / 4)),
        ("rate65", rate(65)), ("rx_63.44", rx_powers(63.44)),
        ("overhead_MA", budget_at(0.0)), ("overhead_FPA", budget_at(0.0, g_tr_dbi=5.0)),
        ("reach_MA", reach_radius()), ("reach_FPA", reach_radius(5.0)),
        ("reach_FPA_relaxed", reach_radius(5.0, -110.0)),
        ("ma_move", ma_cost(math.pi / 4, math.pi / 2)),
        ("soft_target", soft_target(1, 0.99, 0, 2, 3, 0.2, -1)),
    ]:
        print(f"{name:20s} {val!r}")
