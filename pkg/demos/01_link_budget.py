"""
Link budget and power tour
==========================

How far from the nadir can a device sit and still be heard, and what does
the airframe burn while we wait? Run with ``python3 demos/01_link_budget.py``.
"""

import numpy as np

from uavma import BackscatterCoeff, ChannelParams, PropulsionParams, link_budget, propulsion_power

# rotary-wing power dips below the hover figure at moderate cruise speed
prop = PropulsionParams()
for v in (0.0, 5.0, 10.0, 15.0, 20.0):
    print(f"v = {v:4.1f} m/s   P = {propulsion_power(prop, v):7.2f} W")

# the reader hears the device through the same loss twice, so the return
# link is the binding one; walk a device away from the nadir at H = 30 m
ch = ChannelParams()
xi = BackscatterCoeff().xi
print(f"\nbackscatter efficiency xi = {xi}")
print("offset   MA reader dBm   FPA reader dBm   MA rate Mbit/s")
for offset in np.arange(0.0, 41.0, 5.0):
    ma = link_budget((0.0, 0.0, 30.0), (offset, 0.0), ch, xi, ch.reader_gain_dbi)
    fpa = link_budget((0.0, 0.0, 30.0), (offset, 0.0), ch, xi, ch.fpa_gain_dbi)
    print(f"{offset:5.1f}   {ma.rx_power_reader_dbm:13.2f}   {fpa.rx_power_reader_dbm:14.2f}"
          f"   {ma.rate_bps / 1e6:13.2f}")


# qualification radius by bisection on the reader-side sensitivity
def reach(g_tr_dbi, sens_dbm):
    def ok(d):
        return link_budget((0.0, 0.0, 30.0), (d, 0.0), ch, xi, g_tr_dbi).rx_power_reader_dbm >= sens_dbm

    if not ok(0.0):
        return None
    lo, hi = 0.0, 500.0
    while hi - lo > 1e-3:
        mid = 0.5 * (lo + hi)
        lo, hi = (mid, hi) if ok(mid) else (lo, mid)
    return lo


print(f"\nMA reach at {ch.reader_sens_dbm} dBm: {reach(ch.reader_gain_dbi, ch.reader_sens_dbm):.2f} m")
print(f"FPA reach at {ch.reader_sens_dbm} dBm: {reach(ch.fpa_gain_dbi, ch.reader_sens_dbm)}")
print(f"FPA reach at -110 dBm: {reach(ch.fpa_gain_dbi, -110.0):.2f} m")
