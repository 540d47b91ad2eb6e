"""
Where the Landau-Zener crossing stops being adiabatic
======================================================

A two-level system swept through an avoided crossing can follow its ground
state only while the remaining time to the crossing exceeds the inverse gap.
This script locates that crossover for a few ramp durations, checks the
closed form against a bisection of the defining equation, and shows how the
window width scales with the ramp time.
"""

import numpy as np

from impulse_cd import lz
from impulse_cd.kzm import fit_freeze_out_exponent, impulse_window_generic

# Sweep from g0 = -10 to +10 in units of the minimum half-gap delta = 1.
print("tau_q    mu(closed)    mu(bisection)   window")
for tau in (0.5, 2.0, 5.0, 25.0, 100.0):
    p = lz.LzParams.create(tau)
    mu = lz.lz_impulse_half_width(p)
    generic = impulse_window_generic(p.schedule, lambda g: lz.gap_of_field(p, g))
    print(f"{tau:6.1f}   {mu:.8f}    {generic.half_width:.8f}     "
          f"({generic.t_minus:.4f}, {generic.t_plus:.4f})")

# For fast ramps the freeze-out half-width grows as sqrt(tau_q), the
# Kibble-Zurek exponent z nu / (1 + z nu) with z = nu = 1.
taus = np.geomspace(0.05, 0.5, 12)
samples = [(t, lz.lz_freeze_out_half_width(lz.LzParams.create(t))) for t in taus]
print(f"\nfitted exponent over tau_q in [0.05, 0.5]: {fit_freeze_out_exponent(samples):.4f}")

# Slow ramps saturate: the half-width approaches 1/(2 delta) and stops
# growing, so the impulse window becomes a vanishing fraction of the ramp.
for tau in (1e2, 1e3, 1e4):
    mu = lz.lz_freeze_out_half_width(lz.LzParams.create(tau))
    print(f"tau_q = {tau:7.0f}: mu = {mu:.6f}, fraction of ramp = {2 * mu / tau:.2e}")
