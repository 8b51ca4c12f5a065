"""
Fastest states at fixed purity
==============================

Builds the fastest state for a four-level system over the full purity range
and checks it against an unrestricted numerical search.
"""

import numpy as np

from qspeed import optimal_speed, optimal_state, regime_params
from qspeed.cli import PRESETS
from qspeed.oracle import max_speed_bruteforce

###############################################################################
# Two reference spectra share the outer gap ``sqrt(2)`` and differ in the
# inner gap, which decides whether the ``rho_23`` coherence ever switches on.

for name in ("gamma-lt2", "gamma-ge2"):
    E = PRESETS[name]
    p = regime_params(E)
    print(f"{name}: energies {np.round(E, 4)}")
    print(f"  gamma1 = {p.gamma1:.4f}  kappa0 = {p.kappa0:.4f}  "
          f"kappa1 = {p.kappa1:.4f}  kappa2 = {p.kappa2:.4f}")

###############################################################################
# Walk through the purity range and show which band is active.

E = PRESETS["gamma-lt2"]
print("\nkappa   band        rho_11   |rho_14|  rho_22   |rho_23|  v^2")
for k in (0.25, 0.3, 0.375, 0.45, 0.5, 0.53, 5 / 9, 0.7, 0.9, 1.0):
    s = optimal_state(E, k)
    r = s.state.data
    print(f"{k:.4f}  {s.regime.value:<10}  {r[0, 0].real:.4f}   {abs(r[0, 3]):.4f}    "
          f"{r[1, 1].real:.4f}   {abs(r[1, 2]):.4f}    {optimal_speed(E, k):.6f}")

###############################################################################
# An unrestricted search over all density matrices lands on the same values.

print("\nkappa   closed form   numerical search")
for k in (0.45, 0.53, 0.7):
    res = max_speed_bruteforce(E, k, restarts=16, rng=0)
    print(f"{k:.2f}    {optimal_speed(E, k):.10f}  {res.best_speed_sq:.10f}")
