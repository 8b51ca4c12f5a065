"""
Entanglement and coherence of the fastest two-qubit state
=========================================================

Reads the four-level system as two qubits and follows concurrence,
negativity and l1 coherence along the purity axis.
"""

import numpy as np

from qspeed import (
    concurrence_two_qubit,
    l1_coherence,
    negativity,
    optimal_state,
    regime_params,
    separable_decomposition,
)
from qspeed.cli import PRESETS

for name in ("gamma-lt2", "gamma-ge2"):
    E = PRESETS[name]
    p = regime_params(E)
    print(f"\n{name} (kappa1 = {p.kappa1:.4f}, kappa2 = {p.kappa2:.4f})")
    print("kappa   concurrence  negativity  l1 coherence")
    for k in np.linspace(0.25, 1, 13):
        s = optimal_state(E, k)
        print(f"{k:.4f}  {concurrence_two_qubit(s):.6f}     {negativity(s, 2, 2):.6f}    "
              f"{l1_coherence(s):.6f}")

###############################################################################
# Below kappa0 the state is separable; the decomposition below proves it.

dec = separable_decomposition(PRESETS["gamma-lt2"], 0.35, 2, 2, theta1=0.5)
print(f"\n{len(dec.terms)} product terms, weights {np.round([w for w, _, _ in dec.terms], 4)}")
print(f"reconstruction error {dec.residual():.1e}")
