"""
Random states never beat the optimum
====================================

Samples uniformly distributed mixed states and compares their speed with the
fastest state of the same purity, for the Euclidean speed and for the
Wigner-Yanase speed.
"""

import numpy as np

from qspeed.cli import PRESETS, RunConfig, simulate

cfg = RunConfig("simulate", PRESETS["gamma-lt2"], samples=20_000, seed=42)
cols, summary = simulate(cfg)

###############################################################################
# Euclidean speed: the optimum bounds every sample.

print(f"samples: {summary['samples']}")
print(f"largest v^2 - v^2_opt: {summary['max_excess']:.3e}")
print(f"states above the optimum: {summary['violations']}")

###############################################################################
# Wigner-Yanase speed: the same state is no longer the fastest everywhere.
# Count samples that beat it, in purity bins.

k = cols["purity"]
beat = cols["v2_wy"] > cols["v2_wy_opt"]
edges = np.arange(0.25, 1.0001, 0.05)
for lo, hi in zip(edges[:-1], edges[1:]):
    m = (k >= lo) & (k < hi)
    if m.any():
        print(f"purity [{lo:.2f}, {hi:.2f}): {beat[m].sum():5d} of {m.sum():6d} beat the state")
