"""Sweep every starting vertex and histogram the fitted diffusion exponents.

Each vertex seeds a fresh walker; each walker's sigma(t) gets a power-law
fit, and the walk dimensions d_w = 1/exponent are binned.  The mean spread
exponent lands close to the classical diffusion value for this fractal.
"""

import numpy as np

import gasketwalk as gw

G = 5
STEPS = 32
graph = gw.build_gasket(gw.GasketSpec(G, gw.REFLECTIVE))
hist = gw.sweep_exponents(graph, STEPS)

print(f"g={G}: swept {graph.num_vertices} starting vertices, {STEPS} steps each")
print(f"mean-series fit: sigma_bar ~ {hist.mean_fit.prefactor:.2f} t^{hist.mean_fit.exponent:.3f}")
print(f"per-vertex exponent range: [{hist.exponent.min():.3f}, {hist.exponent.max():.3f}]")
print(f"d_w range: [{hist.dw.min():.2f}, {hist.dw.max():.2f}], classical log2(5) = {np.log2(5):.2f}")

peak = hist.counts.max()
print("\nd_w histogram:")
for lo, hi, c in zip(hist.bin_edges[:-1], hist.bin_edges[1:], hist.counts):
    if c:
        bar = "#" * max(1, int(40 * c / peak))
        print(f"  [{lo:5.2f}, {hi:5.2f})  {c:4d}  {bar}")
