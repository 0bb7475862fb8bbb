"""How fast does the walker spread?  sigma(t) and its power-law exponent.

The spread rate depends strongly on where the walker starts: bottlenecks in
the fractal confine some starting points much more than others.  Reflective
corners are used so nothing wraps around, and the run stays below the
saturation cutoff 2^g.
"""

import numpy as np

import gasketwalk as gw
from gasketwalk.analysis import sigma_series

G = 6
STEPS = 64
graph = gw.build_gasket(gw.GasketSpec(G, gw.REFLECTIVE))
t = np.arange(STEPS + 1)

for start in [(2 ** G, 0), (2 ** G, 2 ** G - 2 ** (G - 3)), (1, 1)]:
    sigma = sigma_series(graph, start, STEPS)
    fit = gw.fit_power_law(t, sigma, window=(1, STEPS))
    print(
        f"start {start}: sigma ~ {fit.prefactor:.2f} t^{fit.exponent:.3f}"
        f"   (walk dimension d_w = {1 / fit.exponent:.2f}), sigma({STEPS}) = {sigma[-1]:.2f}"
    )

print("\nclassical random walk from the bottom center, for comparison:")
t_c, sig_c = gw.classical_walk_series(graph, (2 ** G, 0), 256)
fit_c = gw.fit_power_law(t_c, sig_c, window=(4, 256))
print(f"  sigma ~ {fit_c.prefactor:.2f} t^{fit_c.exponent:.3f}  (d_w = {1 / fit_c.exponent:.2f},"
      f" exact classical value log2(5) = {np.log2(5):.3f})")
