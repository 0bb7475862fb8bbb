"""Convergence of the running average to pi: the 1/T law.

The distance ||p_bar(T) - pi|| oscillates around a 1/T envelope; the log-log
fit of the series recovers an exponent near -1.  T * tvd staying bounded is
the cleanest signature of the law.
"""

import numpy as np

import gasketwalk as gw

G = 4
HORIZON = 3000
graph = gw.build_gasket(gw.GasketSpec(G, gw.PERIODIC))
state = gw.initial_state(graph, (2 ** G, 0))

decomp = gw.spectral_decomposition(graph)
pi = gw.limiting_distribution(decomp, state)
series = gw.tvd_decay_series(graph, state, HORIZON, pi)

t = np.arange(1, HORIZON + 1)
fit = gw.fit_power_law(t, series, window=(20, HORIZON))
print(f"g={G}: tvd(p_bar(T), pi) ~ {fit.prefactor:.3f} / T^{-fit.exponent:.3f}")

scaled = t * series
sel = t >= 20
print(f"T * tvd over T in [20, {HORIZON}]: median {np.median(scaled[sel]):.3f}, "
      f"max {scaled[sel].max():.3f} (bounded ratio {scaled[sel].max() / np.median(scaled[sel]):.2f})")

print("\nsample of the decay:")
for T in (1, 10, 30, 100, 300, 1000, 3000):
    print(f"  T={T:5d}  tvd={series[T - 1]:.5f}  T*tvd={T * series[T - 1]:.3f}")
