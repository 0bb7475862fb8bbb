"""Mixing times across generations and their power law in the graph size.

tau_eps is the first time after which the averaged distribution stays within
eps of pi.  Because the distance decays like 1/T, tau scales like 1/eps at
fixed size; across sizes it grows like a small power of N.
"""

import gasketwalk as gw
from gasketwalk.analysis import resolve_limiting

EPSILONS = (0.1, 0.05, 0.02)
HORIZON = 4000

rows = []
for g in (3, 4, 5):
    graph = gw.build_gasket(gw.GasketSpec(g, gw.PERIODIC))
    state = gw.initial_state(graph, (2 ** g, 0))
    pi = resolve_limiting(graph, state)
    series = gw.tvd_decay_series(graph, state, HORIZON, pi)
    taus = {eps: gw.scan_mixing_time(series, eps).tau for eps in EPSILONS}
    rows.append((graph.num_vertices, taus))
    shown = ", ".join(f"tau({eps}) = {tau}" for eps, tau in taus.items())
    print(f"g={g} (N={graph.num_vertices:4d}): {shown}")
    products = [eps * tau for eps, tau in taus.items()]
    print(f"       eps * tau stays near-constant: {[round(p, 2) for p in products]}")

for eps in EPSILONS:
    fit = gw.mixing_scaling([(n, taus[eps]) for n, taus in rows])
    print(f"scaling at eps={eps}: tau ~ {fit.prefactor:.4f} N^{fit.exponent:.3f}")
