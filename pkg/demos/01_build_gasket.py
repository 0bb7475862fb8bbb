"""Build Sierpinski gasket graphs and look at their structure.

Shows the closed-form vertex count, the corner wiring of both boundary
conditions, and the per-vertex direction sets that orient each vertex.
"""

import math

import gasketwalk as gw

for g in range(6):
    print(f"generation {g}: N = {gw.vertex_count(g)} vertices, {3 ** (g + 1)} edges")

graph = gw.build_gasket(gw.GasketSpec(2, gw.REFLECTIVE))
print("\ngeneration 2, reflective corners:")
print("  vertices:", [tuple(v) for v in graph.xy])
print("  direction set of (2,0):", sorted(gw.direction_set(graph, (2, 0))))
print("  direction set of (1,1):", sorted(gw.direction_set(graph, (1, 1))))
print("  corner (0,0) keeps ports:", sorted(gw.direction_set(graph, (0, 0))))

peri = gw.build_gasket(gw.GasketSpec(2, gw.PERIODIC))
print("\nsame gasket, periodic corners (wrap edges make it 4-regular):")
print("  corner (0,0) ports:", sorted(gw.direction_set(peri, (0, 0))))
print("  degree of every vertex:", sorted(set(int(d) for d in peri.degrees)))

print(f"\nfractal (Hausdorff) dimension: log3/log2 = {math.log(3) / math.log(2):.6f}")
print("\nfirst adjacency rows (x,y,k -> nx,ny,k_arr):")
for row in graph.adjacency_rows()[:6]:
    print("  ", row)
