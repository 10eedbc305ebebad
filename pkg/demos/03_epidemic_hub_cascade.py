"""Spot the moment a super-spreader is infected, from counts alone.

An SI epidemic spreads over a binary tree that hides one planted hub of
much higher degree.  When the hub gets infected the total infection rate
(the cut of the infected set) jumps by roughly the hub degree.  We never
look at the graph: the detector sees only the infection-count process.
"""

from ratejump import (
    argmax_single,
    build_tree_with_hub,
    infection_count_process,
    simulate_si,
)

height, extra_leaves = 10, 400
graph = build_tree_with_hub(height, extra_leaves)
print(f"tree: {graph.n} vertices, hub {graph.hub} with degree {graph.degree(graph.hub)} "
      f"(everyone else has degree <= 3)")

trace = simulate_si(graph, source=0, seed=7)
t_hub = float(trace.times[graph.hub])
print(f"cascade from vertex 0: hub infected at t = {t_hub:.3f}, "
      f"last vertex at t = {trace.times.max():.3f}")

counts = infection_count_process(trace)
t_hat = argmax_single(counts, k=2, delta=0.2)
print(f"\nsecond-derivative argmax on the counts: t = {t_hat:.3f}")
print(f"|t_hat - t_hub| = {abs(t_hat - t_hub):.3f}")

print("\nvertices infected within 0.05 of the estimate (candidate hubs):")
close = [v for v, t in enumerate(trace.times) if abs(t - t_hat) <= 0.05]
for v in close[:10]:
    print(f"  vertex {v}: degree {graph.degree(v)}"
          + ("   <-- the hub" if v == graph.hub else ""))
