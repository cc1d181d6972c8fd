"""Triangles, configuration census and lifecycles on the bundled 8-node example."""

from pathlib import Path

from hosim import (build_incidence, build_projected_graph, count_configs3, fraction_open,
                   lifecycle_trace, load_dataset)
from hosim.census import CONFIG3_NAMES
from hosim.prediction import open_triangles

ds = load_dataset(Path(__file__).resolve().parent.parent / "fixtures" / "fig1")
n_open, closed, frac = fraction_open(ds)
print(f"{len(ds)} simplices on {ds.n_nodes} nodes: {closed} closed, {n_open} open "
      f"(fraction open {frac})")

tri = open_triangles(ds)
print("open triangles (original labels):", ds.labels[tri].tolist())

counts = count_configs3(build_projected_graph(ds), build_incidence(ds))
for ref, (name, c) in enumerate(zip(CONFIG3_NAMES, counts.values()), 1):
    print(f"  {ref:2d} {name:6s} {c}")

u, v, w = tri[0]
print("lifecycle of the open triangle:")
for t, state in lifecycle_trace((u, v, w), ds):
    print(f"  t={t:>5} {state.name}")
