"""Fraction of open triangles in the independent 3-node simplex model as b varies."""

import os

import numpy as np

from hosim.generative import b_range, exact_open_indicator, sweep

bs = b_range(0.8, 1.8, 0.1)
ns = [25, 50, 100, 200]
rows = sweep(bs, ns, seeds=10, threads=os.cpu_count() or 1)

print("b     " + "".join(f"n={n:<8d}" for n in ns) + "P(open triple), n=200")
for b in bs:
    cells = []
    for n in ns:
        f = np.array([r.fraction_open for r in rows if r.n == n and r.b == b])
        f = f[~np.isnan(f)]
        cells.append(f"{f.mean():.3f}    " if len(f) else "  -      ")
    print(f"{b:<6g}" + "".join(cells) + f"{exact_open_indicator(200, b):.2e}")
