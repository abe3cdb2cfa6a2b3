"""Relax the cross scene under Allen-Cahn to a saddle-lattice solution.

Starting from the periodic checkerboard (phase 1 on quadrants I and III),
the semi-implicit Allen-Cahn relaxation converges to a stationary solution
of eps^2 Lap u = W'(u) whose half-level set keeps the four branches
crossing at the cell corners; the residual drops below 1e-9 within a few
hundred steps (the saddle is an unstable critical point, so very long
relaxations eventually drift away through rounding noise).

Run:  python demos/04_saddle_allen_cahn.py
"""

import numpy as np

from pfwillmore import analysis as an
from pfwillmore import flows as F
from pfwillmore import geometry as geo
from pfwillmore import grid as G
from pfwillmore.profiles import well

P = 64
g = G.make_grid(2, P)
eps = 2.0 / P
params = F.ModelParams(eps=eps, dt=eps / 10.0, flow="allen_cahn")
session = F.new_session(g, params, geo.builtin_scene("cross"))

for k in range(401):
    if k % 100 == 0:
        residual = np.max(np.abs(eps**2 * G.laplacian(g, session.u) - well(session.u, 1)))
        print(f"step {k:4d}: ||eps^2 Lap u - W'(u)||_inf = {residual:.3e}")
    F.step(session)

above = an.count_components(session.u, 0.5 + 1e-9)
below = an.count_components(-session.u, -(0.5 - 1e-9))
print(f"components of {{u>1/2}} = {above}, of {{u<1/2}} = {below} (2 and 2: four branches)")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(4, 4))
    ax.imshow(session.u.T, origin="lower", extent=(0, 1, 0, 1), cmap="RdBu_r")
    ax.contour(session.u.T, levels=[0.5], origin="lower", extent=(0, 1, 0, 1), colors="k")
    ax.set_title("saddle solution, 1/2-level in black")
    fig.tight_layout()
    fig.savefig("demos/04_saddle.png", dpi=120)
    print("wrote demos/04_saddle.png")
except ImportError:
    print("matplotlib not available; skipped the figure")
