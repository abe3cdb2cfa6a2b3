"""The double well, the optimal transition profile, and its exact identities.

The 1D heteroclinic q(t) = 1/(1 + e^t) connects the wells of
W(s) = s^2(1-s)^2/2 and satisfies the equipartition q' = -sqrt(2 W(q))
pointwise; its action S = int q'^2 and the surface-tension constant
c0 = int_0^1 sqrt(2W) both equal 1/6.  The asymptotic correctors eta1 and
eta2 feed the velocity-law constants int z q'' q' = int W'''(q) eta1 q'^2
= -1/12 used by the matched-asymptotics checks.

Run:  python demos/01_profile_and_well.py  (writes demo PNGs next to it)
"""

import numpy as np

from pfwillmore import profiles as P

t = np.linspace(-12, 12, 1001)
q = P.profile_q(t)
qp = P.profile_q(t, 1)

print("q(0) = ", P.profile_q(0.0), " (normalized to 1/2)")
print("max |q'' - W'(q)|          :", np.max(np.abs(P.profile_q(t, 2) - P.well(q, 1))))
print("max |q'^2/2 - W(q)|        :", np.max(np.abs(0.5 * qp**2 - P.well(q))))

ints = P.profile_integrals()
print(f"c0  = {ints.c0:.12f}   (exact 1/6)")
print(f"S   = {ints.S:.12f}   (exact 1/6)")
print(f"zqq = {ints.zqq:.12f}   (exact -1/12)")
print(f"w3  = {ints.w3:.12f}   (-1/12 from the eta1 boundary value problem)")

eta1 = P.solve_eta1()
print("eta1 oddness defect        :", np.max(np.abs(eta1.values + eta1.values[::-1])))

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, axes = plt.subplots(1, 2, figsize=(9, 3.2))
    s = np.linspace(-0.2, 1.2, 400)
    axes[0].plot(s, P.well(s))
    axes[0].set_title("double well W(s)")
    axes[1].plot(t, q, label="q")
    axes[1].plot(eta1.z, eta1.values, label="eta1")
    axes[1].plot(t, P.eta2(t), label="eta2")
    axes[1].set_xlim(-12, 12)
    axes[1].legend()
    axes[1].set_title("profile and correctors")
    fig.tight_layout()
    fig.savefig("demos/01_profile_and_well.png", dpi=120)
    print("wrote demos/01_profile_and_well.png")
except ImportError:
    print("matplotlib not available; skipped the figure")
