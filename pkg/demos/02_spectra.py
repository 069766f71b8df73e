"""Spectral facts about the axis and ones cones, checked numerically.

Run: python demos/02_spectra.py
"""
import numpy as np

import dikincone as dc
from dikincone.spectral import axis_cone_arrowhead

np.set_printoptions(precision=6, suppress=True)

c = np.array([0.5, 1.0, 2.0, 4.0])

# det of the axis cone does not depend on which axis was used
for i in range(c.size):
    print(f"i={i}  det={np.linalg.det(dc.construct_axis(c, i).Q):+.6e}", end="  ")
print(f"\nclosed form     {dc.det_axis_cone(c):+.6e}")

# Each Q_i is an arrowhead matrix after moving row i to the front, so the
# secular-equation solver applies.
m = axis_cone_arrowhead(c, 1)
print("\narrowhead eigenvalues:", dc.arrowhead_eigenvalues(m))
print("dense eigenvalues:    ", np.sort(np.linalg.eigvalsh(dc.construct_axis(c, 1).Q))[::-1])
print("diagonal b (interlaced):", m.b)

# Largest eigenvalue sits between two cheap 2x2 bounds.
rows = []
for i in range(c.size):
    lo, hi = dc.lambda1_bounds_axis_cone(c, i)
    lam1 = np.linalg.eigvalsh(dc.construct_axis(c, i).Q)[-1]
    rows.append((i, lo, lam1, hi))
print("\n  i      lower     lambda1      upper")
for i, lo, lam1, hi in rows:
    print(f"{i:3d} {lo:10.5f} {lam1:11.5f} {hi:10.5f}")

# When the other centers agree the bounds coincide.
print("bounds at c = e, n = 3:", dc.lambda1_bounds_axis_cone(np.ones(3)), "vs 1+sqrt2 =", 1 + np.sqrt(2))

# Ones plane with equal centers: one negative eigenvalue -1/(n k^2).
k, n = 2.0, 5
print("\nones cone, c = 2e:", np.sort(np.linalg.eigvalsh(dc.construct_ones(np.full(n, k)).Q))[::-1])
print("closed form:      ", dc.equal_c_spectrum(k, n))

# A compact report, as the CLI emits it.
rep = dc.spectral_report(dc.construct_axis(c).Q, dc.det_axis_cone(c), dc.lambda1_bounds_axis_cone(c))
print("\nreport:", {k: v for k, v in rep.to_dict().items() if k != "eigenvalues"})
