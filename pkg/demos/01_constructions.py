"""Build cones over Dikin ellipsoid slices and look at what comes out.

Run: python demos/01_constructions.py
"""
import numpy as np

import dikincone as dc

np.set_printoptions(precision=4, suppress=True)

# A Dikin ellipsoid around c is the box-scaled ball (x-c)^T C^-2 (x-c) <= 1.
# It always sits inside the nonnegative orthant.
c = np.array([1.0, 2.0, 3.0])
ed = dc.DikinEllipsoid(c)
pts = dc.sample_boundary(ed, 5, seed=0)
print("boundary samples\n", pts)
print("smallest coordinate:", pts.min())

# Slice with the plane x_0 = c_0 and take the cone from the origin over it.
axis = dc.construct_axis(c, 0)
print("\naxis cone Q\n", axis.Q)
print("condition residuals:", axis.residuals)

# Same plane through the general formula: identical matrix.
plane = dc.Hyperplane.through([1.0, 0.0, 0.0], c)
general = dc.construct_general(ed, plane)
print("max |general - axis| =", np.abs(general.Q - axis.Q).max())

# A tilted plane through c.
tilted = dc.construct_general(ed, dc.Hyperplane.through([1.0, 0.5, 0.2], c))
print("\ntilted cone Q\n", tilted.Q)
print("inertia:", tuple(dc.inertia(tilted.Q)))

# Points of the base ellipse lie on the cone surface.
rim = dc.sample_boundary(tilted.base, 4, seed=1)
print("quadratic on the rim:", tilted.quadratic(rim))

# The center is inside, its mirror image (other nappe) is not.
for x in (c, -c, 3 * c, [5.0, 0.0, 0.0]):
    print(np.asarray(x), dc.membership(tilted, x).status.name)

# The tangent cone to a unit sphere: half-angle asin(1/|c|).
sphere = dc.construct_tangent_sphere([0.0, 0.0, 2.0])
print("\nsphere tangent cone\n", sphere.Q)
half = np.degrees(np.arcsin(0.5))
print(f"half-angle {half:.1f} deg; generator value:",
      sphere.quadratic([np.sin(np.radians(half)), 0.0, np.cos(np.radians(half))]))

# Standardize: a congruence sends any of these to x_1^2 + x_2^2 <= x_3^2.
T = dc.standardize(tilted)
print("\nP^T Q P =\n", T.P.T @ tilted.Q @ T.P)
print("center maps to", T.forward(c))
