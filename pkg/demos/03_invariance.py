"""Is a cone positively invariant under x' = A x?  Three ways to ask.

Run: python demos/03_invariance.py
"""
import numpy as np

import dikincone as dc

K = dc.standard_cone(2)  # x_0^2 <= x_1^2, x_1 >= 0

systems = {
    "contraction A = -I": -np.eye(2),
    "swap (boost)": np.array([[0.0, 1.0], [1.0, 0.0]]),
    "rotation": np.array([[0.0, -1.0], [1.0, 0.0]]),
}

for name, A in systems.items():
    sys_ = dc.LinearSystem(A)
    cert = dc.certify_cone(sys_, K)              # min_a lambda_max(QA + A^T Q + aQ)
    cx = dc.nagumo_falsify(sys_, K, samples=10_000, seed=0)
    rec = dc.simulate(sys_, K, [0.3, 1.0], h=1e-3, T=10.0)
    print(f"{name:20s} feasible={cert.feasible!s:5s} a*={cert.a_star:+.4f} "
          f"f*={cert.lambda_max_at_a_star:.2e}  counterexample={'yes' if cx else 'no ':3s}  "
          f"exited={rec.exited} at t={rec.exit_time}")

# f(a) is convex; a table shows where the minimum is.
table = dc.certificate_scan(dc.LinearSystem(-np.eye(2)), K, np.linspace(0, 4, 9))
print("\n   a    lambda_max")
for a, f in table:
    print(f"{a:5.1f}  {f:8.4f}")

# A constructed cone. A generic damped spiral is usually not invariant:
cc = dc.construct_axis([1.0, 1.0, 1.0], 0)
A = np.array([[-1.0, 0.0, 0.0], [0.0, -2.0, 0.3], [0.0, -0.3, -2.0]])
cert = dc.certify_cone(dc.LinearSystem(A), cc)
print("\naxis cone, damped spiral: feasible =", cert.feasible, " f* =", round(cert.lambda_max_at_a_star, 4))
rec = dc.simulate(dc.LinearSystem(A), cc, cc.center, T=5.0)
print("trajectory from the center: max violation", round(rec.max_violation, 4), "exited", rec.exited)

# ...but a spiral around the cone's own axis is. Build it in standardized
# coordinates (rotation of x_0, x_1 plus uniform decay) and map it back.
T = dc.standardize(cc)
K = np.array([[-0.5, -1.0, 0.0], [1.0, -0.5, 0.0], [0.0, 0.0, -0.5]])
A = T.P @ K @ np.linalg.inv(T.P)
cert = dc.certify_cone(dc.LinearSystem(A), cc)
print("axis cone, spiral about its axis: feasible =", cert.feasible, " a* =", round(cert.a_star, 4))
rec = dc.simulate(dc.LinearSystem(A), cc, cc.center, T=5.0)
print("trajectory from the center: max violation", rec.max_violation, "exited", rec.exited)

# RK4 against the exact propagator.
x0 = np.array([1.0, 0.5, 0.2])
rk = dc.simulate(dc.LinearSystem(A), cc, x0, T=2.0).final_point
exact = dc.LinearSystem(A).propagator(2.0) @ x0
print("RK4 vs expm at T=2:", np.abs(rk - exact).max())
