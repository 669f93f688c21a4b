"""One operator, two dilation scales.

The 2x2 Jordan block J = [[0, 1], [0, 0]] is a contraction, so it has a
plain unitary dilation.  Doubling it gives 2J with norm 2 but numerical
radius exactly 1, which is out of reach for rho = 1 and exactly in reach
for rho = 2: compressions of U^n reproduce (2J)^n only after multiplying
by 2.
"""

import numpy as np

import dilatekit as dk

j = np.array([[0.0, 1.0], [0.0, 0.0]])
order = 4

print("contraction, rho = 1")
res = dk.dilate_circle(j, order=order)
print(f"  dilation space K = {res.dilation.space_dim}"
      f" (bound {(order + 1) * j.shape[0]})")
print(f"  max moment residual = {res.verification.max_moment_residual:.3e}")

print("norm-2 operator, rho = 1 is refused")
try:
    dk.dilate_circle(2 * j, order=1)
except dk.NotPSDError as exc:
    print(f"  NotPSD: kernel eigenvalue {exc.min_eig:.3f}")

print("norm-2 operator, rho = 2")
res = dk.dilate_circle(2 * j, order=order, rho=2.0)
u = res.dilation.generators[0]
print(f"  K = {res.dilation.space_dim}, unitarity defect "
      f"{np.linalg.norm(u.conj().T @ u - np.eye(res.dilation.space_dim)):.2e}")
power = np.eye(res.dilation.space_dim)
for n in range(1, order + 1):
    power = power @ u
    lhs = 2.0 * res.dilation.compress(power)
    rhs = np.linalg.matrix_power(2 * j, n)
    print(f"  n={n}:  || 2 PU^nP - (2J)^n || = {np.linalg.norm(lhs - rhs):.3e}")
