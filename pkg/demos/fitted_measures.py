"""Grid-fitted measures: commuting pairs on the torus, Laurent data on
the annulus.

Both pipelines share one back half (fit PSD weights on a grid, reduce
the resulting combination, assemble the Naimark dilation), but the grids
and the reading of negative indices differ: torus atoms are unitary so
negative powers are adjoints, annulus atoms include the inner circle
where z^{-1} and conj(z) differ by r^{-2}.
"""

import numpy as np

import dilatekit as dk

rng = np.random.default_rng(42)

print("commuting pair on the 8x8 torus lattice")
nodes = 8
phases = np.exp(2j * np.pi * rng.integers(0, nodes, size=(2, 3)) / nodes)
w, _ = np.linalg.qr(rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)))
ts = [w @ np.diag(ph) @ w.conj().T for ph in phases]
res = dk.dilate_regular(ts, order=2, nodes=nodes)
print(f"  fit residual {res.measure.fit_residual:.2e}, "
      f"atoms kept {len(res.measure.atoms)}, K = {res.dilation.space_dim}")
u1, u2 = res.dilation.generators
print(f"  commutator of the dilated pair: "
      f"{np.linalg.norm(u1 @ u2 - u2 @ u1):.2e}")
print(f"  max moment residual {res.verification.max_moment_residual:.2e}")

print("invertible operator with spectrum on both annulus circles")
r = 0.5
spectrum = np.exp(2j * np.pi * np.array([1, 4, 9]) / 16) * np.array([1, r, 1])
v, _ = np.linalg.qr(rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)))
t = v @ np.diag(spectrum) @ v.conj().T
res = dk.dilate_annulus(t, r, order=2, nodes=16)
n = res.dilation.generators[0]
print(f"  K = {res.dilation.space_dim}, "
      f"normality {np.linalg.norm(n @ n.conj().T - n.conj().T @ n):.1e}")
print(f"  inverse power compression error: "
      f"{np.linalg.norm(res.dilation.compress(np.linalg.inv(n)) - np.linalg.inv(t)):.2e}")

print("infeasible data is refused with a certificate")
try:
    dk.dilate_annulus(np.array([[1.5]]), r, order=1, nodes=16)
except dk.InfeasibleError as exc:
    print(f"  InfeasibleError, residual {exc.residual:.3f}")
