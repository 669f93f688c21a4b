"""Matrix Caratheodory reduction on a deliberately bloated combination.

300 random terms at level 2 in two variables collapse to at most
n^2 (2 nvars + 1) = 20 terms without moving the barycenter.
"""

import numpy as np

import dilatekit as dk

rng = np.random.default_rng(7)
n, nvars, terms = 2, 2, 300

raw = []
for _ in range(terms):
    k = int(rng.integers(1, 4))
    coords = [rng.normal(size=(k, k)) + 1j * rng.normal(size=(k, k))
              for _ in range(nvars)]
    raw.append((rng.normal(size=(k, n)) + 1j * rng.normal(size=(k, n)),
                dk.MatrixPoint(coords=coords, selfadjoint=False)))

# normalize the coefficients so sum beta* beta = I exactly
s = sum(g.conj().T @ g for g, _ in raw)
corr = dk.inv_sqrt_psd(s)
comb = dk.MatrixConvexCombination(
    n=n, terms=[(g @ corr, p) for g, p in raw])

reduced = dk.caratheodory_reduce(comb)
cap = n * n * (2 * nvars + 1)
print(f"terms: {terms} -> {len(reduced.terms)} (bound {cap})")
print(f"normalization defect after reduction: {reduced.defect():.3e}")
for before, after in zip(comb.barycenter(), reduced.barycenter()):
    print(f"barycenter drift: {np.linalg.norm(after - before):.3e}")

survivors = {id(p) for _, p in reduced.terms}
originals = {id(p) for _, p in comb.terms}
print(f"survivors drawn from the input points: {survivors <= originals}")
