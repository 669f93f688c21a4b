"""Matrix convex combinations: lifting, reduction, irreducible splitting.

A matrix convex combination sum_j gamma_j* x_j gamma_j (with
sum_j gamma_j* gamma_j = I_n) is treated as data: the ``gamma_j`` are
rectangular coefficient matrices and the ``x_j`` are matrix points, i.e.
tuples of square matrices all of one level.  The trace convention
throughout is the normalized one, ntrace(I_n) = 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionMismatchError,
    InvalidCombinationError,
    NotHermitianError,
    NotNormalizedError,
    ZeroCoefficientError,
)
from .linalg import (
    DEFAULT_TOL,
    Tolerances,
    asmatrix,
    herm_eig,
    herm_part,
    hvec,
    inv_sqrt_psd,
)

__all__ = [
    "MatrixPoint",
    "MatrixConvexCombination",
    "LiftedPoint",
    "ntrace",
    "lift_combination",
    "unlift_point",
    "compress_to_surjective",
    "caratheodory_reduce",
    "irreducible_split",
    "decompose_irreducible",
]


def ntrace(a: np.ndarray) -> float:
    """Normalized trace, ntrace(I_n) = 1."""
    return float(np.trace(a).real) / a.shape[0]


@dataclass
class MatrixPoint:
    """A point in a matrix convex set: d square coordinates at one level.

    ``label`` is free-form caller metadata (e.g. which measure atom the
    point came from); it is carried through reductions untouched.
    """

    coords: list
    selfadjoint: bool = False
    label: object = None

    def __post_init__(self):
        self.coords = [asmatrix(c) for c in self.coords]
        if not self.coords:
            raise DimensionMismatchError("a matrix point needs at least one coordinate")
        k = self.coords[0].shape[0]
        for c in self.coords:
            if c.shape != (k, k):
                raise DimensionMismatchError("coordinates must be square, one level")
        if self.selfadjoint:
            for c in self.coords:
                nrm = max(np.linalg.norm(c), 1.0)
                if np.linalg.norm(c - c.conj().T) > 1e-10 * nrm:
                    raise NotHermitianError(
                        "selfadjoint point has a non-Hermitian coordinate"
                    )

    @property
    def level(self) -> int:
        return self.coords[0].shape[0]

    @property
    def nvars(self) -> int:
        return len(self.coords)


@dataclass
class MatrixConvexCombination:
    """Terms (gamma_j, x_j) with sum gamma_j* gamma_j = I_n."""

    n: int
    terms: list = field(default_factory=list)

    def __post_init__(self):
        checked = []
        for gamma, point in self.terms:
            gamma = asmatrix(gamma)
            if gamma.shape != (point.level, self.n):
                raise DimensionMismatchError(
                    f"coefficient shape {gamma.shape} does not match "
                    f"point level {point.level} and target level {self.n}"
                )
            checked.append((gamma, point))
        self.terms = checked

    def defect(self) -> float:
        s = np.zeros((self.n, self.n), dtype=np.complex128)
        for gamma, _ in self.terms:
            s += gamma.conj().T @ gamma
        return float(np.linalg.norm(s - np.eye(self.n)))

    def validate(self, tol: float = 1e-10):
        if self.defect() > tol:
            raise InvalidCombinationError(
                f"coefficients sum to identity with defect {self.defect():.3e} > {tol:.1e}"
            )

    def barycenter(self) -> list:
        """The represented point sum_j gamma_j* x_j gamma_j, coordinatewise."""
        d = self.terms[0][1].nvars
        out = [np.zeros((self.n, self.n), dtype=np.complex128) for _ in range(d)]
        for gamma, point in self.terms:
            g = gamma.conj().T
            for i in range(d):
                out[i] += g @ point.coords[i] @ gamma
        return out


@dataclass
class LiftedPoint:
    """One term of a combination, pushed to the trace-normalized graph.

    alpha = gamma* gamma has ntrace 1; value = gamma* x gamma
    coordinatewise; weight is the normalized trace the term carried.
    ``gamma`` itself is kept because alpha determines it only up to a left
    isometry, and reconstructing a combination needs the actual
    coefficient.
    """

    alpha: np.ndarray
    value: list
    weight: float
    gamma: np.ndarray


def lift_combination(c: MatrixConvexCombination, tol: Tolerances = DEFAULT_TOL):
    """Lift a combination to weighted trace-normalized terms.

    Terms with zero coefficient are dropped; each survivor (beta_j, x_j)
    becomes weight t_j = ntrace(beta_j* beta_j) and normalized coefficient
    gamma_j = t_j^{-1/2} beta_j.  The weights are a classical convex
    combination: t_j > 0, sum t_j = 1.

    Returns
    -------
    (weights, lifted) : list of floats and list of LiftedPoint.
    """
    c.validate(1e-10)
    weights = []
    lifted = []
    for beta, point in c.terms:
        t = ntrace(beta.conj().T @ beta)
        if t <= 0.0:
            continue
        gamma = beta / np.sqrt(t)
        alpha = gamma.conj().T @ gamma
        value = [gamma.conj().T @ x @ gamma for x in point.coords]
        weights.append(t)
        lifted.append(LiftedPoint(alpha=alpha, value=value, weight=t, gamma=gamma))
    return weights, lifted


def unlift_point(weights, lifted, points, tol: Tolerances = DEFAULT_TOL
                 ) -> MatrixConvexCombination:
    """Rebuild a matrix convex combination from lifted terms.

    Inverse of :func:`lift_combination`: beta_j = w_j^{1/2} gamma_j.  The
    weights must sum to 1 and the alphas must average to the identity;
    a final exact normalization absorbs accumulated roundoff so the
    output satisfies sum beta* beta = I_n to machine precision.
    """
    if len(weights) != len(lifted) or len(lifted) != len(points):
        raise DimensionMismatchError("weights, lifted terms and points must align")
    if not lifted:
        raise ZeroCoefficientError("cannot unlift an empty combination")
    wsum = float(np.sum(weights))
    if abs(wsum - 1.0) > 1e-10:
        raise NotNormalizedError(f"weights sum to {wsum!r}, expected 1")
    n = lifted[0].alpha.shape[0]
    mean_alpha = np.zeros((n, n), dtype=np.complex128)
    for w, lp in zip(weights, lifted):
        mean_alpha += w * lp.alpha
    if np.linalg.norm(mean_alpha - np.eye(n)) > 1e-9:
        raise NotNormalizedError(
            "weighted alphas do not average to the identity "
            f"(defect {np.linalg.norm(mean_alpha - np.eye(n)):.3e})"
        )
    betas = [np.sqrt(w) * lp.gamma for w, lp in zip(weights, lifted)]
    s = np.zeros((n, n), dtype=np.complex128)
    for b in betas:
        s += b.conj().T @ b
    corr = inv_sqrt_psd(s, tol)
    betas = [b @ corr for b in betas]
    return MatrixConvexCombination(n=n, terms=list(zip(betas, points)))


def compress_to_surjective(gamma, point: MatrixPoint, tol: Tolerances = DEFAULT_TOL):
    """Replace (gamma, x) by an equivalent term with surjective coefficient.

    Factor gamma = delta beta with delta an isometry onto range(gamma) and
    beta = delta* gamma surjective; the point is compressed to
    delta* x delta.  The pair (gamma* gamma, gamma* x gamma) is unchanged.
    """
    gamma = asmatrix(gamma)
    k, n = gamma.shape
    if k != point.level:
        raise DimensionMismatchError("coefficient height must match point level")
    u, s, _ = np.linalg.svd(gamma)
    if s.size == 0 or s[0] <= 0.0:
        raise ZeroCoefficientError("cannot compress a zero coefficient")
    r = int(np.count_nonzero(s > tol.rank_tol * s[0]))
    delta = u[:, :r]
    beta = delta.conj().T @ gamma
    compressed = MatrixPoint(
        coords=[delta.conj().T @ x @ delta for x in point.coords],
        selfadjoint=point.selfadjoint,
        label=point.label,
    )
    return beta, compressed


def _lift_vector(lp: LiftedPoint, selfadjoint: bool) -> np.ndarray:
    """Real affine coordinates of a lifted term.

    Hermitian data uses the diagonal plus the strict upper triangle;
    general coordinates contribute real and imaginary parts of every
    entry.
    """
    parts = [hvec(herm_part(lp.alpha))]
    for v in lp.value:
        if selfadjoint:
            parts.append(hvec(herm_part(v)))
        else:
            parts.append(np.concatenate([v.real.ravel(), v.imag.ravel()]))
    return np.concatenate(parts)


def caratheodory_reduce(c: MatrixConvexCombination, tol: Tolerances = DEFAULT_TOL
                        ) -> MatrixConvexCombination:
    """Prune a matrix convex combination to affinely independent terms.

    The combination is lifted to weighted points in the affine space of
    trace-normalized pairs, where classical Caratheodory elimination
    applies: while the lifted vectors are affinely dependent, shift the
    weights along a dependence direction until the smallest ratio
    t_j / c_j hits zero (ties take the smallest index) and drop the
    vanished terms.  Surviving points are original points; only the
    coefficients are rescaled.  The output length is at most
    n^2 (2d + 1), or n^2 (d + 1) when every point is selfadjoint.

    Eliminations are swept a whole null basis at a time: after a
    dependence direction retires a term, the remaining basis vectors are
    Gaussian-updated to vanish on the retired column, so they stay valid
    directions for the shrunken support.  One SVD then pays for up to
    (terms - rank) removals instead of a single one.
    """
    weights, lifted = lift_combination(c, tol)
    if not lifted:
        raise ZeroCoefficientError("combination has no nonzero terms")
    points = [point for beta, point in c.terms
              if ntrace(beta.conj().T @ beta) > 0.0]
    selfadjoint = all(p.selfadjoint for p in points)
    vecs = [_lift_vector(lp, selfadjoint) for lp in lifted]

    t = np.array(weights, dtype=np.float64)
    alive = list(range(len(lifted)))
    while len(alive) > 1:
        a = np.empty((vecs[0].size + 1, len(alive)))
        for col, j in enumerate(alive):
            a[:-1, col] = vecs[j]
            a[-1, col] = 1.0
        _, s, vh = np.linalg.svd(a)
        thresh = 1e-11 * max(s[0], 1.0)
        rank = int(np.count_nonzero(s > thresh))
        if rank >= len(alive):
            break
        basis = np.array(vh[rank:], dtype=np.float64)
        ta = t[alive].copy()
        pinned = np.zeros(len(alive), dtype=bool)
        for row in range(basis.shape[0]):
            cdir = basis[row]
            peak = float(np.abs(cdir).max())
            if peak <= 1e-14:
                continue
            if cdir.max() < -cdir.min():
                cdir = -cdir
            pos = (cdir > 1e-12 * peak) & ~pinned
            if not np.any(pos):
                continue
            ratios = np.full(len(alive), np.inf)
            ratios[pos] = ta[pos] / cdir[pos]
            pivot = int(np.argmin(ratios))
            theta = ratios[pivot]
            ta = np.clip(ta - theta * cdir, 0.0, None)
            ta[pivot] = 0.0
            pinned[pivot] = True
            rest = basis[row + 1:]
            if rest.size:
                lam = rest[:, pivot] / cdir[pivot]
                # directions needing a huge multiplier lose too much
                # accuracy; defer them to the next SVD pass instead
                bad = np.abs(lam) > 1e8
                rest -= np.outer(np.where(bad, 0.0, lam), cdir)
                rest[bad] = 0.0
                norms = np.linalg.norm(rest, axis=1)
                keep = norms > 1e-12
                rest[keep] /= norms[keep, None]
                rest[~keep] = 0.0
        for col, j in enumerate(alive):
            t[j] = ta[col]
        alive = [j for j in alive if t[j] > 0.0]
    total = float(np.sum(t[alive]))
    surv_w = [t[j] / total for j in alive]
    surv_l = [lifted[j] for j in alive]
    surv_p = [points[j] for j in alive]
    return unlift_point(surv_w, surv_l, surv_p, tol)


def _commutant_basis(coords, null_tol: float = 1e-10):
    """Orthonormal basis (as vectors) of the commutant of a *-closed family."""
    n = coords[0].shape[0]
    eye = np.eye(n)
    rows = []
    for a in coords:
        rows.append(np.kron(a, eye) - np.kron(eye, a.T))
        ah = a.conj().T
        rows.append(np.kron(ah, eye) - np.kron(eye, ah.T))
    k = np.vstack(rows)
    _, s, vh = np.linalg.svd(k)
    smax = s[0] if s.size else 0.0
    thresh = null_tol * max(smax, 1.0)
    null = [vh[i].conj() for i in range(vh.shape[0]) if i >= s.size or s[i] <= thresh]
    return null


def irreducible_split(x: MatrixPoint, tol: Tolerances = DEFAULT_TOL, seed: int = 0):
    """Split a matrix point along a reducing projection, if one exists.

    The commutant of the coordinates together with their adjoints (and the
    identity) is computed as a null space; a one-dimensional commutant
    certifies irreducibility and returns None.  Otherwise a seeded random
    Hermitian commutant element is diagonalized and its widest spectral
    gap yields complementary isometries beta, delta with

        x = beta (beta* x beta) beta* + delta (delta* x delta) delta*.

    Returns
    -------
    None if irreducible, else (beta, delta, x_beta, x_delta).
    """
    n = x.level
    if n == 1:
        return None
    null = _commutant_basis(x.coords)
    if len(null) <= 1:
        return None
    rng = np.random.default_rng(seed)
    h = None
    for _ in range(8):
        coeff = rng.standard_normal(len(null)) + 1j * rng.standard_normal(len(null))
        p = np.zeros((n, n), dtype=np.complex128)
        for ci, v in zip(coeff, null):
            p += ci * v.reshape(n, n)
        cand = herm_part(p)
        w = np.linalg.eigvalsh(cand)
        if w[-1] - w[0] > 1e-8 * max(1.0, abs(w[0]), abs(w[-1])):
            h = cand
            break
    if h is None:
        return None
    w, q = herm_eig(h, tol)
    gap_at = int(np.argmax(np.diff(w)))
    beta = q[:, : gap_at + 1]
    delta = q[:, gap_at + 1:]
    x_beta = MatrixPoint(
        coords=[beta.conj().T @ c @ beta for c in x.coords],
        selfadjoint=x.selfadjoint,
        label=x.label,
    )
    x_delta = MatrixPoint(
        coords=[delta.conj().T @ c @ delta for c in x.coords],
        selfadjoint=x.selfadjoint,
        label=x.label,
    )
    return beta, delta, x_beta, x_delta


def decompose_irreducible(x: MatrixPoint, tol: Tolerances = DEFAULT_TOL, seed: int = 0):
    """Recursively split a point into irreducible summands.

    Returns a list of (embedding, leaf) pairs where each embedding is an
    isometry from the leaf level into the level of x, the embedded ranges
    sum to the identity, and sum_i V_i leaf_i V_i* reproduces x.  Levels
    strictly decrease at each split, so recursion depth is at most the
    level of x.
    """
    split = irreducible_split(x, tol, seed)
    if split is None:
        eye = np.eye(x.level, dtype=np.complex128)
        return [(eye, x)]
    beta, delta, x_beta, x_delta = split
    out = []
    for emb, sub in ((beta, x_beta), (delta, x_delta)):
        for v, leaf in decompose_irreducible(sub, tol, seed):
            out.append((emb @ v, leaf))
    return out
