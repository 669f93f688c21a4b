"""Dense complex-matrix kernels shared by every construction.

Matrices are plain ``numpy.ndarray`` with dtype complex128, row-major.
The routines here fix the deterministic conventions (eigenvalue order,
factor phases, complement bases) that the dilation constructions rely on
for reproducible output.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatchError,
    NonSquareError,
    NotHermitianError,
    NotIsometricError,
    NotPSDError,
    ShapeMismatchError,
)

__all__ = [
    "Tolerances",
    "DEFAULT_TOL",
    "asmatrix",
    "herm_part",
    "herm_eig",
    "numerical_rank_factor",
    "psd_project",
    "complete_isometry_to_unitary",
    "polar_isometry",
    "inv_sqrt_psd",
    "hvec",
    "hunvec",
]


@dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds used across the package.

    rank_tol      relative eigenvalue cutoff for numerical rank
    psd_tol       relative slack allowed below zero in PSD checks
    residual_tol  acceptance threshold for dilation moment residuals
    fit_tol       target residual for measure fitting
    herm_tol      relative anti-Hermitian defect accepted before symmetrizing
    """

    rank_tol: float = 1e-10
    psd_tol: float = 1e-9
    residual_tol: float = 1e-8
    fit_tol: float = 1e-7
    herm_tol: float = 1e-8

    def __post_init__(self):
        for name in ("rank_tol", "psd_tol", "residual_tol", "fit_tol", "herm_tol"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")
        if self.rank_tol > self.psd_tol:
            raise ValueError("rank_tol must not exceed psd_tol")

    def replace(self, **kw) -> "Tolerances":
        from dataclasses import replace as _replace

        return _replace(self, **kw)


DEFAULT_TOL = Tolerances()


def asmatrix(a) -> np.ndarray:
    """Coerce to a 2-d complex128 array, rejecting NaN/Inf entries."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2:
        raise ShapeMismatchError(f"expected a 2-d array, got ndim={m.ndim}")
    if not np.all(np.isfinite(m)):
        raise ShapeMismatchError("matrix contains NaN or Inf entries")
    return m


def herm_part(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + a.conj().T)


def herm_eig(a, tol: Tolerances = DEFAULT_TOL):
    """Eigendecomposition of a Hermitian matrix.

    The input is symmetrized to (A + A*)/2 first; an anti-Hermitian part
    larger than ``herm_tol * ||A||_F`` is an error rather than silently
    discarded.  Eigenvalues come back in ascending order (the LAPACK
    convention), eigenvectors as columns of a unitary.

    Returns
    -------
    (w, q) : eigenvalues (real, ascending) and eigenvector matrix.
    """
    a = asmatrix(a)
    n, m = a.shape
    if n != m:
        raise NonSquareError(f"herm_eig needs a square matrix, got {n}x{m}")
    norm = np.linalg.norm(a)
    defect = np.linalg.norm(a - a.conj().T)
    if norm > 0 and defect > tol.herm_tol * norm:
        raise NotHermitianError(
            f"anti-Hermitian defect {defect:.3e} exceeds {tol.herm_tol:.1e} * ||A||"
        )
    w, q = np.linalg.eigh(herm_part(a))
    return w, q


def _canonical_phases(w: np.ndarray) -> np.ndarray:
    """Rotate each row of ``w`` so its largest-magnitude entry is real >= 0.

    Pure output convention: rows keep their span and norms, but the factor
    becomes independent of the eigensolver's arbitrary per-vector phase.
    """
    out = w.copy()
    for i in range(out.shape[0]):
        row = out[i]
        j = int(np.argmax(np.abs(row)))
        piv = row[j]
        if np.abs(piv) > 0:
            out[i] = row * (np.abs(piv) / piv)
    return out


def numerical_rank_factor(m, tol: Tolerances = DEFAULT_TOL):
    """Factor a PSD matrix as W* W with W of full numerical rank.

    Eigenvalues below ``rank_tol * lambda_max`` are truncated; an
    eigenvalue below ``-psd_tol * ||M||`` raises NotPSD.  Rows of W are
    ordered by descending eigenvalue and phase-normalized so repeated runs
    give the identical factor.

    Returns
    -------
    (w, r) : W of shape (r, dim) with ||W* W - M||_F <= 10 * rank_tol * ||M||_F,
             and the numerical rank r.
    """
    m = asmatrix(m)
    lam, q = herm_eig(m, tol)
    if lam.size == 0:
        return np.zeros((0, 0), dtype=np.complex128), 0
    lmax = float(lam[-1])
    scale = max(abs(float(lam[0])), abs(lmax))
    if lam[0] < -tol.psd_tol * max(scale, 1e-300):
        raise NotPSDError(
            f"matrix is not PSD: min eigenvalue {lam[0]:.6e} "
            f"(threshold {-tol.psd_tol * scale:.1e})",
            min_eig=float(lam[0]),
        )
    if lmax <= 0:
        return np.zeros((0, m.shape[0]), dtype=np.complex128), 0
    keep = lam > tol.rank_tol * lmax
    r = int(np.count_nonzero(keep))
    idx = np.nonzero(keep)[0][::-1]  # descending eigenvalue order
    w = (np.sqrt(lam[idx])[:, None]) * q[:, idx].conj().T
    return _canonical_phases(w), r


def psd_project(a, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Nearest positive semidefinite matrix in Frobenius norm.

    Symmetrizes, then clips negative eigenvalues to zero.  Idempotent up
    to floating point; PSD inputs come back unchanged to machine
    precision.
    """
    a = asmatrix(a)
    if a.shape[0] != a.shape[1]:
        raise NonSquareError("psd_project needs a square matrix")
    w, q = np.linalg.eigh(herm_part(a))
    w = np.clip(w, 0.0, None)
    return herm_part((q * w) @ q.conj().T)


def polar_isometry(a: np.ndarray) -> np.ndarray:
    """Nearest matrix with orthonormal columns (polar factor), for tall a."""
    u, _, vh = np.linalg.svd(a, full_matrices=False)
    return u @ vh


def inv_sqrt_psd(s: np.ndarray, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Inverse square root of a Hermitian positive definite matrix."""
    w, q = herm_eig(s, tol)
    if w[0] <= tol.rank_tol * max(w[-1], 1e-300):
        raise NotPSDError(
            f"matrix numerically singular (min eigenvalue {w[0]:.3e}), "
            "cannot form inverse square root",
            min_eig=float(w[0]),
        )
    return (q * (1.0 / np.sqrt(w))) @ q.conj().T


def _index_order_complement(basis: np.ndarray) -> np.ndarray:
    """Orthonormal complement of span(basis), built deterministically.

    Standard basis vectors are orthogonalized against the accumulated set
    in index order 0, 1, ...; a candidate is kept when its residual is
    numerically nonzero.  Two Gram-Schmidt passes keep the result
    orthonormal to machine precision.
    """
    r, k = basis.shape
    need = r - k
    cols = [basis[:, j] for j in range(k)]
    out = []
    for j in range(r):
        if len(out) == need:
            break
        v = np.zeros(r, dtype=np.complex128)
        v[j] = 1.0
        for _ in range(2):
            for c in cols:
                v = v - c * (np.vdot(c, v))
        nrm = np.linalg.norm(v)
        if nrm > 1e-8:
            v = v / nrm
            cols.append(v)
            out.append(v)
    if len(out) != need:
        raise NotIsometricError("could not complete an orthonormal complement")
    if need == 0:
        return np.zeros((r, 0), dtype=np.complex128)
    return np.column_stack(out)


def complete_isometry_to_unitary(u0, domain_basis, range_basis,
                                 tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Extend a partial isometry to a unitary on the whole space.

    ``u0`` must map span(domain_basis) isometrically onto
    span(range_basis); both bases are orthonormal with equally many
    columns.  The extension pairs the two orthonormal complements built by
    index-order Gram-Schmidt over the standard basis, so the completion is
    deterministic: completing e1 -> e2 in C^2 yields the permutation
    [[0, 1], [1, 0]].
    """
    u0 = asmatrix(u0)
    d = asmatrix(domain_basis)
    rg = asmatrix(range_basis)
    r = u0.shape[0]
    if u0.shape[1] != r:
        raise NonSquareError("partial map must be square")
    if d.shape[0] != r or rg.shape[0] != r:
        raise DimensionMismatchError("basis height does not match the partial map")
    if d.shape[1] != rg.shape[1]:
        raise DimensionMismatchError(
            f"domain has dimension {d.shape[1]} but range has {rg.shape[1]}"
        )
    k = d.shape[1]
    for name, b in (("domain", d), ("range", rg)):
        if k and np.linalg.norm(b.conj().T @ b - np.eye(k)) > 1e-10 * max(1, k):
            raise NotIsometricError(f"{name} basis is not orthonormal")
    if k:
        d = polar_isometry(d)
        rg = polar_isometry(rg)
        b = u0 @ d
        iso_defect = np.linalg.norm(b.conj().T @ b - np.eye(k))
        onto_defect = np.linalg.norm(b - rg @ (rg.conj().T @ b))
        if iso_defect > 1e-10 * max(1, k) or onto_defect > 1e-10 * max(1, k):
            raise NotIsometricError(
                f"partial map is not an isometry onto the range span "
                f"(isometry defect {iso_defect:.3e}, range defect {onto_defect:.3e})"
            )
        b = polar_isometry(b)
    else:
        b = np.zeros((r, 0), dtype=np.complex128)
    dc = _index_order_complement(d)
    rc = _index_order_complement(b if k else rg)
    u = b @ d.conj().T + rc @ dc.conj().T
    if np.linalg.norm(u.conj().T @ u - np.eye(r)) > 1e-12 * max(1, r):
        raise NotIsometricError("completion failed to produce a unitary")
    return u


def hvec(h: np.ndarray) -> np.ndarray:
    """Real coordinates of a Hermitian matrix (isometric for Frobenius).

    Layout: the real diagonal, then sqrt(2) * (Re, Im) of the strict upper
    triangle read row by row.
    """
    n = h.shape[0]
    out = np.empty(n * n, dtype=np.float64)
    out[:n] = h.diagonal().real
    pos = n
    s = np.sqrt(2.0)
    for p in range(n):
        for q in range(p + 1, n):
            out[pos] = s * h[p, q].real
            out[pos + 1] = s * h[p, q].imag
            pos += 2
    return out


def hunvec(v: np.ndarray, n: int) -> np.ndarray:
    """Inverse of :func:`hvec`."""
    h = np.zeros((n, n), dtype=np.complex128)
    h[np.diag_indices(n)] = v[:n]
    pos = n
    s = 1.0 / np.sqrt(2.0)
    for p in range(n):
        for q in range(p + 1, n):
            z = s * (v[pos] + 1j * v[pos + 1])
            h[p, q] = z
            h[q, p] = np.conj(z)
            pos += 2
    return h
