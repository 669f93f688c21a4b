"""Atomic matrix measures: fitting, normalization, and Naimark assembly.

A measure is a finite list of atoms, each either a point z with a PSD
matrix weight (commutative case) or a finite-dimensional unitary
representation with a PSD Choi block (q-commuting case).  Moments of the
measure are linear in the weights, which is what the fitter exploits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .convex import MatrixConvexCombination, MatrixPoint
from .errors import (
    DimensionMismatchError,
    GridEmptyError,
    InfeasibleError,
    NonPSDWeightError,
    NotIsometricError,
    NotNormalizedError,
    ShapeMismatchError,
)
from .linalg import (
    DEFAULT_TOL,
    Tolerances,
    asmatrix,
    herm_part,
    hunvec,
    hvec,
    inv_sqrt_psd,
    numerical_rank_factor,
)
from .moments import Dilation, MomentTable, word_image

__all__ = [
    "PointAtom",
    "IrrepAtom",
    "AtomicMeasure",
    "FitOptions",
    "circle_grid",
    "torus_grid",
    "annulus_grid",
    "clock_shift_irrep",
    "clock_phase_grid",
    "laurent_scalar",
    "fit_matrix_measure",
    "assemble_atomic_dilation",
    "measure_to_combination",
    "combination_to_measure",
]


def laurent_scalar(idx, z) -> complex:
    """prod_i z_i^{n_i} with honest negative powers."""
    acc = 1.0 + 0.0j
    for zi, ni in zip(np.atleast_1d(z), np.atleast_1d(idx)):
        if ni == 0:
            continue
        if zi == 0:
            raise ShapeMismatchError("negative power of a zero coordinate")
        acc *= zi ** int(ni)
    return acc


@dataclass
class PointAtom:
    """A point of C^nu with a PSD d x d weight (None until fitted)."""

    point: np.ndarray
    weight: np.ndarray | None = None

    def __post_init__(self):
        self.point = np.atleast_1d(np.asarray(self.point, dtype=np.complex128))
        if self.weight is not None:
            self.weight = asmatrix(self.weight)

    @property
    def nu(self) -> int:
        return self.point.size

    def block_size(self, dim: int) -> int:
        return dim

    def evaluate(self, idx, evaluator=None) -> complex:
        if evaluator is not None:
            return complex(evaluator(idx, self.point))
        return laurent_scalar(idx, self.point)


@dataclass
class IrrepAtom:
    """A representation by unitary generator images, weighted by a Choi block.

    The Choi block G lives on C^b tensor C^d (row-major pairing); its
    rank-one pieces are the coefficient matrices gamma: C^d -> C^b of the
    matrix convex combination the atom encodes.  ``scale_pairs`` records
    exchange relations (i, j, q) meaning G_j G_i = q G_i G_j, used by
    validation and verification.
    """

    generators: list
    weight: np.ndarray | None = None
    scale_pairs: list = field(default_factory=list)

    def __post_init__(self):
        self.generators = [asmatrix(g) for g in self.generators]
        b = self.generators[0].shape[0]
        for g in self.generators:
            if g.shape != (b, b):
                raise DimensionMismatchError("generator images must share one size")
        if self.weight is not None:
            self.weight = asmatrix(self.weight)

    @property
    def rep_dim(self) -> int:
        return self.generators[0].shape[0]

    def block_size(self, dim: int) -> int:
        return self.rep_dim * dim

    def word(self, idx, rule: str = "ordered") -> np.ndarray:
        return word_image(idx, self.generators, rule=rule)

    def contribution(self, idx, dim: int, rule: str = "ordered") -> np.ndarray:
        """The d x d moment contribution of this atom at one index."""
        b = self.rep_dim
        g4 = self.weight.reshape(b, dim, b, dim)
        return np.einsum("st,tqsp->pq", self.word(idx, rule), g4)


@dataclass
class AtomicMeasure:
    """Finitely many weighted atoms, normalized to unit total mass."""

    dim: int
    atoms: list
    defect: float = 0.0
    fit_residual: float | None = None
    index_rule: str = "laurent"

    def kind(self) -> str:
        kinds = {type(a).__name__ for a in self.atoms}
        if len(kinds) > 1:
            raise ShapeMismatchError(f"mixed atom kinds in one measure: {kinds}")
        return "irrep" if kinds == {"IrrepAtom"} else "point"

    def unit_matrix(self) -> np.ndarray:
        s = np.zeros((self.dim, self.dim), dtype=np.complex128)
        for a in self.atoms:
            if isinstance(a, PointAtom):
                s += a.weight
            else:
                b = a.rep_dim
                g4 = a.weight.reshape(b, self.dim, b, self.dim)
                s += np.einsum("sqsp->pq", g4)
        return s

    def moment(self, idx, evaluator=None) -> np.ndarray:
        m = np.zeros((self.dim, self.dim), dtype=np.complex128)
        for a in self.atoms:
            if isinstance(a, PointAtom):
                m += a.evaluate(idx, evaluator) * a.weight
            else:
                m += a.contribution(idx, self.dim, self.index_rule)
        return m

    def validate(self, tol: Tolerances = DEFAULT_TOL):
        for a in self.atoms:
            w = herm_part(a.weight)
            wmin = float(np.linalg.eigvalsh(w)[0])
            scale = max(float(np.linalg.norm(w)), 1.0)
            if wmin < -tol.psd_tol * scale:
                raise NonPSDWeightError(
                    f"atom weight has eigenvalue {wmin:.3e} below -psd_tol"
                )
            if isinstance(a, IrrepAtom):
                for g in a.generators:
                    if np.linalg.norm(g.conj().T @ g - np.eye(g.shape[0])) > 1e-10:
                        raise NotIsometricError("irrep generator image not unitary")
                for (i, j, q) in a.scale_pairs:
                    gi, gj = a.generators[i], a.generators[j]
                    if np.linalg.norm(gj @ gi - q * (gi @ gj)) > 1e-10:
                        raise ShapeMismatchError(
                            "irrep generators violate the declared exchange relation"
                        )

    def normalized(self, tol: Tolerances = DEFAULT_TOL) -> "AtomicMeasure":
        """Congruence-rescale the weights so the total mass is exactly I.

        P_j -> S^{-1/2} P_j S^{-1/2} with S the current unit matrix; this
        preserves positive semidefiniteness, unlike an additive shift.
        """
        s = self.unit_matrix()
        defect = float(np.linalg.norm(s - np.eye(self.dim)))
        # congruence only repairs a mass matrix that is safely invertible
        if defect > 0.1 * max(1.0, self.dim):
            raise NotNormalizedError(
                f"measure mass defect {defect:.3e} too large to renormalize"
            )
        r = inv_sqrt_psd(s, tol)
        atoms = []
        for a in self.atoms:
            if isinstance(a, PointAtom):
                atoms.append(PointAtom(a.point, herm_part(r @ a.weight @ r)))
            else:
                b = a.rep_dim
                g4 = a.weight.reshape(b, self.dim, b, self.dim)
                g4 = np.einsum("sPtQ,Pp,Qq->sptq", g4, r, r.conj())
                g = g4.reshape(b * self.dim, b * self.dim)
                atoms.append(IrrepAtom(a.generators, herm_part(g),
                                       scale_pairs=list(a.scale_pairs)))
        return AtomicMeasure(dim=self.dim, atoms=atoms, defect=defect,
                             fit_residual=self.fit_residual,
                             index_rule=self.index_rule)

    def pruned(self, prune_tol: float) -> "AtomicMeasure":
        atoms = [a for a in self.atoms
                 if a.weight is not None
                 and np.linalg.norm(a.weight) >= prune_tol]
        if not atoms:
            raise GridEmptyError("pruning removed every atom")
        return AtomicMeasure(dim=self.dim, atoms=atoms, defect=self.defect,
                             fit_residual=self.fit_residual,
                             index_rule=self.index_rule)


def circle_grid(nodes: int, radius: float = 1.0) -> list:
    """Equispaced points on a circle |z| = radius."""
    return [PointAtom(point=[radius * np.exp(2j * np.pi * j / nodes)])
            for j in range(nodes)]


def torus_grid(nodes: int, nu: int) -> list:
    """The nodes^nu lattice of roots of unity on the nu-torus."""
    roots = [np.exp(2j * np.pi * j / nodes) for j in range(nodes)]
    atoms = []
    for idx in np.ndindex(*([nodes] * nu)):
        atoms.append(PointAtom(point=[roots[i] for i in idx]))
    return atoms


def annulus_grid(nodes: int, r: float) -> list:
    """Equispaced points on both boundary circles of the annulus r <= |z| <= 1."""
    if not 0.0 < r < 1.0:
        raise ShapeMismatchError(f"annulus radius must lie in (0, 1), got {r}")
    return circle_grid(nodes, 1.0) + circle_grid(nodes, r)


def clock_shift_irrep(a: int, b: int, theta=(0.0, 0.0)) -> IrrepAtom:
    """The b-dimensional clock-and-shift pair at phases theta.

    U1 = e^{i theta_1} diag(1, q, ..., q^{b-1}) and U2 = e^{i theta_2} X
    with X the cyclic downshift satisfy U2 U1 = q U1 U2 for
    q = exp(2 pi i a / b), exactly up to roundoff in the roots of unity.
    """
    if not (isinstance(a, (int, np.integer)) and isinstance(b, (int, np.integer))):
        raise ShapeMismatchError(
            "rotation parameter must be rational: integers a, b required "
            "(irrational angles admit no finite-dimensional representation)"
        )
    if b < 1:
        raise ShapeMismatchError("denominator b must be a positive integer")
    q = np.exp(2j * np.pi * a / b)
    clock = np.diag(q ** np.arange(b)).astype(np.complex128)
    shift = np.zeros((b, b), dtype=np.complex128)
    for j in range(b):
        shift[(j - 1) % b, j] = 1.0
    t1, t2 = float(theta[0]), float(theta[1])
    return IrrepAtom(
        generators=[np.exp(1j * t1) * clock, np.exp(1j * t2) * shift],
        scale_pairs=[(0, 1, q)],
    )


def clock_phase_grid(a: int, b: int, nodes: int) -> list:
    """Clock-shift irreps over the nodes x nodes lattice of phase pairs."""
    step = 2.0 * np.pi / nodes
    return [clock_shift_irrep(a, b, (step * i, step * j))
            for i in range(nodes) for j in range(nodes)]


@dataclass
class FitOptions:
    max_iter: int = 20000
    rho: float = 1.0
    seed: int = 0
    prune_tol: float = 1e-9
    check_every: int = 25
    evaluator: object = None


_HBASIS_CACHE: dict = {}


def _herm_to_cvec(m: int) -> np.ndarray:
    """Complex matrix of shape (m^2, m^2) sending hvec(H) to H.ravel()."""
    if m not in _HBASIS_CACHE:
        phi = np.empty((m * m, m * m), dtype=np.complex128)
        e = np.zeros(m * m)
        for k in range(m * m):
            e[k] = 1.0
            phi[:, k] = hunvec(e, m).ravel()
            e[k] = 0.0
        _HBASIS_CACHE[m] = phi
    return _HBASIS_CACHE[m]


def _point_rows(e: complex, d: int) -> np.ndarray:
    phi = e * _herm_to_cvec(d)
    return np.vstack([phi.real, phi.imag])


def _irrep_rows(word: np.ndarray, b: int, d: int) -> np.ndarray:
    phi = _herm_to_cvec(b * d)
    m2 = (b * d) ** 2
    cols = np.empty((d * d, m2), dtype=np.complex128)
    for k in range(m2):
        g4 = phi[:, k].reshape(b, d, b, d)
        cols[:, k] = np.einsum("st,tqsp->pq", word, g4).ravel()
    return np.vstack([cols.real, cols.imag])


def _irrep_unit_rows(b: int, d: int) -> np.ndarray:
    phi = _herm_to_cvec(b * d)
    m2 = (b * d) ** 2
    cols = np.empty((d * d, m2), dtype=np.float64)
    for k in range(m2):
        g4 = phi[:, k].reshape(b, d, b, d)
        cols[:, k] = hvec(np.einsum("sqsp->pq", g4))
    return cols


def fit_matrix_measure(targets: MomentTable, grid: list,
                       tol: Tolerances = DEFAULT_TOL,
                       options: FitOptions | None = None) -> AtomicMeasure:
    """Fit PSD atom weights on a fixed grid to prescribed moments.

    Solves  min sum_{n != 0} || sum_j eval(n, j) P_j - L_n ||_F^2  over
    PSD weights subject to the exact unit constraint at index 0, by ADMM
    splitting between the PSD cone (psd_project blockwise) and the
    constrained least-squares step (one prefactored KKT solve).  Raises
    Infeasible when the residual stays above fit_tol at the iteration
    cap; atoms whose fitted weight is below prune_tol are dropped.
    """
    if not grid:
        raise GridEmptyError("empty atom grid")
    opts = options or FitOptions()
    d = targets.dim
    indices = [idx for idx in targets.indices() if any(i != 0 for i in idx)]
    sizes = [a.block_size(d) for a in grid]
    offsets = np.concatenate([[0], np.cumsum([m * m for m in sizes])])
    ncols = int(offsets[-1])

    a_mat = np.zeros((2 * d * d * len(indices), ncols))
    t_vec = np.empty(2 * d * d * len(indices))
    for row, idx in enumerate(indices):
        val = targets.value(idx)
        t_vec[row * 2 * d * d:(row + 1) * 2 * d * d] = np.concatenate(
            [val.real.ravel(), val.imag.ravel()])
        for j, atom in enumerate(grid):
            if isinstance(atom, PointAtom):
                block = _point_rows(atom.evaluate(idx, opts.evaluator), d)
            else:
                block = _irrep_rows(atom.word(idx, targets.index_rule),
                                    atom.rep_dim, d)
            a_mat[row * 2 * d * d:(row + 1) * 2 * d * d,
                  offsets[j]:offsets[j + 1]] = block
    c_mat = np.zeros((d * d, ncols))
    for j, atom in enumerate(grid):
        if isinstance(atom, PointAtom):
            c_mat[:, offsets[j]:offsets[j + 1]] = np.eye(d * d)
        else:
            c_mat[:, offsets[j]:offsets[j + 1]] = _irrep_unit_rows(atom.rep_dim, d)
    c_vec = hvec(np.eye(d, dtype=np.complex128))

    gram = a_mat.T @ a_mat
    atb = a_mat.T @ t_vec
    rho = opts.rho

    def factor(rho_val):
        kkt = np.zeros((ncols + d * d, ncols + d * d))
        kkt[:ncols, :ncols] = gram + rho_val * np.eye(ncols)
        kkt[:ncols, ncols:] = c_mat.T
        kkt[ncols:, :ncols] = c_mat
        return scipy.linalg.lu_factor(kkt)

    lu = factor(rho)
    rng = np.random.default_rng(opts.seed)
    z = np.zeros(ncols)
    for j, m in enumerate(sizes):
        z[offsets[j]:offsets[j + 1]] = (
            (0.5 + 0.5 * rng.random()) / len(grid)
        ) * hvec(np.eye(m, dtype=np.complex128))
    u = np.zeros(ncols)
    rhs = np.empty(ncols + d * d)
    rhs[ncols:] = c_vec

    uniform = len(set(sizes)) == 1

    def project_blocks(v):
        if uniform:
            # one batched eigh across equal-size blocks instead of a
            # Python loop; phi maps hvec coordinates to raveled matrices
            m = sizes[0]
            phi = _herm_to_cvec(m)
            mats = (v.reshape(len(sizes), m * m) @ phi.T).reshape(-1, m, m)
            mats = (mats + mats.conj().transpose(0, 2, 1)) / 2.0
            w, q = np.linalg.eigh(mats)
            w = np.clip(w, 0.0, None)
            out = (q * w[:, None, :]) @ q.conj().transpose(0, 2, 1)
            out = (out + out.conj().transpose(0, 2, 1)) / 2.0
            return (out.reshape(-1, m * m) @ phi.conj()).real.reshape(-1)
        out = np.empty_like(v)
        for j, m in enumerate(sizes):
            h = hunvec(v[offsets[j]:offsets[j + 1]], m)
            w, q = np.linalg.eigh(herm_part(h))
            w = np.clip(w, 0.0, None)
            out[offsets[j]:offsets[j + 1]] = hvec(herm_part((q * w) @ q.conj().T))
        return out

    fit_tol = tol.fit_tol
    best = math.inf
    resid = math.inf
    for it in range(1, opts.max_iter + 1):
        rhs[:ncols] = atb + rho * (z - u)
        x = scipy.linalg.lu_solve(lu, rhs)[:ncols]
        z_old = z
        z = project_blocks(x + u)
        u = u + x - z
        if it % opts.check_every == 0 or it == opts.max_iter:
            resid = float(np.linalg.norm(a_mat @ z - t_vec))
            unit_def = float(np.linalg.norm(c_mat @ z - c_vec))
            best = min(best, resid)
            if resid <= 0.9 * fit_tol and unit_def <= 1e-9:
                break
            r_primal = float(np.linalg.norm(x - z))
            r_dual = rho * float(np.linalg.norm(z - z_old))
            if it % (opts.check_every * 8) == 0:
                if r_primal > 10.0 * r_dual and rho < 1e4:
                    rho *= 2.0
                    u = u / 2.0
                    lu = factor(rho)
                elif r_dual > 10.0 * r_primal and rho > 1e-4:
                    rho /= 2.0
                    u = u * 2.0
                    lu = factor(rho)

    resid = float(np.linalg.norm(a_mat @ z - t_vec))
    unit_def = float(np.linalg.norm(c_mat @ z - c_vec))
    if resid > fit_tol or unit_def > 1e-8:
        raise InfeasibleError(
            f"fit residual {resid:.6e} (unit defect {unit_def:.1e}) "
            f"did not reach fit_tol {fit_tol:.1e} within {opts.max_iter} iterations",
            residual=resid,
        )
    atoms = []
    for j, atom in enumerate(grid):
        w = hunvec(z[offsets[j]:offsets[j + 1]], sizes[j])
        if isinstance(atom, PointAtom):
            atoms.append(PointAtom(atom.point, w))
        else:
            atoms.append(IrrepAtom(atom.generators, w,
                                   scale_pairs=list(atom.scale_pairs)))
    mu = AtomicMeasure(dim=d, atoms=atoms, defect=unit_def, fit_residual=resid,
                       index_rule=targets.index_rule)
    return mu.pruned(opts.prune_tol)


def assemble_atomic_dilation(mu: AtomicMeasure, indices=None,
                             tol: Tolerances = DEFAULT_TOL) -> Dilation:
    """Build the explicit dilation carried by an atomic measure.

    Point atoms contribute rank(P_j) dimensions each: factor
    P_j = F_j* F_j, stack the F_j into the isometry V, and take
    block-diagonal scalar generators z_{j,i} I.  Irrep atoms contribute
    one b-dimensional block per rank-one piece of the Choi weight, with
    the generator images on the diagonal.  Compressions V* w V then equal
    the measure's moments exactly (up to factorization roundoff).
    """
    mu.validate(tol)
    unit_defect = float(np.linalg.norm(mu.unit_matrix() - np.eye(mu.dim)))
    if unit_defect > 1e-8 * max(1.0, mu.dim):
        raise NotNormalizedError(
            f"measure is not normalized (defect {unit_defect:.3e}); "
            "call .normalized() first"
        )
    d = mu.dim
    kind = mu.kind()
    v_blocks = []
    gen_blocks = []
    if kind == "point":
        nu = mu.atoms[0].nu
        for a in mu.atoms:
            f, r = numerical_rank_factor(herm_part(a.weight), tol)
            if r == 0:
                continue
            v_blocks.append(f)
            gen_blocks.append([zi * np.eye(r, dtype=np.complex128)
                               for zi in a.point])
        ngen = nu
    else:
        ngen = len(mu.atoms[0].generators)
        for a in mu.atoms:
            b = a.rep_dim
            lam, q = np.linalg.eigh(herm_part(a.weight))
            lmax = max(float(lam[-1]), 0.0)
            for k in range(lam.size - 1, -1, -1):
                if lam[k] <= tol.rank_tol * lmax or lam[k] <= 0:
                    break
                gamma = np.sqrt(lam[k]) * q[:, k].reshape(b, d)
                v_blocks.append(gamma)
                gen_blocks.append(a.generators)
    if not v_blocks:
        raise GridEmptyError("measure has no mass to assemble")
    space = int(sum(vb.shape[0] for vb in v_blocks))
    v = np.vstack(v_blocks)
    gens = []
    for i in range(ngen):
        g = np.zeros((space, space), dtype=np.complex128)
        pos = 0
        for vb, blocks in zip(v_blocks, gen_blocks):
            k = vb.shape[0]
            g[pos:pos + k, pos:pos + k] = blocks[i]
            pos += k
        gens.append(g)
    residuals = {"unit_defect": unit_defect}
    if indices is not None:
        worst = 0.0
        for idx in indices:
            # the measure's own moments use honest Laurent powers, so
            # negative indices must be inverse powers here as well
            w = word_image(idx, gens, rule=mu.index_rule, negatives="inverse")
            worst = max(worst, float(np.linalg.norm(
                v.conj().T @ w @ v - mu.moment(idx))))
        residuals["moment_vs_measure"] = worst
    return Dilation(v=v, generators=gens, space_dim=space,
                    provenance="naimark" if kind == "point" else "naimark-irrep",
                    residuals=residuals)


def _canonical_indices(table: MomentTable):
    """Indices whose values pin the whole table.

    Conjugate-closed tables keep one representative per {n, -n} pair;
    tables with genuine negative powers (annulus) keep every nonzero
    index, since z^{-n} is then independent data.
    """
    out = []
    for idx in table.indices():
        nz = [i for i in idx if i != 0]
        if not nz:
            continue
        if not table.symmetric or nz[0] > 0:
            out.append(idx)
    return out


def measure_to_combination(mu: AtomicMeasure, table: MomentTable,
                           tol: Tolerances = DEFAULT_TOL, evaluator=None):
    """View a measure as a matrix convex combination of its pure atoms.

    Each rank-one piece of an atom weight becomes a term; the point of an
    atom collects Hermitian real/imaginary parts of the atom's word images
    at the table's canonical indices, so points are selfadjoint and the
    Caratheodory bound n^2 (d+1) applies.  Labels record the grid index
    for reassembly.
    """
    indices = _canonical_indices(table)
    d = mu.dim
    terms = []
    for j, a in enumerate(mu.atoms):
        coords = []
        if isinstance(a, PointAtom):
            for idx in indices:
                e = a.evaluate(idx, evaluator)
                coords.append(np.array([[e.real]], dtype=np.complex128))
                coords.append(np.array([[e.imag]], dtype=np.complex128))
            point = MatrixPoint(coords=coords, selfadjoint=True, label=j)
            f, r = numerical_rank_factor(herm_part(a.weight), tol)
            for k in range(r):
                terms.append((f[k:k + 1, :], point))
        else:
            b = a.rep_dim
            for idx in indices:
                w = a.word(idx, mu.index_rule)
                coords.append(herm_part(w))
                coords.append(herm_part(-1j * w))
            point = MatrixPoint(coords=coords, selfadjoint=True, label=j)
            lam, q = np.linalg.eigh(herm_part(a.weight))
            lmax = max(float(lam[-1]), 0.0)
            for k in range(lam.size - 1, -1, -1):
                if lam[k] <= tol.rank_tol * lmax or lam[k] <= 0:
                    break
                terms.append((np.sqrt(lam[k]) * q[:, k].reshape(b, d), point))
    comb = MatrixConvexCombination(n=d, terms=terms)
    return comb


def combination_to_measure(comb: MatrixConvexCombination, mu: AtomicMeasure
                           ) -> AtomicMeasure:
    """Reassemble a measure from a (reduced) combination of its atoms.

    Term labels index into the original measure's grid; coefficients
    gamma accumulate as gamma* gamma (point weights) or rank-one Choi
    blocks (irrep weights).
    """
    d = mu.dim
    acc: dict = {}
    for gamma, point in comb.terms:
        j = point.label
        if j is None or not (0 <= j < len(mu.atoms)):
            raise ShapeMismatchError("combination term does not label a grid atom")
        a = mu.atoms[j]
        if isinstance(a, PointAtom):
            w = gamma.conj().T @ gamma
        else:
            g = gamma.reshape(-1)
            w = np.outer(g, g.conj())
        acc[j] = acc.get(j, 0) + w
    atoms = []
    for j, w in sorted(acc.items()):
        a = mu.atoms[j]
        if isinstance(a, PointAtom):
            atoms.append(PointAtom(a.point, herm_part(w)))
        else:
            atoms.append(IrrepAtom(a.generators, herm_part(w),
                                   scale_pairs=list(a.scale_pairs)))
    return AtomicMeasure(dim=d, atoms=atoms, defect=mu.defect,
                         fit_residual=mu.fit_residual, index_rule=mu.index_rule)
