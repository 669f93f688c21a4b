import numpy as np
import pytest

import dilatekit as dk
from dilatekit import (
    NotHermitianError,
    NotIsometricError,
    NotPSDError,
    ShapeMismatchError,
    Tolerances,
)

from conftest import complex_gaussian, random_psd, random_unitary


def test_asmatrix_coercion_and_rejection():
    m = dk.asmatrix([[1, 2], [3, 4]])
    assert m.dtype == np.complex128 and m.shape == (2, 2)
    # non-contiguous views must be accepted (transposes arise in moment tables)
    base = np.arange(6, dtype=np.complex128).reshape(2, 3)
    assert dk.asmatrix(base.T).shape == (3, 2)
    with pytest.raises(ShapeMismatchError):
        dk.asmatrix(np.array([1.0, 2.0]))
    with pytest.raises(ShapeMismatchError):
        dk.asmatrix(np.array([[np.nan, 0.0], [0.0, 1.0]]))
    with pytest.raises(ShapeMismatchError):
        dk.asmatrix(np.array([[np.inf * 1j, 0.0], [0.0, 1.0]]))


def test_tolerances_validation():
    with pytest.raises(ValueError):
        Tolerances(rank_tol=0.0)
    with pytest.raises(ValueError):
        Tolerances(rank_tol=1e-3, psd_tol=1e-9)
    t = Tolerances().replace(residual_tol=1e-6)
    assert t.residual_tol == 1e-6
    assert dk.DEFAULT_TOL.residual_tol == 1e-8


def test_herm_eig_reconstruction_up_to_64():
    rng = np.random.default_rng(3)
    for d in (2, 8, 33, 64):
        a = complex_gaussian(rng, (d, d))
        a = 0.5 * (a + a.conj().T)
        lam, q = dk.herm_eig(a)
        rec = (q * lam) @ q.conj().T
        assert np.linalg.norm(rec - a) <= 1e-12 * max(1.0, np.linalg.norm(a))
        assert np.all(np.diff(lam) >= 0)


def test_herm_eig_rejects_non_hermitian():
    with pytest.raises(NotHermitianError):
        dk.herm_eig(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_psd_project_frozen():
    out = dk.psd_project(np.diag([1.0, -1.0]))
    assert np.allclose(out, np.diag([1.0, 0.0]), atol=1e-15)
    out = dk.psd_project(np.array([[0.0, 1.0], [1.0, 0.0]]))
    assert np.allclose(out, 0.5 * np.ones((2, 2)), atol=1e-14)


def test_psd_project_distance_is_clipped_tail():
    rng = np.random.default_rng(5)
    for d in (2, 5, 11):
        a = complex_gaussian(rng, (d, d))
        a = 0.5 * (a + a.conj().T)
        p = dk.psd_project(a)
        lam = np.linalg.eigvalsh(a)
        clipped = np.linalg.norm(np.minimum(lam, 0.0))
        assert abs(np.linalg.norm(p - a) - clipped) <= 1e-12 * max(1.0, clipped)
        assert np.linalg.eigvalsh(p)[0] >= -1e-14 * np.linalg.norm(a)


def test_numerical_rank_factor_reconstruction():
    rng = np.random.default_rng(7)
    for d, r in ((3, 1), (5, 3), (8, 8)):
        m = random_psd(rng, d, rank=r)
        w, rank = dk.numerical_rank_factor(m)
        assert rank == r
        assert w.shape == (r, d)
        err = np.linalg.norm(w.conj().T @ w - m)
        assert err <= 10 * dk.DEFAULT_TOL.rank_tol * np.linalg.norm(m)


def test_numerical_rank_factor_rejects_indefinite():
    with pytest.raises(NotPSDError) as exc:
        dk.numerical_rank_factor(np.diag([1.0, -0.5]))
    assert exc.value.min_eig < -1e-6


def test_numerical_rank_factor_bit_deterministic():
    rng = np.random.default_rng(9)
    m = random_psd(rng, 6, rank=4)
    w1, _ = dk.numerical_rank_factor(m)
    w2, _ = dk.numerical_rank_factor(m.copy())
    assert w1.tobytes() == w2.tobytes()


def test_polar_isometry():
    rng = np.random.default_rng(11)
    a = complex_gaussian(rng, (5, 3))
    v = dk.polar_isometry(a)
    assert np.linalg.norm(v.conj().T @ v - np.eye(3)) <= 1e-12
    # A = V P forces V* A = P, a PSD matrix
    p = v.conj().T @ a
    assert np.linalg.norm(p - p.conj().T) <= 1e-12
    assert np.linalg.eigvalsh(0.5 * (p + p.conj().T))[0] >= -1e-12


def test_inv_sqrt_psd():
    rng = np.random.default_rng(13)
    s = random_psd(rng, 4) + 0.1 * np.eye(4)
    c = dk.inv_sqrt_psd(s)
    assert np.linalg.norm(c @ s @ c - np.eye(4)) <= 1e-10
    # strictly positive definite input is part of the contract
    g = complex_gaussian(rng, (4, 2))
    with pytest.raises(NotPSDError):
        dk.inv_sqrt_psd(g @ g.conj().T)


def test_complete_isometry_frozen_permutation():
    u0 = np.array([[0.0, 0.0], [1.0, 0.0]])
    d = np.array([[1.0], [0.0]])
    r = np.array([[0.0], [1.0]])
    u = dk.complete_isometry_to_unitary(u0, d, r)
    assert np.allclose(u, np.array([[0.0, 1.0], [1.0, 0.0]]), atol=1e-15)


def test_complete_isometry_properties():
    rng = np.random.default_rng(17)
    n, k = 6, 2
    q = random_unitary(rng, n)
    d = q[:, :k]
    target = random_unitary(rng, n)
    u0 = target @ d @ d.conj().T
    r = dk.polar_isometry(target @ d)
    u = dk.complete_isometry_to_unitary(u0, d, r)
    assert np.linalg.norm(u.conj().T @ u - np.eye(n)) <= 1e-12
    assert np.linalg.norm(u @ d - u0 @ d) <= 1e-10
    u2 = dk.complete_isometry_to_unitary(u0.copy(), d.copy(), r.copy())
    assert u.tobytes() == u2.tobytes()


def test_complete_isometry_rejects_non_isometric_map():
    u0 = np.diag([0.5, 1.0])
    d = np.array([[1.0], [0.0]])
    with pytest.raises(NotIsometricError):
        dk.complete_isometry_to_unitary(u0, d, d)


def test_hvec_roundtrip_isometry():
    rng = np.random.default_rng(19)
    for d in (1, 3, 6):
        a = complex_gaussian(rng, (d, d))
        h = 0.5 * (a + a.conj().T)
        v = dk.hvec(h)
        assert v.dtype == np.float64 and v.size == d * d
        assert abs(np.linalg.norm(v) - np.linalg.norm(h)) <= 1e-13
        assert np.linalg.norm(dk.hunvec(v, d) - h) <= 1e-14
