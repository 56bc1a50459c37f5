from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from antidist import linalg


def random_hermitian(rng, d):
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return (a + a.conj().T) / 2


@pytest.mark.parametrize("d", [1, 2, 3, 4, 8, 16])
def test_eig_reconstruction(rng, d):
    for _ in range(10):
        a = random_hermitian(rng, d)
        dec = linalg.eig_hermitian(a)
        assert np.all(np.diff(dec.eigenvalues) >= -1e-12)
        err = np.max(np.abs(dec.reconstruct() - a)) / max(1.0, np.max(np.abs(a)))
        assert err <= linalg.RECONSTRUCTION_TOL
        v = dec.eigenvectors
        assert np.allclose(v.conj().T @ v, np.eye(d), atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_eig_matches_numpy(d, seed):
    a = random_hermitian(np.random.default_rng(seed), d)
    assert np.allclose(linalg.eigvalsh(a), np.linalg.eigvalsh(a), atol=1e-10)


def test_degenerate_and_diagonal():
    a = np.diag([2.0, 2.0, -1.0]).astype(complex)
    assert np.allclose(linalg.eigvalsh(a), [-1, 2, 2])
    p = linalg.projector(np.array([1, 1j]) / np.sqrt(2))
    assert np.allclose(linalg.eigvalsh(p), [0, 1], atol=1e-14)


def test_not_hermitian_reports_asymmetry():
    a = np.array([[1, 2], [0, 1]], dtype=complex)
    with pytest.raises(linalg.NotHermitianError) as info:
        linalg.eig_hermitian(a)
    assert info.value.max_asymmetry == pytest.approx(2.0)


def test_is_psd_floor():
    a = np.diag([1.0, -5e-10])
    assert linalg.is_psd(a).ok
    assert not linalg.is_psd(np.diag([1.0, -1e-6])).ok
    with pytest.raises(ValueError):
        linalg.is_psd(a, floor=1e-3)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 5), st.integers(0, 2**32 - 1), st.floats(-2, 2))
def test_real_embedding_preserves_psd(d, seed, shift):
    a = random_hermitian(np.random.default_rng(seed), d) + shift * np.eye(d)
    w = linalg.real_embedding(a)
    assert np.allclose(w, w.T)
    lw = np.sort(np.linalg.eigvalsh(w))
    la = np.sort(np.repeat(np.linalg.eigvalsh(a), 2))
    assert np.allclose(lw, la, atol=1e-10)
    assert np.allclose(linalg.real_embedding_inverse(w), a)


def test_kron_associative(rng):
    a, b, c = (rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)) for _ in range(3))
    left = linalg.kron(linalg.kron(a, b), c)
    right = linalg.kron(a, linalg.kron(b, c))
    assert np.allclose(left, right)
    assert np.allclose(linalg.kron(a, b, c), left)


def test_orthocomplement():
    v = [np.array([1, 0, 0], complex), np.array([1, 1, 0], complex) / np.sqrt(2)]
    c = linalg.orthocomplement(v, 3)
    assert c.shape == (3, 1)
    assert np.allclose(np.abs(c[:, 0]), [0, 0, 1])
    assert linalg.orthocomplement([], 2).shape == (2, 2)


@pytest.mark.parametrize("d", [1, 2, 3, 4])
def test_hermitian_basis_orthonormal(d):
    basis = linalg.hermitian_basis(d)
    assert len(basis) == d * d
    g = np.array([[np.vdot(a, b).real for b in basis] for a in basis])
    assert np.allclose(g, np.eye(d * d))
    assert all(linalg.max_asymmetry(b) == 0 for b in basis)


def test_sqrtm_and_inverse(rng):
    a = random_hermitian(rng, 4)
    p = a @ a + np.eye(4)
    s = linalg.sqrtm_psd(p)
    assert np.allclose(s @ s, p)
    assert np.allclose(linalg.inv_sqrtm_pd(p) @ s, np.eye(4))
