"""Dense complex Hermitian linear algebra.

Everything here works on small dense matrices (dimension 8 or less in the
problems this package builds), so accuracy and determinism matter more than
speed.  The eigensolver is a cyclic Jacobi iteration with complex plane
rotations.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

HERMITIAN_TOL = 1e-12
PSD_FLOOR = -1e-9
RECONSTRUCTION_TOL = 1e-10

_MAX_SWEEPS = 100


class NotHermitianError(ValueError):
    """Raised when a matrix that must be Hermitian is not."""

    def __init__(self, max_asymmetry: float, tol: float):
        self.max_asymmetry = max_asymmetry
        self.tol = tol
        super().__init__(
            f"matrix is not Hermitian: max |A - A^H| = {max_asymmetry:.3e} exceeds {tol:.1e}"
        )


class SpectralDecomposition(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


class PsdCheck(NamedTuple):
    ok: bool
    min_eigenvalue: float


def as_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got shape {m.shape}")
    return m


def max_asymmetry(a: np.ndarray) -> float:
    return float(np.max(np.abs(a - a.conj().T))) if a.size else 0.0


def check_hermitian(a, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Return ``a`` as a complex array after validating Hermiticity.

    The tolerance is absolute on entries, scaled by ``max(1, max|a|)`` so that
    sums of rounded matrices are not rejected for trivially large norms.
    """
    m = as_matrix(a)
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    asym = max_asymmetry(m)
    scale = max(1.0, float(np.max(np.abs(m)))) if m.size else 1.0
    if asym > tol * scale:
        raise NotHermitianError(asym, tol * scale)
    return m


def hermitian_part(a) -> np.ndarray:
    m = as_matrix(a)
    return (m + m.conj().T) / 2


def _jacobi_hermitian(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    n = a.shape[0]
    a = hermitian_part(a).copy()
    v = np.eye(n, dtype=complex)
    scale = float(np.linalg.norm(a))
    if n < 2 or scale == 0.0:
        return np.real(np.diag(a)).copy(), v
    threshold = 1e-15 * scale
    for _ in range(_MAX_SWEEPS):
        off = float(np.linalg.norm(a - np.diag(np.diag(a))))
        if off <= threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                r = abs(apq)
                if r <= 1e-300:
                    continue
                phase = apq / r
                app = a[p, p].real
                aqq = a[q, q].real
                tau = (aqq - app) / (2.0 * r)
                if abs(tau) > 1e150:
                    t = 0.5 / tau
                else:
                    t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                # G = diag(1, conj(phase)) @ [[c, s], [-s, c]]
                g = np.array([[c, s], [-s * np.conj(phase), c * np.conj(phase)]], dtype=complex)
                idx = [p, q]
                a[:, idx] = a[:, idx] @ g
                a[idx, :] = g.conj().T @ a[idx, :]
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                v[:, idx] = v[:, idx] @ g
    w = np.real(np.diag(a)).copy()
    return w, v


def eig_hermitian(a, tol: float = HERMITIAN_TOL) -> SpectralDecomposition:
    """Eigendecomposition of a Hermitian matrix.

    Returns ascending real eigenvalues and orthonormal eigenvectors as the
    columns of a unitary matrix.  Each eigenvector is phase-fixed so that its
    largest-magnitude entry is real and positive, making the output
    reproducible across calls.

    Raises
    ------
    NotHermitianError
        If ``a`` deviates from Hermitian by more than ``tol``.
    """
    m = check_hermitian(a, tol)
    w, v = _jacobi_hermitian(m)
    order = np.argsort(w, kind="stable")
    w = w[order]
    v = v[:, order]
    for j in range(v.shape[1]):
        k = int(np.argmax(np.abs(v[:, j]) - 1e-12 * np.arange(v.shape[0])))
        v[:, j] *= np.conj(v[k, j]) / abs(v[k, j])
    return SpectralDecomposition(w, v)


def eigvalsh(a, tol: float = HERMITIAN_TOL) -> np.ndarray:
    return eig_hermitian(a, tol).eigenvalues


def is_psd(a, floor: float = PSD_FLOOR, tol: float = HERMITIAN_TOL) -> PsdCheck:
    """Check positive semidefiniteness against an eigenvalue floor."""
    if floor > 0:
        raise ValueError("PSD floor must be <= 0")
    m = check_hermitian(a, tol)
    if m.size == 0:
        return PsdCheck(True, 0.0)
    lam = float(eigvalsh(m, tol)[0])
    return PsdCheck(lam >= floor, lam)


def kron(*factors) -> np.ndarray:
    """Kronecker product with party 1 as the most significant index."""
    if not factors:
        raise ValueError("kron needs at least one factor")
    out = np.asarray(factors[0], dtype=complex)
    for f in factors[1:]:
        out = np.kron(out, np.asarray(f, dtype=complex))
    return out


def real_embedding(h, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Map a Hermitian ``d x d`` matrix to the real symmetric ``[[Re, -Im], [Im, Re]]``."""
    m = check_hermitian(h, tol)
    re, im = m.real, m.imag
    return np.block([[re, -im], [im, re]])


def real_embedding_inverse(w: np.ndarray) -> np.ndarray:
    """Recover the Hermitian matrix from a (possibly unstructured) real block matrix.

    The input is first averaged over the complex-structure symmetry, which is
    exact for embeddings and a projection for anything else.
    """
    n = w.shape[0] // 2
    re = (w[:n, :n] + w[n:, n:]) / 2
    im = (w[n:, :n] - w[:n, n:]) / 2
    return hermitian_part(re + 1j * im)


def projector(vec) -> np.ndarray:
    v = np.asarray(vec, dtype=complex).reshape(-1)
    return np.outer(v, v.conj())


def orthocomplement(vectors, dim: int, rtol: float = 1e-10) -> np.ndarray:
    """Orthonormal basis (columns) of the complement of ``span(vectors)``."""
    if len(vectors) == 0:
        return np.eye(dim, dtype=complex)
    g = sum(projector(v) for v in vectors)
    dec = eig_hermitian(hermitian_part(g))
    cut = rtol * max(1.0, float(dec.eigenvalues[-1]))
    keep = dec.eigenvalues <= cut
    return dec.eigenvectors[:, keep]


def hermitian_basis(dim: int) -> list[np.ndarray]:
    """Orthonormal basis of ``dim x dim`` Hermitian matrices under the trace inner product."""
    basis = []
    for j in range(dim):
        e = np.zeros((dim, dim), dtype=complex)
        e[j, j] = 1.0
        basis.append(e)
    r = 1 / np.sqrt(2)
    for j in range(dim):
        for k in range(j + 1, dim):
            e = np.zeros((dim, dim), dtype=complex)
            e[j, k] = e[k, j] = r
            basis.append(e)
            f = np.zeros((dim, dim), dtype=complex)
            f[j, k] = -1j * r
            f[k, j] = 1j * r
            basis.append(f)
    return basis


def sqrtm_psd(a) -> np.ndarray:
    dec = eig_hermitian(hermitian_part(a))
    w = np.clip(dec.eigenvalues, 0.0, None)
    return (dec.eigenvectors * np.sqrt(w)) @ dec.eigenvectors.conj().T


def inv_sqrtm_pd(a) -> np.ndarray:
    dec = eig_hermitian(hermitian_part(a))
    if dec.eigenvalues[0] <= 0:
        raise np.linalg.LinAlgError("matrix is not positive definite")
    return (dec.eigenvectors / np.sqrt(dec.eigenvalues)) @ dec.eigenvectors.conj().T
