"""Dense complex linear algebra with fixed conventions.

Conventions used throughout the package:
  * vec stacks rows: vec(|i><j|) = e_{i*d + j}, so (A (x) B) vec(R) = vec(A R B^T).
  * Hermitian eigendecompositions return eigenvalues in ascending order and
    eigenvectors with a deterministic phase (largest-magnitude component made
    real and positive).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import HermiticityError, ShapeError

HERMITICITY_RTOL = 1e-12


def as_complex_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2:
        raise ShapeError(f"expected a 2-d array, got ndim={m.ndim}")
    return m


def require_square(a) -> np.ndarray:
    m = as_complex_matrix(a)
    if m.shape[0] != m.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {m.shape}")
    return m


def hermiticity_defect(a) -> float:
    """Largest entrywise deviation |A - A^dagger|."""
    m = as_complex_matrix(a)
    return float(np.abs(m - m.conj().T).max())


def require_hermitian(a, rtol: float = HERMITICITY_RTOL) -> np.ndarray:
    m = require_square(a)
    scale = max(1.0, float(np.abs(m).max()))
    defect = hermiticity_defect(m)
    if defect > rtol * scale:
        raise HermiticityError(
            f"matrix is not Hermitian: defect {defect:.3e} exceeds {rtol:.1e} * {scale:.3e}"
        )
    return m


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues (ascending, real) and orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T

    def function_of(self, values: np.ndarray) -> np.ndarray:
        """Assemble V diag(values) V^dagger for per-eigenvalue values."""
        v = self.eigenvectors
        return (v * np.asarray(values)) @ v.conj().T


def _canonical_phases(vectors: np.ndarray) -> np.ndarray:
    # rotate each column so its largest-magnitude entry is real positive;
    # ties inside degenerate clusters then resolve the same way on every run
    out = np.array(vectors, copy=True)
    pivot_rows = np.argmax(np.abs(out), axis=0)
    for col, row in enumerate(pivot_rows):
        pivot = out[row, col]
        mag = abs(pivot)
        if mag > 0.0:
            out[:, col] *= pivot.conjugate() / mag
    return out


def eig_hermitian(a, rtol: float = HERMITICITY_RTOL) -> SpectralDecomposition:
    """Spectral decomposition of a Hermitian matrix.

    Raises ShapeError for non-square input and HermiticityError when the
    symmetry defect exceeds rtol relative to the largest entry.
    """
    m = require_hermitian(a, rtol)
    w, v = np.linalg.eigh(m)
    return SpectralDecomposition(w, _canonical_phases(v))


class HermitianOperator:
    """A Hermitian matrix together with its spectral decomposition.

    Treated as immutable after construction; the decomposition is computed
    once and reused for every channel and unitary built from it.
    """

    def __init__(self, matrix):
        self.matrix = require_hermitian(matrix)
        self.spectral = eig_hermitian(self.matrix)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def eigenvalues(self) -> np.ndarray:
        return self.spectral.eigenvalues

    @property
    def eigenvectors(self) -> np.ndarray:
        return self.spectral.eigenvectors

    @property
    def spectral_norm(self) -> float:
        return float(np.abs(self.eigenvalues).max()) if self.dim else 0.0

    def unitary_at(self, s: float) -> np.ndarray:
        """exp(-i H s) assembled from the cached decomposition."""
        return self.spectral.function_of(np.exp(-1j * self.eigenvalues * s))

    def gaps(self) -> np.ndarray:
        """Matrix of eigenvalue differences lambda_j - lambda_k."""
        lam = self.eigenvalues
        return lam[:, None] - lam[None, :]


def vec(b) -> np.ndarray:
    """Row-major stacking of a matrix into a vector."""
    return as_complex_matrix(b).reshape(-1)


def unvec(v, d: int) -> np.ndarray:
    """Inverse of vec for a d x d matrix."""
    arr = np.asarray(v, dtype=np.complex128)
    if arr.ndim != 1 or arr.shape[0] != d * d:
        raise ShapeError(f"expected a vector of length {d * d}, got shape {arr.shape}")
    return arr.reshape(d, d)


def kron(a, b) -> np.ndarray:
    return np.kron(as_complex_matrix(a), as_complex_matrix(b))


def trace_norm(a) -> float:
    """Sum of singular values (Schatten 1-norm) of a square matrix."""
    m = require_square(a)
    return float(np.linalg.svd(m, compute_uv=False).sum())


def random_hermitian(dim: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    """Gaussian Hermitian matrix, optionally rescaled to a target spectral norm."""
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    h = (a + a.conj().T) / 2.0
    if scale is not None:
        norm = np.linalg.norm(h, 2)
        if norm > 0:
            h = h * (scale / norm)
    return h
