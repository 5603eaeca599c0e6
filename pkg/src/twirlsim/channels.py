"""Quantum states and channels in superoperator and Choi form.

The Choi matrix is unnormalized: J(Phi) = sum_ij |i><j| (x) Phi(|i><j|),
so trace-preserving channels give tr J = d and partial trace over the
second (output) factor equal to the identity.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ShapeError
from .linalg import (
    as_complex_matrix,
    hermiticity_defect,
    require_square,
    trace_norm,
    unvec,
    vec,
)

DENSITY_ATOL = 1e-10
CP_EIG_TOL = -1e-9
TP_DIAG_TOL = 1e-10


class CPTPWarning(UserWarning):
    """A channel was applied whose multiplier fails the CPTP check."""


# ---------------------------------------------------------------------------
# density matrices
# ---------------------------------------------------------------------------

def check_density_matrix(rho, atol: float = DENSITY_ATOL) -> None:
    """Raise ValueError unless rho is Hermitian, unit trace and PSD within atol."""
    m = require_square(rho)
    defect = hermiticity_defect(m)
    if defect > atol:
        raise ValueError(f"density matrix not Hermitian: defect {defect:.3e}")
    tr = m.trace()
    if abs(tr - 1.0) > atol:
        raise ValueError(f"density matrix trace {tr} differs from 1 by more than {atol:.1e}")
    min_eig = float(np.linalg.eigvalsh((m + m.conj().T) / 2.0).min())
    if min_eig < -atol:
        raise ValueError(f"density matrix has negative eigenvalue {min_eig:.3e}")


def pure_state_density(psi) -> np.ndarray:
    v = np.asarray(psi, dtype=np.complex128).reshape(-1)
    nrm = np.linalg.norm(v)
    if nrm == 0:
        raise ValueError("cannot normalize the zero vector")
    v = v / nrm
    return np.outer(v, v.conj())


def basis_state(dim: int, index: int) -> np.ndarray:
    if not 0 <= index < dim:
        raise ValueError(f"basis index {index} out of range for dimension {dim}")
    rho = np.zeros((dim, dim), dtype=np.complex128)
    rho[index, index] = 1.0
    return rho


def plus_state(n_qubits: int) -> np.ndarray:
    """|+...+><+...+| on n qubits."""
    d = 2 ** n_qubits
    return np.full((d, d), 1.0 / d, dtype=np.complex128)


def maximally_mixed(dim: int) -> np.ndarray:
    return np.eye(dim, dtype=np.complex128) / dim


def random_density_matrix(dim: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = g @ g.conj().T
    return rho / rho.trace()


# ---------------------------------------------------------------------------
# Schur multipliers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SchurMultiplier:
    """Entrywise multiplier in a fixed eigenbasis.

    eigenbasis holds the eigenvector columns; multiplier holds the d x d
    coefficient matrix applied entrywise to states rotated into that basis.
    """

    eigenbasis: np.ndarray
    multiplier: np.ndarray

    def __post_init__(self):
        u = require_square(self.eigenbasis)
        m = require_square(self.multiplier)
        if u.shape != m.shape:
            raise ShapeError(f"eigenbasis {u.shape} and multiplier {m.shape} differ in shape")

    @property
    def dim(self) -> int:
        return self.multiplier.shape[0]


@dataclass(frozen=True)
class CPTPReport:
    is_cp: bool
    is_tp: bool
    min_eigenvalue: float
    max_diag_deviation: float


def _multiplier_of(m) -> np.ndarray:
    if isinstance(m, SchurMultiplier):
        return m.multiplier
    return require_square(m)


def cptp_check(m, cp_tol: float = CP_EIG_TOL, tp_tol: float = TP_DIAG_TOL) -> CPTPReport:
    """Complete positivity and trace preservation of an entrywise multiplier.

    CP holds iff the multiplier matrix is PSD; TP holds iff its diagonal is
    all ones. The minimum eigenvalue is taken of the Hermitian part, and a
    symmetry defect beyond |cp_tol| also disqualifies CP.
    """
    mat = _multiplier_of(m)
    defect = hermiticity_defect(mat)
    min_eig = float(np.linalg.eigvalsh((mat + mat.conj().T) / 2.0).min())
    max_diag = float(np.abs(np.diag(mat) - 1.0).max())
    is_cp = min_eig >= cp_tol and defect <= abs(cp_tol)
    return CPTPReport(is_cp=is_cp, is_tp=max_diag <= tp_tol,
                      min_eigenvalue=min_eig, max_diag_deviation=max_diag)


def apply_schur(m: SchurMultiplier, rho, validate: bool = True) -> np.ndarray:
    """Apply the entrywise multiplier channel: U (M * (U^dag rho U)) U^dag.

    A multiplier failing the CPTP check raises a CPTPWarning but the result
    is still returned, so deliberately broken channels remain inspectable.
    """
    rho = require_square(rho)
    if rho.shape != m.multiplier.shape:
        raise ShapeError(f"state shape {rho.shape} does not match multiplier {m.multiplier.shape}")
    if validate:
        report = cptp_check(m)
        if not (report.is_cp and report.is_tp):
            warnings.warn(
                f"multiplier fails CPTP check (cp={report.is_cp}, tp={report.is_tp}); "
                "applying anyway", CPTPWarning, stacklevel=2)
    if np.array_equal(m.multiplier, np.ones_like(m.multiplier)):
        # identity channel: skip the basis rotations so the state is untouched
        return rho.copy()
    u = m.eigenbasis
    rotated = u.conj().T @ rho @ u
    return u @ (m.multiplier * rotated) @ u.conj().T


# ---------------------------------------------------------------------------
# superoperators and Choi matrices
# ---------------------------------------------------------------------------

def superoperator_of_unitary(u) -> np.ndarray:
    """Superoperator of rho -> u rho u^dag acting on vec(rho)."""
    u = require_square(u)
    return np.kron(u, u.conj())


def superoperator_of_schur(m: SchurMultiplier) -> np.ndarray:
    u = m.eigenbasis
    w = np.kron(u, u.conj())
    return (w * vec(m.multiplier)) @ w.conj().T


def apply_superoperator(s, rho) -> np.ndarray:
    rho = require_square(rho)
    d = rho.shape[0]
    s = as_complex_matrix(s)
    if s.shape != (d * d, d * d):
        raise ShapeError(f"superoperator shape {s.shape} does not match dimension {d}")
    return unvec(s @ vec(rho), d)


def choi_of_superoperator(s) -> np.ndarray:
    """Unnormalized Choi matrix, assembled by applying s to each matrix unit."""
    s = require_square(s)
    d2 = s.shape[0]
    d = int(round(d2 ** 0.5))
    if d * d != d2:
        raise ShapeError(f"superoperator dimension {d2} is not a perfect square")
    choi = np.zeros((d2, d2), dtype=np.complex128)
    unit = np.zeros((d, d), dtype=np.complex128)
    for i in range(d):
        for j in range(d):
            unit[i, j] = 1.0
            image = unvec(s @ vec(unit), d)
            choi[i * d:(i + 1) * d, j * d:(j + 1) * d] = image
            unit[i, j] = 0.0
    return choi


def choi_of_unitary(u) -> np.ndarray:
    """Choi matrix of conjugation by u, the rank-one form w w^dag with w = vec(u^T)."""
    w = vec(require_square(u).T)
    return np.outer(w, w.conj())


def apply_choi(choi, rho) -> np.ndarray:
    """Evaluate the channel encoded by an unnormalized Choi matrix on rho."""
    rho = require_square(rho)
    d = rho.shape[0]
    j = as_complex_matrix(choi)
    if j.shape != (d * d, d * d):
        raise ShapeError(f"Choi shape {j.shape} does not match dimension {d}")
    blocks = j.reshape(d, d, d, d)
    return np.einsum("ij,iajb->ab", rho, blocks)


def partial_trace_output(choi, d: int) -> np.ndarray:
    """Trace out the second (output) tensor factor of an unnormalized Choi matrix."""
    j = as_complex_matrix(choi)
    if j.shape != (d * d, d * d):
        raise ShapeError(f"Choi shape {j.shape} does not match dimension {d}")
    return np.einsum("iaja->ij", j.reshape(d, d, d, d))


@dataclass(frozen=True)
class ChoiReport:
    is_psd: bool
    min_eigenvalue: float
    trace: complex
    tp_deviation: float


def check_choi(choi, d: int, psd_tol: float = CP_EIG_TOL, tp_atol: float = 1e-8) -> ChoiReport:
    j = as_complex_matrix(choi)
    min_eig = float(np.linalg.eigvalsh((j + j.conj().T) / 2.0).min())
    tp_dev = float(np.abs(partial_trace_output(j, d) - np.eye(d)).max())
    return ChoiReport(is_psd=min_eig >= psd_tol, min_eigenvalue=min_eig,
                      trace=complex(j.trace()), tp_deviation=tp_dev)


def choi_trace_distance(a, b) -> float:
    """Trace norm of the difference of two Choi matrices.

    This is a computable surrogate for the diamond distance: dividing it by d
    lower-bounds the diamond norm, which in turn is at most this value.
    """
    return trace_norm(as_complex_matrix(a) - as_complex_matrix(b))


def state_trace_distance(a, b) -> float:
    return 0.5 * trace_norm(as_complex_matrix(a) - as_complex_matrix(b))
