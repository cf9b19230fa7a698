"""Dense complex linear-algebra kernel shared by every other module.

Thin, contract-checked wrappers around NumPy's LAPACK-backed routines.
Everything here is deterministic for identical inputs (required for
reproducible CLI output) and carries no quantum semantics.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, DomainError, NumericalFailure

# Centralized tolerances: structural checks (hermiticity, completeness,
# reconstruction residuals) vs certificate-level slack (gap/QFI clipping).
STRUCTURAL_TOL = 1e-9
CERTIFICATE_TOL = 1e-6

_DEFAULT_DIM_CAP = 4096
_DIM_CAP_ENV = "QMETRO_MAX_DIM"


def dimension_cap() -> int:
    """Largest admissible Hilbert-space dimension (env ``QMETRO_MAX_DIM`` overrides)."""
    raw = os.environ.get(_DIM_CAP_ENV)
    if raw is None:
        return _DEFAULT_DIM_CAP
    try:
        cap = int(raw)
    except ValueError as exc:
        raise DomainError(f"{_DIM_CAP_ENV} must be an integer, got {raw!r}") from exc
    if cap < 1:
        raise DomainError(f"{_DIM_CAP_ENV} must be positive, got {cap}")
    return cap


def as_complex_matrix(m, name: str = "matrix") -> np.ndarray:
    """Coerce to a non-empty 2-D complex ndarray, rejecting NaN/Inf entries."""
    arr = np.asarray(m, dtype=complex)
    if arr.ndim != 2 or arr.size == 0:
        raise DomainError(f"{name} must be a non-empty 2-D array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} contains non-finite entries")
    return arr


@dataclass(frozen=True)
class SingularValueDecomposition:
    """SVD with the convention ``input = u @ diag(singular_values) @ v.conj().T``.

    ``u`` and ``v`` have orthonormal columns; ``singular_values`` is
    non-increasing and non-negative.
    """

    u: np.ndarray
    singular_values: np.ndarray
    v: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.u * self.singular_values) @ self.v.conj().T


@dataclass(frozen=True)
class HermitianEig:
    """Eigendecomposition of a Hermitian matrix.

    ``eigenvalues`` is non-decreasing; ``eigenvectors`` holds the matching
    orthonormal eigenvectors as columns.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def svd(m) -> SingularValueDecomposition:
    """Full singular value decomposition of a dense complex matrix.

    Raises
    ------
    NumericalFailure
        If the underlying iteration does not converge.
    """
    a = as_complex_matrix(m)
    try:
        u, s, vh = np.linalg.svd(a)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"SVD did not converge for shape {a.shape}") from exc
    return SingularValueDecomposition(u=u, singular_values=s, v=vh.conj().T)


def singular_values(m) -> np.ndarray:
    """Singular values only (non-increasing), skipping the basis computation."""
    a = as_complex_matrix(m)
    try:
        return np.linalg.svd(a, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"SVD did not converge for shape {a.shape}") from exc


def trace_norm(m) -> float:
    """Trace norm: the sum of singular values."""
    return float(singular_values(m).sum())


def operator_norm(m) -> float:
    """Operator norm: the largest singular value."""
    return float(singular_values(m)[0])


def hermitian_eig(h) -> HermitianEig:
    """Eigendecomposition of a (numerically) Hermitian matrix.

    The input must satisfy ``||h - h^dag||_F <= STRUCTURAL_TOL * ||h||_F``;
    it is symmetrized internally before the solve.

    Raises
    ------
    DomainError
        If ``h`` is not square or not Hermitian within tolerance.
    """
    a = as_complex_matrix(h)
    if a.shape[0] != a.shape[1]:
        raise DomainError(f"hermitian_eig requires a square matrix, got {a.shape}")
    scale = np.linalg.norm(a)
    if np.linalg.norm(a - a.conj().T) > STRUCTURAL_TOL * scale:
        raise DomainError("matrix is not Hermitian within tolerance")
    sym = 0.5 * (a + a.conj().T)
    try:
        w, v = np.linalg.eigh(sym)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure("Hermitian eigendecomposition failed") from exc
    return HermitianEig(eigenvalues=w, eigenvectors=v)


def kron(a, b) -> np.ndarray:
    """Kronecker product with a capacity guard on the resulting dimensions."""
    left = as_complex_matrix(a, "a")
    right = as_complex_matrix(b, "b")
    cap = dimension_cap()
    rows = left.shape[0] * right.shape[0]
    cols = left.shape[1] * right.shape[1]
    if rows > cap or cols > cap:
        raise CapacityError(
            f"kron result {rows}x{cols} exceeds the dimension cap {cap} "
            f"(override with {_DIM_CAP_ENV})"
        )
    return np.kron(left, right)
